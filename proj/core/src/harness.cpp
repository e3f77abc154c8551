#include "bindbench/harness.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <thread>

#include "bindbench/adapters.hpp"
#include "bindbench/annotation.hpp"
#include "bindbench/embedded_data.hpp"
#include "bindbench/glyphs.hpp"
#include "bindbench/hashing.hpp"
#include "bindbench/json_io.hpp"
#include "bindbench/observer.hpp"
#include "bindbench/parse.hpp"
#include "bindbench/report.hpp"
#include "bindbench/rng.hpp"
#include "bindbench/scoring.hpp"
#include "bindbench/trials.hpp"

namespace bindbench {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json observer_json(const ObserverParams& p) {
  return json{{"p_bind", p.p_bind}, {"k", p.k},
              {"w", p.w},           {"p_merge", p.p_merge},
              {"eps_conj", p.eps_conj}, {"e_unified", p.e_unified},
              {"e_decomposed", p.e_decomposed}};
}

// Temporary files from writers that were killed mid-write.
std::size_t remove_temporaries(const fs::path& dir) {
  std::error_code ec;
  if (!fs::exists(dir, ec)) return 0;
  std::vector<fs::path> stale;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().filename().string().find(".tmp.") != std::string::npos) stale.push_back(e.path());
  }
  for (const auto& p : stale) fs::remove(p, ec);
  return stale.size();
}

std::vector<TrialRecord> read_trials(const fs::path& path) {
  std::vector<TrialRecord> out;
  for (const auto& j : parse_jsonl(read_file(path))) out.push_back(j.get<TrialRecord>());
  return out;
}

struct WorkItem {
  const ModelConfig* model;
  const TrialRecord* trial;
};

struct ItemResult {
  std::optional<Transcript> transcript;
  std::vector<ScoreRecord> scores;
  std::optional<AnnotationTask> annotation;
  std::optional<Failure> failure;
  bool cache_hit = false;
};

std::map<std::string, std::string> base_keys(const TrialRecord& t, const std::string& model) {
  std::map<std::string, std::string> keys = t.conditions;
  keys["task"] = std::string(to_string(t.task));
  keys["variant"] = t.variant;
  keys["model"] = model;
  return keys;
}

class Runner {
 public:
  Runner(const RunConfig& cfg, fs::path dir) : cfg_(cfg), dir_(std::move(dir)), cache_(dir_ / "cache") {
    for (const auto& m : cfg_.models) {
      if (m.kind != ModelKind::Synthetic)
        remote_.emplace(m.id, std::make_unique<RemoteModel>(m.endpoint, &cache_, dir_ / "images" / "generated"));
    }
  }

  ItemResult process(const WorkItem& item) {
    ItemResult r;
    const TrialRecord& t = *item.trial;
    const ModelConfig& m = *item.model;
    try {
      std::string text;
      switch (m.kind) {
        case ModelKind::Synthetic: text = synthetic(m, t, r); break;
        case ModelKind::Remote: text = with_rate_retry(m, [&] { return remote_.at(m.id)->describe(trial_images(t, dir_), t.prompt, t.id); }, r).text; break;
        case ModelKind::RemoteImage: {
          auto res = with_rate_retry(m, [&] { return remote_.at(m.id)->generate_image(t.prompt, t.id); }, r);
          r.annotation = make_annotation_task(t, m.id, res.transcript.raw);
          return r;
        }
      }
      auto parsed = parse_answer(text, expected_kind(t), uses_rmts_features(t));
      r.scores = score_trial(t, parsed, {{"model", m.id}});
      r.scores.push_back({t.id, metric::kQueryFailed, 0.0, base_keys(t, m.id)});
    } catch (const Error& e) {
      r.failure = Failure{e.code(), e.what()};
    } catch (const std::exception& e) {
      r.failure = Failure{ErrorCode::IoError, e.what()};
    }
    if (r.failure) {
      r.transcript.reset();
      r.scores = {{t.id, metric::kQueryFailed, 1.0, base_keys(t, m.id)}};
    }
    return r;
  }

  TranscriptCache& cache() { return cache_; }

 private:
  std::string synthetic(const ModelConfig& m, const TrialRecord& t, ItemResult& r) {
    const std::uint64_t seed = observer_seed(t, cfg_.seed);
    json options{{"observer", observer_json(m.observer)}, {"seed", seed}, {"trial", sha256_hex(json(t).dump())}};
    const std::string key = cache_key(m.id, t.prompt, {}, options);
    if (auto hit = cache_.load(m.id, key)) {
      r.cache_hit = true;
      r.transcript = *hit;
      return hit->raw;
    }
    Transcript tr;
    tr.trial_id = t.id;
    tr.model_id = m.id;
    tr.cache_key = key;
    tr.prompt_hash = sha256_hex(t.prompt);
    tr.raw = synthetic_describe(t, m.observer, seed);
    tr.metadata = {{"observer_seed", seed}};
    cache_.store(tr);
    r.transcript = tr;
    return tr.raw;
  }

  // A 429 is retried after the server's Retry-After (or the configured backoff), up to max_retries times.
  template <class F>
  RemoteResult with_rate_retry(const ModelConfig& m, F&& call, ItemResult& r) {
    for (int attempt = 0;; ++attempt) {
      try {
        RemoteResult res = call();
        r.cache_hit = res.from_cache;
        r.transcript = res.transcript;
        return res;
      } catch (const RateLimitedError& e) {
        if (attempt >= m.endpoint.max_retries) throw;
        double wait = e.retry_after_seconds().value_or(m.endpoint.backoff_ms * std::pow(2.0, attempt) / 1000.0);
        std::this_thread::sleep_for(std::chrono::duration<double>(std::min(wait, 120.0)));
      }
    }
  }

  const RunConfig& cfg_;
  fs::path dir_;
  TranscriptCache cache_;
  std::map<std::string, std::unique_ptr<RemoteModel>> remote_;
};

std::string sha_of_file(const fs::path& p) {
  std::error_code ec;
  if (!fs::exists(p, ec)) return "";
  return sha256_hex(read_file(p));
}

}  // namespace

std::size_t generate(const RunConfig& cfg, std::optional<TaskKind> task, const fs::path& out) {
  fs::create_directories(out);
  remove_temporaries(out);
  auto trials = build_trials(cfg, task);
  write_file_atomic(out / "trials.jsonl", to_jsonl(trials));
  if (cfg.render_images) render_trial_images(trials, out, cfg.workers);
  return trials.size();
}

std::size_t score_t2i_annotations(const fs::path& run_dir) {
  auto tasks = load_annotation_tasks(run_dir / "annotation_tasks.jsonl");
  std::vector<ScoreRecord> scores;
  if (!tasks.empty()) {
    scores = score_annotations(read_trials(run_dir / "trials.jsonl"), tasks, load_annotations(run_dir / "annotations.jsonl"));
  }
  write_file_atomic(run_dir / "t2i_scores.jsonl", to_jsonl(scores));
  return scores.size();
}

json build_manifest(const RunConfig& cfg, const RunSummary& summary) {
  json models = json::array();
  for (const auto& m : cfg.models) {
    json entry{{"id", m.id}, {"kind", to_string(m.kind)}};
    if (m.kind == ModelKind::Synthetic) {
      entry["observer"] = observer_json(m.observer);
    } else {
      entry["endpoint"] = m.endpoint.url;
      entry["provider"] = to_string(m.endpoint.provider);
    }
    models.push_back(entry);
  }
  json tasks = json::array();
  if (cfg.search) tasks.push_back("search");
  if (cfg.count) tasks.push_back("count");
  if (cfg.describe) tasks.push_back("describe");
  if (cfg.rmts) tasks.push_back("rmts");
  if (cfg.t2i_count) tasks.push_back("t2i-count");
  if (cfg.t2i_describe) tasks.push_back("t2i-describe");

  json artifacts = json::object();
  for (const char* name : {"trials.jsonl", "scores.jsonl", "t2i_scores.jsonl", "annotation_tasks.jsonl"}) {
    std::string sha = sha_of_file(summary.dir / name);
    if (!sha.empty()) artifacts[name] = sha;
  }
  return json{{"bindbench_version", kBindbenchVersion},
              {"seed", cfg.seed},
              {"config_sha256", sha256_hex(cfg.source_text)},
              {"palette_sha256", sha256_hex(embedded::palette_json())},
              {"synonyms_version", SynonymTable::builtin().version()},
              {"glyphs_sha256", sha256_hex(glyph_catalog_json())},
              {"models", models},
              {"tasks", tasks},
              {"counts",
               {{"trials", summary.trials},
                {"work_items", summary.work_items},
                {"failures", summary.failures},
                {"annotation_tasks", summary.annotation_tasks},
                {"t2i_scores", summary.t2i_scores}}},
              {"artifacts", artifacts}};
}

RunSummary run(const RunConfig& cfg) {
  cfg.validate();
  RunSummary summary;
  summary.dir = cfg.out;
  const fs::path& dir = cfg.out;
  fs::create_directories(dir);
  if (std::size_t n = remove_temporaries(dir)) spdlog::info("removed {} stale temporary files", n);
  if (!cfg.source_text.empty()) write_file_atomic(dir / "config.toml", cfg.source_text);

  auto trials = build_trials(cfg);
  summary.trials = trials.size();
  const std::string trials_text = to_jsonl(trials);
  std::error_code ec;
  // Images are a pure function of the trials, so an unchanged trial list keeps the ones on disk.
  const bool unchanged = fs::exists(dir / "trials.jsonl", ec) && read_file(dir / "trials.jsonl") == trials_text;
  write_file_atomic(dir / "trials.jsonl", trials_text);
  if (cfg.render_images) {
    std::vector<TrialRecord> missing;
    for (const auto& t : trials) {
      bool have = unchanged && std::all_of(t.images.begin(), t.images.end(), [&](const auto& rel) { return fs::exists(dir / rel, ec); });
      if (!have) missing.push_back(t);
    }
    std::size_t n = render_trial_images(missing, dir, cfg.workers);
    spdlog::info("rendered {} images", n);
  }

  std::vector<WorkItem> items;
  for (const auto& m : cfg.models) {
    for (const auto& t : trials) {
      if (m.accepts(t.task)) items.push_back({&m, &t});
    }
  }
  summary.work_items = items.size();
  spdlog::info("{} trials, {} work items, {} workers", trials.size(), items.size(), cfg.workers);

  Runner runner(cfg, dir);
  std::vector<ItemResult> results(items.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> finished{0};
  auto work = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= items.size()) return;
      results[i] = runner.process(items[i]);
      std::size_t done = finished.fetch_add(1) + 1;
      if (done % 1000 == 0 || done == items.size()) spdlog::debug("{}/{} work items done", done, items.size());
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < cfg.workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  // Single writer per output stream, in work-item order.
  std::map<std::string, std::string> transcripts;
  for (const auto& m : cfg.models) transcripts[m.id];
  std::string scores;
  std::string failures;
  std::vector<AnnotationTask> annotation_tasks;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& r = results[i];
    summary.cache_hits += r.cache_hit;
    if (r.transcript) transcripts[items[i].model->id] += to_jsonl_line(json(*r.transcript));
    for (const auto& s : r.scores) scores += to_jsonl_line(json(s));
    if (r.annotation) annotation_tasks.push_back(*r.annotation);
    if (r.failure) {
      ++summary.failures;
      failures += to_jsonl_line(json{{"trial_id", items[i].trial->id},
                                     {"model", items[i].model->id},
                                     {"code", to_string(r.failure->code)},
                                     {"detail", r.failure->detail}});
    }
  }
  for (const auto& [model, text] : transcripts) write_file_atomic(dir / "transcripts" / (model + ".jsonl"), text);
  write_file_atomic(dir / "scores.jsonl", scores);
  write_file_atomic(dir / "failures.jsonl", failures);
  if (cfg.t2i_count || cfg.t2i_describe) {
    write_file_atomic(dir / "annotation_tasks.jsonl", to_jsonl(annotation_tasks));
    summary.annotation_tasks = annotation_tasks.size();
    summary.t2i_scores = score_t2i_annotations(dir);
  }
  if (summary.failures) spdlog::warn("{} work items failed; see failures.jsonl", summary.failures);

  try {
    write_report(dir, cfg.filters);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptyRun) throw;
    spdlog::warn("no scores to report yet");
  }
  write_file_atomic(dir / "manifest.json", build_manifest(cfg, summary).dump(2) + "\n");
  spdlog::info("run complete: {} work items, {} from cache, {} failed", summary.work_items, summary.cache_hits,
               summary.failures);
  return summary;
}

}  // namespace bindbench

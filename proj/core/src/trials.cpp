#include "bindbench/trials.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <thread>

#include "bindbench/adapters.hpp"
#include "bindbench/catalog.hpp"
#include "bindbench/prompts.hpp"
#include "bindbench/render.hpp"
#include "bindbench/rng.hpp"
#include "bindbench/stimulus.hpp"

namespace bindbench {
namespace fs = std::filesystem;

namespace {

std::string search_variant(SearchCondition cond) {
  switch (cond) {
    case SearchCondition::Disjunctive: return "2d_disjunctive";
    case SearchCondition::Conjunctive: return "2d_conjunctive";
    case SearchCondition::DisjunctiveControl: return "2d_disjunctive_variable_color";
  }
  return "2d_disjunctive";
}

std::string replicate_label(int r) { return fmt::format("{:03}", r); }

std::string image_path(const std::string& stem) { return "images/" + stem + ".png"; }

// Resamples a description scene a few times before giving up on an unreachable target.
template <class F>
auto with_resampling(std::uint64_t seed, F&& make) {
  constexpr int kResamples = 5;
  for (int attempt = 0;; ++attempt) {
    try {
      return make(attempt == 0 ? seed : derive_seed(seed, fmt::format("resample/{}", attempt)));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TargetUnreachable || attempt + 1 >= kResamples) throw;
    }
  }
}

const char* kPairNames[3] = {"source", "target1", "target2"};
const char* kPairPrompt[3] = {"source", "target #1", "target #2"};
const char* kUnifiedLoc[3] = {"top", "bottom left", "bottom right"};
const char* kDecomposedLoc[3] = {"first", "second", "third"};

}  // namespace

std::vector<TrialRecord> build_search_trials(const SearchTaskConfig& cfg, std::uint64_t master_seed) {
  std::vector<TrialRecord> out;
  for (SearchCondition cond : cfg.conditions) {
    const std::string variant = search_variant(cond);
    const std::string prompt = build_prompt("visual_search", variant, {});
    for (int d : cfg.distractors) {
      const std::string cell = fmt::format("search-{}-d{:02}", to_string(cond), d);
      auto scenes = gen_search_batch(cond, d, cfg.trials_per_cell, derive_seed(master_seed, cell));
      for (int r = 0; r < cfg.trials_per_cell; ++r) {
        TrialRecord t;
        t.id = fmt::format("{}-r{}", cell, replicate_label(r));
        t.task = TaskKind::Search;
        t.variant = variant;
        t.prompt = prompt;
        bool present = std::get<BoolAnswer>(scenes[r].expected).value;
        // The control prompt asks whether every shape has the same color.
        t.expected = BoolAnswer{cond == SearchCondition::DisjunctiveControl ? !present : present};
        t.scenes.push_back(std::move(scenes[r]));
        t.images = {image_path(t.id)};
        t.conditions = {{"condition", std::string(to_string(cond))},
                        {"distractors", std::to_string(d)},
                        {"present", present ? "true" : "false"},
                        {"replicate", replicate_label(r)}};
        out.push_back(std::move(t));
      }
    }
  }
  return out;
}

std::vector<TrialRecord> build_count_trials(const CountTaskConfig& cfg, std::uint64_t master_seed) {
  std::vector<TrialRecord> out;
  const std::string prompt = build_prompt("numerical_estimation", "2d_vlm", {});
  for (EntropyCondition cond : cfg.conditions) {
    for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
      for (int r = 0; r < cfg.trials_per_cell; ++r) {
        TrialRecord t;
        t.id = fmt::format("count-{}-n{:02}-r{}", to_string(cond), n, replicate_label(r));
        t.task = TaskKind::Count;
        t.variant = "2d_vlm";
        t.prompt = prompt;
        t.scenes.push_back(gen_numerosity_trial(cond, n, derive_seed(master_seed, t.id)));
        t.expected = t.scenes.front().expected;
        t.images = {image_path(t.id)};
        t.conditions = {{"condition", std::string(to_string(cond))},
                        {"n", std::to_string(n)},
                        {"replicate", replicate_label(r)}};
        out.push_back(std::move(t));
      }
    }
  }
  return out;
}

std::vector<TrialRecord> build_describe_trials(const DescribeTaskConfig& cfg, std::uint64_t master_seed) {
  std::vector<TrialRecord> out;
  const std::string prompt = build_prompt("scene_description", "2d_vlm", {});
  for (TripletCount target : cfg.triplet_targets) {
    for (int r = 0; r < cfg.trials_per_target; ++r) {
      TrialRecord t;
      t.id = fmt::format("describe-t{:02}-r{}", target, replicate_label(r));
      t.task = TaskKind::Describe;
      t.variant = "2d_vlm";
      t.prompt = prompt;
      std::uint64_t seed = derive_seed(master_seed, t.id);
      int n = Rng(derive_seed(seed, "n")).uniform_int(cfg.n_min, cfg.n_max);
      t.scenes.push_back(with_resampling(
          seed, [&](std::uint64_t s) { return gen_scene_description_trial(n, target, s, cfg.attempt_budget); }));
      t.expected = t.scenes.front().expected;
      t.images = {image_path(t.id)};
      t.conditions = {{"triplets", std::to_string(target)},
                      {"n_objects", std::to_string(n)},
                      {"replicate", replicate_label(r)}};
      out.push_back(std::move(t));
    }
  }
  return out;
}

std::vector<TrialRecord> build_rmts_trials(const RmtsTaskConfig& cfg, std::uint64_t master_seed) {
  std::vector<TrialRecord> out;
  for (int i = 0; i < cfg.trials; ++i) {
    const std::string index = fmt::format("{:04}", i);
    const std::string base = "rmts-" + index;
    const RmtsTrial rt = gen_rmts_trial(derive_seed(master_seed, base));
    const ObjectPair* pairs[3] = {&rt.source, &rt.target1, &rt.target2};

    // Probe choices are shared by both presentation modes.
    Rng probes(derive_seed(master_seed, base + "/probes"));
    const int rel_pair = static_cast<int>(probes.below(3));
    const FeatureDim rel_dim = probes.bernoulli(0.5) ? FeatureDim::Color : FeatureDim::Shape;
    const int sf_pair = static_cast<int>(probes.below(3));
    const FeatureDim sf_dim = probes.bernoulli(0.5) ? FeatureDim::Color : FeatureDim::Shape;
    const int sf_object = probes.bernoulli(0.5) ? 1 : 2;

    for (RmtsMode mode : cfg.modes) {
      const std::string ms(to_string(mode));
      const bool unified = mode == RmtsMode::Unified;
      std::vector<std::string> images;
      if (unified) {
        images = {image_path(base + "-unified")};
      } else {
        for (int k = 1; k <= 3; ++k) images.push_back(image_path(fmt::format("{}-decomposed_{}", base, k)));
      }
      const auto scenes = rmts_scenes(rt, mode);

      auto make = [&](const std::string& probe, const std::string& variant, const Bindings& bindings, Answer expected,
                      std::map<std::string, std::string> extra) {
        TrialRecord t;
        t.id = fmt::format("{}-{}-{}", base, ms, probe);
        t.task = TaskKind::Rmts;
        t.variant = variant;
        t.prompt = build_prompt("rmts", variant, bindings);
        t.scenes = scenes;
        t.rmts = rt;
        t.images = images;
        t.expected = std::move(expected);
        t.conditions = std::move(extra);
        t.conditions["mode"] = ms;
        t.conditions["probe"] = probe;
        t.conditions["trial"] = index;
        t.conditions["replicate"] = index + "/" + probe;
        out.push_back(std::move(t));
      };

      make("analogy", "full_" + ms, {}, ChoiceAnswer{rt.correct}, {});

      {
        const ObjectPair& p = *pairs[rel_pair];
        const std::string dim(to_string(rel_dim));
        make("relation", "relation_" + ms,
             {{"pair", kPairPrompt[rel_pair]},
              {"pair_loc", unified ? kUnifiedLoc[rel_pair] : kDecomposedLoc[rel_pair]},
              {"relation", dim}},
             BoolAnswer{p.first.feature(rel_dim) == p.second.feature(rel_dim)},
             {{"pair", kPairNames[rel_pair]}, {"relation", dim}});
      }
      {
        const ObjectPair& p = *pairs[sf_pair];
        const ObjectDesc& o = sf_object == 1 ? p.first : p.second;
        const std::string dim(to_string(sf_dim));
        make("single_feature", "single_feature_" + ms,
             {{"feature", dim},
              {"object_loc", sf_object == 1 ? "left-most" : "right-most"},
              {"object_ind", sf_object == 1 ? "object1" : "object2"},
              {"pair", kPairPrompt[sf_pair]}},
             FeatureAnswer{sf_dim, o.feature(sf_dim)},
             {{"pair", kPairNames[sf_pair]}, {"feature", dim}, {"object", std::to_string(sf_object)}});
      }
      {
        ObjectList all;
        for (const ObjectPair* p : pairs) {
          all.push_back(p->first);
          all.push_back(p->second);
        }
        make("full_feature", "all_feature_" + ms, {}, ObjectListAnswer{all}, {});
      }
    }
  }
  return out;
}

std::vector<TrialRecord> build_t2i_count_trials(const T2ICountTaskConfig& cfg, std::uint64_t /*master_seed*/) {
  std::vector<catalog::CountCategory> categories;
  for (const auto& c : catalog::t2i_count_categories()) {
    if (cfg.categories.empty() || std::find(cfg.categories.begin(), cfg.categories.end(), c.plural) != cfg.categories.end())
      categories.push_back(c);
  }
  std::vector<TrialRecord> out;
  for (const auto& c : categories) {
    std::string slug = c.plural;
    std::replace(slug.begin(), slug.end(), ' ', '-');
    for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
      for (int r = 0; r < cfg.trials_per_cell; ++r) {
        TrialRecord t;
        t.id = fmt::format("t2i-count-{}-n{:02}-r{}", slug, n, replicate_label(r));
        t.task = TaskKind::T2ICount;
        t.variant = "t2i";
        t.prompt = build_prompt("numerical_estimation", "t2i", {{"n", std::to_string(n)}, {"object_name", c.plural}});
        t.expected = IntAnswer{n};
        t.conditions = {{"category", c.plural}, {"kind", c.kind}, {"n", std::to_string(n)}, {"replicate", replicate_label(r)}};
        out.push_back(std::move(t));
      }
    }
  }
  return out;
}

std::vector<TrialRecord> build_t2i_describe_trials(const T2IDescribeTaskConfig& cfg, std::uint64_t master_seed) {
  std::vector<TrialRecord> out;
  for (TripletCount target : cfg.triplet_targets) {
    for (int r = 0; r < cfg.trials_per_target; ++r) {
      TrialRecord t;
      t.id = fmt::format("t2i-describe-t{:02}-r{}", target, replicate_label(r));
      t.task = TaskKind::T2IDescribe;
      t.variant = "t2i";
      std::uint64_t seed = derive_seed(master_seed, t.id);
      int n = Rng(derive_seed(seed, "n")).uniform_int(cfg.n_min, cfg.n_max);
      ObjectList objects = with_resampling(seed, [&](std::uint64_t s) {
        Rng rng(derive_seed(s, "features"));
        return triplet_targeted_objects(n, target, catalog::t2i_scene_objects(), catalog::t2i_scene_colors(), rng,
                                        cfg.attempt_budget);
      });
      t.prompt = build_prompt("scene_description", "t2i", {{"objects_string", objects_string(objects)}});
      t.expected = ObjectListAnswer{std::move(objects)};
      t.conditions = {{"triplets", std::to_string(target)},
                      {"n_objects", std::to_string(n)},
                      {"replicate", replicate_label(r)}};
      out.push_back(std::move(t));
    }
  }
  return out;
}

std::vector<TrialRecord> build_trials(const RunConfig& cfg, std::optional<TaskKind> only) {
  std::vector<TrialRecord> out;
  auto want = [&](TaskKind k) { return !only || *only == k; };
  auto append = [&](std::vector<TrialRecord> more) {
    out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  };
  if (cfg.search && want(TaskKind::Search)) append(build_search_trials(*cfg.search, cfg.seed));
  if (cfg.count && want(TaskKind::Count)) append(build_count_trials(*cfg.count, cfg.seed));
  if (cfg.describe && want(TaskKind::Describe)) append(build_describe_trials(*cfg.describe, cfg.seed));
  if (cfg.rmts && want(TaskKind::Rmts)) append(build_rmts_trials(*cfg.rmts, cfg.seed));
  if (cfg.t2i_count && want(TaskKind::T2ICount)) append(build_t2i_count_trials(*cfg.t2i_count, cfg.seed));
  if (cfg.t2i_describe && want(TaskKind::T2IDescribe)) append(build_t2i_describe_trials(*cfg.t2i_describe, cfg.seed));
  return out;
}

std::uint64_t observer_seed(const TrialRecord& trial, std::uint64_t master_seed) {
  auto it = trial.conditions.find("replicate");
  std::string replicate = it == trial.conditions.end() ? trial.id : it->second;
  return derive_seed(master_seed, fmt::format("observer/{}/{}", to_string(trial.task), replicate));
}

AnswerKind expected_kind(const TrialRecord& trial) { return kind_of(trial.expected); }

bool uses_rmts_features(const TrialRecord& trial) {
  return trial.task == TaskKind::Rmts && trial.variant.rfind("all_feature", 0) == 0;
}

namespace {

std::vector<std::string> render_in_memory(const TrialRecord& trial) {
  if (trial.rmts) {
    auto mode = rmts_mode_from_string(trial.conditions.at("mode"));
    return render_rmts(*trial.rmts, mode);
  }
  std::vector<std::string> out;
  for (const auto& scene : trial.scenes) out.push_back(render_scene(scene));
  return out;
}

}  // namespace

std::size_t render_trial_images(const std::vector<TrialRecord>& trials, const fs::path& run_dir, int workers) {
  // One job per distinct image set; RMTS probes share their trial's images.
  std::vector<const TrialRecord*> jobs;
  std::map<std::string, bool> seen;
  for (const auto& t : trials) {
    if (t.images.empty()) continue;
    if (seen.emplace(t.images.front(), true).second) jobs.push_back(&t);
  }
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> written{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto work = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        const TrialRecord& t = *jobs[i];
        auto pngs = render_in_memory(t);
        if (pngs.size() != t.images.size())
          throw Error(ErrorCode::PreconditionViolated, "trial " + t.id + ": image count mismatch");
        for (std::size_t k = 0; k < pngs.size(); ++k) {
          write_file_atomic(run_dir / t.images[k], pngs[k]);
          written.fetch_add(1);
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(jobs.size());
      }
    }
  };
  int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n_threads; ++i) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return written.load();
}

std::vector<std::string> trial_images(const TrialRecord& trial, const fs::path& run_dir) {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& rel : trial.images) {
    if (!fs::exists(run_dir / rel, ec)) return render_in_memory(trial);
    out.push_back(read_file(run_dir / rel));
  }
  return out;
}

}  // namespace bindbench

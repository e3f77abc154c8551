#include "bindbench/annotation.hpp"

#include <httplib.h>
#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <fmt/format.h>
#include <mutex>
#include <set>
#include <spdlog/spdlog.h>

#include "bindbench/adapters.hpp"
#include "bindbench/json_io.hpp"
#include "bindbench/scoring.hpp"

namespace bindbench {
namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(AnnotationKind kind) { return kind == AnnotationKind::Count ? "count" : "match"; }

AnnotationKind annotation_kind_from_string(std::string_view text) {
  if (text == "count") return AnnotationKind::Count;
  if (text == "match") return AnnotationKind::Match;
  throw Error(ErrorCode::UnknownIdentifier, "annotation kind '" + std::string(text) + "'");
}

void to_json(json& j, const AnnotationTask& t) {
  j = json{{"task_id", t.task_id}, {"trial_id", t.trial_id}, {"model", t.model},
           {"image", t.image},     {"kind", to_string(t.kind)}, {"labels", t.labels}};
}

void from_json(const json& j, AnnotationTask& t) {
  j.at("task_id").get_to(t.task_id);
  j.at("trial_id").get_to(t.trial_id);
  j.at("model").get_to(t.model);
  j.at("image").get_to(t.image);
  t.kind = annotation_kind_from_string(j.at("kind").get<std::string>());
  t.labels = j.value("labels", std::vector<std::string>{});
}

void to_json(json& j, const AnnotationRecord& r) {
  j = json{{"task_id", r.task_id}, {"annotator", r.annotator}, {"timestamp", r.timestamp}};
  if (r.count) j["count"] = *r.count;
  if (!r.labels.empty()) j["labels"] = r.labels;
  if (!r.labels.empty() || !r.extraneous.empty()) j["extraneous"] = r.extraneous;
}

void from_json(const json& j, AnnotationRecord& r) {
  j.at("task_id").get_to(r.task_id);
  j.at("annotator").get_to(r.annotator);
  r.count.reset();
  if (j.contains("count") && !j.at("count").is_null()) {
    if (!j.at("count").is_number_integer()) throw Error(ErrorCode::MalformedJSON, "count must be an integer");
    r.count = j.at("count").get<long long>();
  }
  r.labels = j.value("labels", std::map<std::string, bool>{});
  r.extraneous = j.value("extraneous", std::vector<std::string>{});
  r.timestamp = j.value("timestamp", std::string{});
}

std::vector<std::string> match_labels(const ObjectList& objects) {
  std::map<ObjectDesc, int> total;
  for (const auto& o : objects) ++total[o];
  std::map<ObjectDesc, int> seen;
  std::vector<std::string> out;
  for (const auto& o : objects) {
    std::string label = o.color + " " + o.shape;
    if (total[o] > 1) label += fmt::format(" #{}", ++seen[o]);
    out.push_back(std::move(label));
  }
  return out;
}

AnnotationTask make_annotation_task(const TrialRecord& trial, const std::string& model, const std::string& image_hash) {
  AnnotationTask t;
  t.task_id = model + ":" + trial.id;
  t.trial_id = trial.id;
  t.model = model;
  t.image = image_hash;
  if (trial.task == TaskKind::T2ICount) {
    t.kind = AnnotationKind::Count;
  } else if (trial.task == TaskKind::T2IDescribe) {
    t.kind = AnnotationKind::Match;
    t.labels = match_labels(std::get<ObjectListAnswer>(trial.expected).objects);
  } else {
    throw Error(ErrorCode::PreconditionViolated, "trial " + trial.id + " is not a text-to-image trial");
  }
  return t;
}

std::optional<std::string> validate_annotation(const AnnotationRecord& record, const AnnotationTask& task) {
  if (record.task_id != task.task_id) return "record is for a different task";
  if (record.annotator.empty()) return "annotator id is empty";
  if (task.kind == AnnotationKind::Count) {
    if (!record.count) return "count task needs an integer count";
    if (*record.count < 0) return "count must be non-negative";
    if (!record.labels.empty() || !record.extraneous.empty()) return "count task takes no labels";
    return std::nullopt;
  }
  if (record.count) return "match task takes no count";
  for (const auto& label : task.labels) {
    if (!record.labels.count(label)) return "label '" + label + "' is not marked present or absent";
  }
  if (record.labels.size() != task.labels.size()) return "record marks labels the task does not list";
  for (const auto& e : record.extraneous) {
    if (e.find_first_not_of(" \t") == std::string::npos) return "extraneous entries must be non-empty";
  }
  return std::nullopt;
}

namespace {

template <class T>
std::vector<T> load_jsonl(const fs::path& path) {
  std::vector<T> out;
  std::error_code ec;
  if (!fs::exists(path, ec)) return out;
  for (const auto& j : parse_jsonl(read_file(path))) out.push_back(j.get<T>());
  return out;
}

// Most frequent value; nullopt on a tie for first place.
template <class T>
std::optional<T> majority(const std::vector<T>& values) {
  std::map<T, int> tally;
  for (const auto& v : values) ++tally[v];
  std::optional<T> best;
  int best_n = 0;
  bool tied = false;
  for (const auto& [v, n] : tally) {
    if (n > best_n) {
      best = v;
      best_n = n;
      tied = false;
    } else if (n == best_n) {
      tied = true;
    }
  }
  if (tied) return std::nullopt;
  return best;
}

}  // namespace

std::vector<AnnotationTask> load_annotation_tasks(const fs::path& path) { return load_jsonl<AnnotationTask>(path); }

std::vector<AnnotationRecord> load_annotations(const fs::path& path) { return load_jsonl<AnnotationRecord>(path); }

std::vector<ScoreRecord> score_annotations(const std::vector<TrialRecord>& trials, const std::vector<AnnotationTask>& tasks,
                                           const std::vector<AnnotationRecord>& records) {
  std::map<std::string, const TrialRecord*> by_id;
  for (const auto& t : trials) by_id[t.id] = &t;
  std::map<std::string, std::vector<const AnnotationRecord*>> by_task;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& r : records) {
    // Later duplicates of a (task, annotator) pair never reach the log through the server; ignore them here too.
    if (seen.emplace(r.task_id, r.annotator).second) by_task[r.task_id].push_back(&r);
  }

  std::vector<ScoreRecord> out;
  for (const auto& task : tasks) {
    auto rit = by_task.find(task.task_id);
    auto tit = by_id.find(task.trial_id);
    if (rit == by_task.end() || tit == by_id.end()) continue;
    const TrialRecord& trial = *tit->second;
    const auto& recs = rit->second;
    const std::map<std::string, std::string> extra{{"model", task.model}, {"annotators", std::to_string(recs.size())}};

    if (task.kind == AnnotationKind::Count) {
      std::vector<long long> counts;
      for (const auto* r : recs) {
        if (r->count) counts.push_back(*r->count);
      }
      auto m = majority(counts);
      if (!m) {
        spdlog::warn("annotation task {} has tied counts; excluded", task.task_id);
        continue;
      }
      auto scored = score_trial(trial, Outcome<Answer>(Answer{IntAnswer{*m}}), extra);
      out.insert(out.end(), scored.begin(), scored.end());
      continue;
    }

    long long deletes = 0;
    bool ambiguous = false;
    for (const auto& label : task.labels) {
      int present = 0;
      for (const auto* r : recs) {
        auto it = r->labels.find(label);
        present += it != r->labels.end() && it->second;
      }
      int absent = static_cast<int>(recs.size()) - present;
      if (present == absent) ambiguous = true;
      deletes += absent > present;
    }
    std::vector<long long> insert_counts;
    for (const auto* r : recs) insert_counts.push_back(static_cast<long long>(r->extraneous.size()));
    auto inserts = majority(insert_counts);
    if (ambiguous || !inserts) {
      spdlog::warn("annotation task {} has tied judgements; excluded", task.task_id);
      continue;
    }
    std::map<std::string, std::string> keys = trial.conditions;
    keys["task"] = std::string(to_string(trial.task));
    keys["variant"] = trial.variant;
    for (const auto& [k, v] : extra) keys[k] = v;
    auto emit = [&](const char* name, double value) { out.push_back({trial.id, name, value, keys}); };
    const double distance = static_cast<double>(deletes + *inserts);
    emit(metric::kParseFailed, 0);
    emit(metric::kCorrect, distance == 0 ? 1.0 : 0.0);
    emit(metric::kEditDistance, distance);
    emit(metric::kIllusoryConjunctions, 0);
    emit(metric::kInserts, static_cast<double>(*inserts));
    emit(metric::kDeletes, static_cast<double>(deletes));
  }
  return out;
}

struct AnnotationServer::Impl {
  fs::path run_dir;
  AnnotationServerOptions options;
  httplib::Server server;
  std::mutex mutex;
  std::vector<AnnotationTask> tasks;
  std::map<std::string, std::size_t> task_index;
  std::set<std::pair<std::string, std::string>> done;  // (task, annotator)
  std::map<std::string, int> per_task;
  long records = 0;

  fs::path log_path() const { return run_dir / "annotations.jsonl"; }

  void load() {
    tasks = load_annotation_tasks(run_dir / "annotation_tasks.jsonl");
    for (std::size_t i = 0; i < tasks.size(); ++i) task_index[tasks[i].task_id] = i;
    for (const auto& r : load_annotations(log_path())) {
      if (done.emplace(r.task_id, r.annotator).second) {
        ++per_task[r.task_id];
        ++records;
      }
    }
  }

  int completed_tasks() const {
    int n = 0;
    for (const auto& t : tasks) {
      auto it = per_task.find(t.task_id);
      n += it != per_task.end() && it->second >= options.annotators_per_image;
    }
    return n;
  }

  void append(const AnnotationRecord& r) {
    std::string line = to_jsonl_line(json(r));
    int fd = ::open(log_path().c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (fd < 0) throw Error(ErrorCode::IoError, "cannot open " + log_path().string());
    // One write per record keeps concurrent appends whole.
    ssize_t n = ::write(fd, line.data(), line.size());
    ::fsync(fd);
    ::close(fd);
    if (n != static_cast<ssize_t>(line.size())) throw Error(ErrorCode::IoError, "short write to annotations.jsonl");
  }

  static void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json; charset=utf-8");
  }

  void routes() {
    server.Get("/api/tasks/next", [this](const httplib::Request& req, httplib::Response& res) {
      std::string annotator = req.get_param_value("annotator");
      if (annotator.empty()) return reply(res, 400, {{"error", "annotator parameter is required"}});
      std::lock_guard lock(mutex);
      for (const auto& t : tasks) {
        if (done.count({t.task_id, annotator})) continue;
        if (per_task[t.task_id] >= options.annotators_per_image) continue;
        json j = t;
        j["image_url"] = "/images/" + t.image + ".png";
        j["instructions"] = options.instructions;
        j["done"] = false;
        return reply(res, 200, j);
      }
      reply(res, 200, {{"done", true}});
    });

    server.Get(R"(/images/([0-9a-f]{64})\.png)", [this](const httplib::Request& req, httplib::Response& res) {
      fs::path p = run_dir / "images" / "generated" / (std::string(req.matches[1]) + ".png");
      std::error_code ec;
      if (!fs::exists(p, ec)) return reply(res, 404, {{"error", "no such image"}});
      res.set_content(read_file(p), "image/png");
    });

    server.Post("/api/annotations", [this](const httplib::Request& req, httplib::Response& res) {
      json body = json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.is_object()) return reply(res, 400, {{"error", "body must be a JSON object"}});
      AnnotationRecord record;
      try {
        record = body.get<AnnotationRecord>();
      } catch (const std::exception& e) {
        return reply(res, 400, {{"error", std::string("malformed record: ") + e.what()}});
      }
      std::lock_guard lock(mutex);
      auto it = task_index.find(record.task_id);
      if (it == task_index.end()) return reply(res, 400, {{"error", "unknown task '" + record.task_id + "'"}});
      if (auto problem = validate_annotation(record, tasks[it->second])) return reply(res, 400, {{"error", *problem}});
      if (done.count({record.task_id, record.annotator}))
        return reply(res, 409, {{"error", "task already annotated by this annotator"}});
      record.timestamp = utc_timestamp();
      try {
        append(record);
      } catch (const Error& e) {
        return reply(res, 500, {{"error", e.what()}});
      }
      done.emplace(record.task_id, record.annotator);
      ++per_task[record.task_id];
      ++records;
      reply(res, 200, {{"ok", true}, {"task_id", record.task_id}});
    });

    server.Get("/api/progress", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mutex);
      json j{{"total_tasks", tasks.size()},
             {"completed_tasks", completed_tasks()},
             {"records", records},
             {"annotators_per_image", options.annotators_per_image}};
      std::string annotator = req.get_param_value("annotator");
      if (!annotator.empty()) {
        long mine = 0;
        for (const auto& t : tasks) mine += done.count({t.task_id, annotator});
        j["annotator"] = annotator;
        j["annotator_records"] = mine;
      }
      reply(res, 200, j);
    });

    if (options.ui_dir && !server.set_mount_point("/", options.ui_dir->string())) {
      throw Error(ErrorCode::IoError, "cannot serve UI from " + options.ui_dir->string());
    }
  }
};

AnnotationServer::AnnotationServer(fs::path run_dir, AnnotationServerOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->run_dir = std::move(run_dir);
  impl_->options = std::move(options);
  if (impl_->options.annotators_per_image < 1) throw Error(ErrorCode::ConfigError, "annotators_per_image must be >= 1");
  impl_->load();
  impl_->routes();
}

AnnotationServer::~AnnotationServer() { stop(); }

int AnnotationServer::bind(const std::string& host, int port) {
  int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(ErrorCode::IoError, fmt::format("cannot bind {}:{}", host, port));
  return bound;
}

void AnnotationServer::listen() { impl_->server.listen_after_bind(); }

void AnnotationServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace bindbench

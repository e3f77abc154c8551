#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "bindbench/domain.hpp"

namespace bindbench {

enum class AnnotationKind { Count, Match };

std::string_view to_string(AnnotationKind kind);
AnnotationKind annotation_kind_from_string(std::string_view text);

// One generated image awaiting human judgement.
struct AnnotationTask {
  std::string task_id;   // "<model>:<trial id>"
  std::string trial_id;
  std::string model;
  std::string image;     // sha256 of the PNG; served at /images/<image>.png
  AnnotationKind kind = AnnotationKind::Count;
  std::vector<std::string> labels;  // Match: one label per prompted object

  friend bool operator==(const AnnotationTask&, const AnnotationTask&) = default;
};

struct AnnotationRecord {
  std::string task_id;
  std::string annotator;
  std::optional<long long> count;         // Count
  std::map<std::string, bool> labels;     // Match: label -> present
  std::vector<std::string> extraneous;    // Match: objects drawn but not prompted
  std::string timestamp;

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

void to_json(nlohmann::json& j, const AnnotationTask& t);
void from_json(const nlohmann::json& j, AnnotationTask& t);
void to_json(nlohmann::json& j, const AnnotationRecord& r);
void from_json(const nlohmann::json& j, AnnotationRecord& r);

// "red cube" per prompted object; repeated objects are numbered "red cube #1", "red cube #2".
std::vector<std::string> match_labels(const ObjectList& objects);

AnnotationTask make_annotation_task(const TrialRecord& trial, const std::string& model, const std::string& image_hash);

// Empty when the record is acceptable for the task, else the reason it is not.
std::optional<std::string> validate_annotation(const AnnotationRecord& record, const AnnotationTask& task);

std::vector<AnnotationTask> load_annotation_tasks(const std::filesystem::path& path);
// Missing file reads as no records.
std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path);

// Scores text-to-image trials from human annotations. Count trials use the majority count and Match
// trials the per-label majority; ties make a trial ambiguous and it is skipped.
std::vector<ScoreRecord> score_annotations(const std::vector<TrialRecord>& trials,
                                           const std::vector<AnnotationTask>& tasks,
                                           const std::vector<AnnotationRecord>& records);

struct AnnotationServerOptions {
  int annotators_per_image = 1;
  std::string instructions;
  std::optional<std::filesystem::path> ui_dir;  // static client mounted at /
};

// HTTP front end over <run>/annotation_tasks.jsonl that appends to <run>/annotations.jsonl.
class AnnotationServer {
 public:
  AnnotationServer(std::filesystem::path run_dir, AnnotationServerOptions options);
  ~AnnotationServer();
  AnnotationServer(const AnnotationServer&) = delete;
  AnnotationServer& operator=(const AnnotationServer&) = delete;

  // Binds to host:port (port 0 picks a free one) and returns the bound port. Throws IoError.
  int bind(const std::string& host, int port);
  // Serves until stop() is called.
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace bindbench

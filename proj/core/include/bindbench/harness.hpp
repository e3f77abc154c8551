#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bindbench/config.hpp"
#include "bindbench/domain.hpp"

namespace bindbench {

inline constexpr const char* kBindbenchVersion = "0.1.0";

struct RunSummary {
  std::filesystem::path dir;
  std::size_t trials = 0;
  std::size_t work_items = 0;
  std::size_t cache_hits = 0;
  std::size_t failures = 0;
  std::size_t annotation_tasks = 0;
  std::size_t t2i_scores = 0;
};

// Writes trials.jsonl and the trial images for one task (or all tasks) into `out`.
std::size_t generate(const RunConfig& cfg, std::optional<TaskKind> task, const std::filesystem::path& out);

// Generates, queries every model on every trial it accepts, scores, reports and writes the manifest.
// A rerun over the same directory replays answered trials from the transcript cache.
RunSummary run(const RunConfig& cfg);

// Rescores text-to-image trials from <run>/annotations.jsonl into <run>/t2i_scores.jsonl.
std::size_t score_t2i_annotations(const std::filesystem::path& run_dir);

// Deterministic manifest: config hash, seed, versions and artifact counts.
nlohmann::json build_manifest(const RunConfig& cfg, const RunSummary& summary);

}  // namespace bindbench

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bindbench/config.hpp"
#include "bindbench/domain.hpp"

namespace bindbench {

// Trial ids embed the cell they belong to ("search-conjunctive-d10-r003"). Stimulus seeds derive from the
// master seed and the cell or trial id, so each task can be regenerated independently of the others.
std::vector<TrialRecord> build_search_trials(const SearchTaskConfig& cfg, std::uint64_t master_seed);
std::vector<TrialRecord> build_count_trials(const CountTaskConfig& cfg, std::uint64_t master_seed);
std::vector<TrialRecord> build_describe_trials(const DescribeTaskConfig& cfg, std::uint64_t master_seed);
// Four probes (analogy, relation, single feature, full feature) per trial and mode.
std::vector<TrialRecord> build_rmts_trials(const RmtsTaskConfig& cfg, std::uint64_t master_seed);
std::vector<TrialRecord> build_t2i_count_trials(const T2ICountTaskConfig& cfg, std::uint64_t master_seed);
std::vector<TrialRecord> build_t2i_describe_trials(const T2IDescribeTaskConfig& cfg, std::uint64_t master_seed);

// Every configured task, or only `only`, in a fixed task order.
std::vector<TrialRecord> build_trials(const RunConfig& cfg, std::optional<TaskKind> only = std::nullopt);

// Seed handed to the synthetic observer. It depends on the replicate label but not on the condition,
// the object count or the RMTS mode, so observer noise is shared across the cells being compared.
std::uint64_t observer_seed(const TrialRecord& trial, std::uint64_t master_seed);

// The answer kind `trial.expected` holds.
AnswerKind expected_kind(const TrialRecord& trial);
// True when a response to this trial is parsed with the six-object RMTS format.
bool uses_rmts_features(const TrialRecord& trial);

// Renders every image referenced by `trials` under `run_dir` (paths in TrialRecord::images are
// relative to it). Existing files are overwritten atomically. Returns the number of files written.
std::size_t render_trial_images(const std::vector<TrialRecord>& trials, const std::filesystem::path& run_dir,
                                int workers = 1);

// The PNG bytes for a trial, rendering in memory when the file is absent.
std::vector<std::string> trial_images(const TrialRecord& trial, const std::filesystem::path& run_dir);

}  // namespace bindbench

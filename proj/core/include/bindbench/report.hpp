#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bindbench/domain.hpp"
#include "bindbench/scoring.hpp"

namespace bindbench {

// Artifacts written by write_report, relative to the run directory.
struct ReportFiles {
  std::vector<std::string> tables;
  std::vector<std::string> plots;
};

// The probe-by-mode accuracy table: rows Analogy, Relation decoding, Full feature decoding and
// Single feature decoding per model, columns Unified and Decomposed with Wilson intervals.
std::string rmts_table_csv(const std::vector<ScoreRecord>& records);

// Aggregates the run's scores.jsonl and t2i_scores.jsonl into aggregates/*.csv and plots/*.svg.
// Throws EmptyRun when there are no scores.
ReportFiles write_report(const std::filesystem::path& run_dir, const AggregateFilters& filters);

// Same, reading the filters from <run_dir>/config.toml when present.
ReportFiles write_report(const std::filesystem::path& run_dir);

}  // namespace bindbench

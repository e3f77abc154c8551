#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bindbench/domain.hpp"
#include "bindbench/error.hpp"

namespace bindbench {

// Minimum-cost perfect assignment on a square matrix: result[row] = column.
std::vector<int> solve_assignment(const std::vector<std::vector<long long>>& cost);

struct EditDistanceResult {
  int distance = 0;
  std::vector<std::pair<int, int>> matching;  // (truth index, prediction index)
  std::vector<int> inserts;                   // unmatched prediction indices
  std::vector<int> deletes;                   // unmatched truth indices
  int illusory_conjunctions = 0;
};

// Substitution costs the number of differing dimensions; an unmatched object on either side costs 1.
// Among optimal solutions, the one with the most matched pairs is returned.
EditDistanceResult score_edit_distance(const ObjectList& truth, const ObjectList& pred);

// Wrong predictions (inserted, or matched at cost >= 1) whose color and shape each occur in truth
// but whose conjunction is not left over on any truth object after exact matches are taken.
int classify_illusory_conjunctions(const ObjectList& truth, const ObjectList& pred, const EditDistanceResult& result);

// Metric names emitted per trial.
namespace metric {
inline constexpr const char* kCorrect = "correct";
inline constexpr const char* kSignedError = "signed_error";
inline constexpr const char* kAbsError = "abs_error";
inline constexpr const char* kEditDistance = "edit_distance";
inline constexpr const char* kIllusoryConjunctions = "illusory_conjunctions";
inline constexpr const char* kInserts = "inserts";
inline constexpr const char* kDeletes = "deletes";
inline constexpr const char* kParseFailed = "parse_failed";
inline constexpr const char* kQueryFailed = "query_failed";
}  // namespace metric

bool is_binary_metric(std::string_view name);

// Scores one response. `parsed` holds the failure when parsing failed; parse failures score as
// incorrect, or as deleting every truth object for descriptions. Throws KindMismatch.
std::vector<ScoreRecord> score_trial(const TrialRecord& trial, const Outcome<Answer>& parsed,
                                     const std::map<std::string, std::string>& extra_keys = {});

struct Interval {
  double lo = 0;
  double hi = 0;
};

// Wilson score interval. Throws DomainError unless 0 <= k <= n, n >= 1 and 0 < confidence < 1.
Interval wilson_interval(long long successes, long long trials, double confidence = 0.95);

// Standard error of the mean (sample standard deviation / sqrt(n)); 0 for n < 2.
double standard_error(const std::vector<double>& values);

struct AggregateFilters {
  // Triplet-count groups with fewer trials than this are dropped (0 disables).
  int min_trials_per_triplet_group = 20;
  // T2I description trials with more inserted objects than this are dropped (negative disables).
  int max_t2i_inserts = 3;
  std::string triplet_key = "triplets";
};

enum class IntervalKind { Wilson, Sem };

struct AggregateRow {
  std::vector<std::string> group;  // values of the group keys, in key order
  std::string metric;
  double mean = 0;
  double ci_lo = 0;
  double ci_hi = 0;
  double sem = 0;
  long long n = 0;
  IntervalKind interval = IntervalKind::Sem;
};

// Groups records by `keys` (and metric) after applying the filters. Rows are sorted by group, then metric.
std::vector<AggregateRow> aggregate(const std::vector<ScoreRecord>& records, const std::vector<std::string>& keys,
                                    const AggregateFilters& filters = {});

std::string aggregate_csv(const std::vector<AggregateRow>& rows, const std::vector<std::string>& keys);

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double slope_se = 0;
  double p_value = 1;  // two-sided, H0: slope = 0
  std::size_t n = 0;
};

// Ordinary least squares. Requires at least three points with distinct x.
LinearFit linear_regression(const std::vector<double>& x, const std::vector<double>& y);

double spearman_rho(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace bindbench

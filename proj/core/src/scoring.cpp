#include "bindbench/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <set>

namespace bindbench {

std::vector<int> solve_assignment(const std::vector<std::vector<long long>>& cost) {
  const int n = static_cast<int>(cost.size());
  if (n == 0) return {};
  const long long inf = std::numeric_limits<long long>::max() / 4;
  // Potentials and augmenting paths, 1-indexed; column 0 is the virtual start.
  std::vector<long long> u(n + 1, 0), v(n + 1, 0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<long long> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      long long delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        long long cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

namespace {

int differing(const ObjectDesc& a, const ObjectDesc& b) { return (a.color != b.color) + (a.shape != b.shape); }

}  // namespace

EditDistanceResult score_edit_distance(const ObjectList& truth, const ObjectList& pred) {
  const int m = static_cast<int>(truth.size());
  const int k = static_cast<int>(pred.size());
  const int n = m + k;
  // Costs are scaled so that, at equal edit distance, each real match is worth one unit more.
  const long long scale = n + 1;
  std::vector<std::vector<long long>> cost(n, std::vector<long long>(n, 0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      bool real_row = i < m, real_col = j < k;
      if (real_row && real_col) {
        cost[i][j] = differing(truth[i], pred[j]) * scale - 1;
      } else if (real_row || real_col) {
        cost[i][j] = scale;
      }
    }
  }
  auto assign = solve_assignment(cost);

  EditDistanceResult r;
  for (int i = 0; i < m; ++i) {
    int j = assign[i];
    if (j < k) {
      r.matching.emplace_back(i, j);
      r.distance += differing(truth[i], pred[j]);
    } else {
      r.deletes.push_back(i);
      r.distance += 1;
    }
  }
  for (int i = m; i < n; ++i) {
    if (assign[i] < k) {
      r.inserts.push_back(assign[i]);
      r.distance += 1;
    }
  }
  std::sort(r.inserts.begin(), r.inserts.end());
  r.illusory_conjunctions = classify_illusory_conjunctions(truth, pred, r);
  return r;
}

int classify_illusory_conjunctions(const ObjectList& truth, const ObjectList& pred, const EditDistanceResult& result) {
  std::set<std::string> colors, shapes;
  std::map<ObjectDesc, int> available;
  for (const auto& o : truth) {
    colors.insert(o.color);
    shapes.insert(o.shape);
    ++available[o];
  }
  std::vector<int> wrong;
  for (auto [ti, pi] : result.matching) {
    if (differing(truth[ti], pred[pi]) == 0) {
      --available[pred[pi]];
    } else {
      wrong.push_back(pi);
    }
  }
  wrong.insert(wrong.end(), result.inserts.begin(), result.inserts.end());
  std::sort(wrong.begin(), wrong.end());

  int count = 0;
  for (int pi : wrong) {
    const ObjectDesc& o = pred[pi];
    if (!colors.count(o.color) || !shapes.count(o.shape)) continue;
    auto it = available.find(o);
    if (it != available.end() && it->second > 0) {
      --it->second;
    } else {
      ++count;
    }
  }
  return count;
}

bool is_binary_metric(std::string_view name) {
  return name == metric::kCorrect || name == metric::kParseFailed || name == metric::kQueryFailed;
}

std::vector<ScoreRecord> score_trial(const TrialRecord& trial, const Outcome<Answer>& parsed,
                                     const std::map<std::string, std::string>& extra_keys) {
  if (parsed.ok() && kind_of(parsed.value()) != kind_of(trial.expected)) {
    throw Error(ErrorCode::KindMismatch, "trial " + trial.id + " expects " + std::string(to_string(kind_of(trial.expected))) +
                                             ", got " + std::string(to_string(kind_of(parsed.value()))));
  }
  std::map<std::string, std::string> keys = trial.conditions;
  keys["task"] = std::string(to_string(trial.task));
  keys["variant"] = trial.variant;
  for (const auto& [k, v] : extra_keys) keys[k] = v;

  std::vector<ScoreRecord> out;
  auto emit = [&](const char* name, double value) { out.push_back({trial.id, name, value, keys}); };
  emit(metric::kParseFailed, parsed.ok() ? 0.0 : 1.0);

  const auto* truth_list = std::get_if<ObjectListAnswer>(&trial.expected);
  bool is_description = truth_list && (trial.task == TaskKind::Describe || trial.task == TaskKind::T2IDescribe);
  if (is_description) {
    const ObjectList& truth = truth_list->objects;
    if (!parsed.ok()) {
      emit(metric::kCorrect, truth.empty() ? 1.0 : 0.0);
      emit(metric::kEditDistance, static_cast<double>(truth.size()));
      emit(metric::kIllusoryConjunctions, 0);
      emit(metric::kInserts, 0);
      emit(metric::kDeletes, static_cast<double>(truth.size()));
      return out;
    }
    auto r = score_edit_distance(truth, std::get<ObjectListAnswer>(parsed.value()).objects);
    emit(metric::kCorrect, r.distance == 0 ? 1.0 : 0.0);
    emit(metric::kEditDistance, r.distance);
    emit(metric::kIllusoryConjunctions, r.illusory_conjunctions);
    emit(metric::kInserts, static_cast<double>(r.inserts.size()));
    emit(metric::kDeletes, static_cast<double>(r.deletes.size()));
    return out;
  }

  bool correct = parsed.ok() && parsed.value() == trial.expected;
  emit(metric::kCorrect, correct ? 1.0 : 0.0);
  if (const auto* expected = std::get_if<IntAnswer>(&trial.expected); expected && parsed.ok()) {
    double err = static_cast<double>(std::get<IntAnswer>(parsed.value()).value - expected->value);
    emit(metric::kSignedError, err);
    emit(metric::kAbsError, std::abs(err));
  }
  return out;
}

namespace {

std::string key_value(const ScoreRecord& r, const std::string& key) {
  auto it = r.keys.find(key);
  return it == r.keys.end() ? std::string() : it->second;
}

}  // namespace

std::vector<AggregateRow> aggregate(const std::vector<ScoreRecord>& records, const std::vector<std::string>& keys,
                                    const AggregateFilters& filters) {
  // Trials (per model) dropped for too many extraneous objects.
  std::set<std::pair<std::string, std::string>> excluded;
  if (filters.max_t2i_inserts >= 0) {
    for (const auto& r : records) {
      if (r.metric == metric::kInserts && key_value(r, "task") == to_string(TaskKind::T2IDescribe) &&
          r.value > filters.max_t2i_inserts) {
        excluded.emplace(r.trial_id, key_value(r, "model"));
      }
    }
  }
  auto kept = [&](const ScoreRecord& r) { return !excluded.count({r.trial_id, key_value(r, "model")}); };

  // Triplet counts backed by too few trials are removed from every analysis.
  std::set<std::string> thin_triplet_values;
  if (filters.min_trials_per_triplet_group > 0) {
    std::map<std::string, std::set<std::string>> trials_per_value;
    for (const auto& r : records) {
      if (!kept(r)) continue;
      auto it = r.keys.find(filters.triplet_key);
      if (it != r.keys.end()) trials_per_value[it->second].insert(r.trial_id);
    }
    for (const auto& [value, ids] : trials_per_value) {
      if (static_cast<int>(ids.size()) < filters.min_trials_per_triplet_group) thin_triplet_values.insert(value);
    }
  }

  std::map<std::pair<std::vector<std::string>, std::string>, std::vector<double>> groups;
  for (const auto& r : records) {
    if (!kept(r)) continue;
    auto it = r.keys.find(filters.triplet_key);
    if (it != r.keys.end() && thin_triplet_values.count(it->second)) continue;
    std::vector<std::string> group;
    for (const auto& k : keys) group.push_back(key_value(r, k));
    groups[{std::move(group), r.metric}].push_back(r.value);
  }

  std::vector<AggregateRow> rows;
  for (auto& [id, values] : groups) {
    std::sort(values.begin(), values.end());  // order-independent summation
    AggregateRow row;
    row.group = id.first;
    row.metric = id.second;
    row.n = static_cast<long long>(values.size());
    double sum = 0;
    for (double v : values) sum += v;
    row.mean = sum / static_cast<double>(row.n);
    row.sem = standard_error(values);
    if (is_binary_metric(row.metric)) {
      row.interval = IntervalKind::Wilson;
      auto ci = wilson_interval(std::llround(sum), row.n);
      row.ci_lo = ci.lo;
      row.ci_hi = ci.hi;
    } else {
      row.interval = IntervalKind::Sem;
      row.ci_lo = row.mean - row.sem;
      row.ci_hi = row.mean + row.sem;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows, const std::vector<std::string>& keys) {
  std::string out;
  for (const auto& k : keys) out += k + ",";
  out += "metric,mean,ci_lo,ci_hi,sem,n,interval\n";
  auto field = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  for (const auto& r : rows) {
    for (const auto& g : r.group) out += field(g) + ",";
    out += fmt::format("{},{:.6f},{:.6f},{:.6f},{:.6f},{},{}\n", field(r.metric), r.mean, r.ci_lo, r.ci_hi, r.sem, r.n,
                       r.interval == IntervalKind::Wilson ? "wilson95" : "sem");
  }
  return out;
}

}  // namespace bindbench

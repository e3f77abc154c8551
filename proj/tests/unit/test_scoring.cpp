#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "bindbench/scoring.hpp"
#include "oracles.hpp"

using namespace bindbench;

namespace {

ObjectList objs(std::initializer_list<std::pair<const char*, const char*>> items) {
  ObjectList out;
  for (auto [color, shape] : items) out.push_back({shape, color});
  return out;
}

TrialRecord trial_with(TaskKind task, Answer expected) {
  TrialRecord t;
  t.id = "t";
  t.task = task;
  t.variant = "v";
  t.expected = std::move(expected);
  t.conditions = {{"condition", "x"}};
  return t;
}

double metric_value(const std::vector<ScoreRecord>& rs, const char* name) {
  for (const auto& r : rs)
    if (r.metric == name) return r.value;
  ADD_FAILURE() << "metric " << name << " missing";
  return -1;
}

ScoreRecord rec(std::string id, const char* metric, double v, std::map<std::string, std::string> keys) {
  return {std::move(id), metric, v, std::move(keys)};
}

}  // namespace

TEST(Assignment, MatchesPermutationSearch) {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> size(1, 7), cost(0, 9);
  for (int t = 0; t < 200; ++t) {
    int n = size(gen);
    std::vector<std::vector<long long>> c(n, std::vector<long long>(n));
    for (auto& row : c)
      for (auto& v : row) v = cost(gen);
    auto a = solve_assignment(c);
    ASSERT_EQ(static_cast<int>(a.size()), n);
    long long got = 0;
    for (int i = 0; i < n; ++i) got += c[i][a[i]];
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    long long best = std::numeric_limits<long long>::max();
    do {
      long long s = 0;
      for (int i = 0; i < n; ++i) s += c[i][perm[i]];
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    ASSERT_EQ(got, best);
  }
}

TEST(EditDistance, Examples) {
  auto truth = objs({{"green", "X-shape"}, {"green", "triangle"}, {"yellow", "triangle"}});
  EXPECT_EQ(score_edit_distance(truth, truth).distance, 0);
  auto pred = objs({{"green", "X-shape"}, {"green", "triangle"}, {"yellow", "X-shape"}});
  auto r = score_edit_distance(truth, pred);
  EXPECT_EQ(r.distance, 1);
  EXPECT_EQ(r.illusory_conjunctions, 1);
  EXPECT_TRUE(r.inserts.empty());
  EXPECT_TRUE(r.deletes.empty());

  EXPECT_EQ(score_edit_distance({}, truth).distance, 3);
  EXPECT_EQ(score_edit_distance(truth, {}).distance, 3);
  // Both features wrong costs 2 as a substitution, same as delete + insert.
  EXPECT_EQ(score_edit_distance(objs({{"red", "circle"}}), objs({{"blue", "star"}})).distance, 2);
}

TEST(EditDistance, PrefersMatchesAmongOptimalSolutions) {
  auto r = score_edit_distance(objs({{"red", "circle"}}), objs({{"blue", "star"}}));
  EXPECT_EQ(r.matching.size(), 1u);
  EXPECT_TRUE(r.inserts.empty());
  EXPECT_TRUE(r.deletes.empty());
}

TEST(EditDistance, AgreesWithExhaustiveMatching) {
  std::mt19937_64 gen(17);
  std::uniform_int_distribution<int> size(0, 6), vocab(1, 4);
  for (int t = 0; t < 300; ++t) {
    auto truth = oracle::random_objects(gen, size(gen), vocab(gen), vocab(gen));
    auto pred = oracle::random_objects(gen, size(gen), vocab(gen), vocab(gen));
    auto r = score_edit_distance(truth, pred);
    ASSERT_EQ(r.distance, oracle::edit_distance(truth, pred));
    // the reported alignment accounts for the whole distance
    int cost = static_cast<int>(r.inserts.size() + r.deletes.size());
    for (auto [ti, pi] : r.matching) cost += oracle::substitution_cost(truth[ti], pred[pi]);
    ASSERT_EQ(cost, r.distance);
    ASSERT_EQ(r.matching.size() + r.deletes.size(), truth.size());
    ASSERT_EQ(r.matching.size() + r.inserts.size(), pred.size());
  }
}

TEST(EditDistance, MetricAxioms) {
  std::mt19937_64 gen(23);
  std::uniform_int_distribution<int> size(0, 6);
  for (int t = 0; t < 200; ++t) {
    auto a = oracle::random_objects(gen, size(gen), 3, 3);
    auto b = oracle::random_objects(gen, size(gen), 3, 3);
    auto c = oracle::random_objects(gen, size(gen), 3, 3);
    int ab = score_edit_distance(a, b).distance, ba = score_edit_distance(b, a).distance;
    int bc = score_edit_distance(b, c).distance, ac = score_edit_distance(a, c).distance;
    ASSERT_EQ(ab, ba);
    ASSERT_LE(ac, ab + bc);
    ASSERT_EQ(score_edit_distance(a, a).distance, 0);
    auto shuffled = a;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    ASSERT_EQ(score_edit_distance(a, shuffled).distance, 0);
  }
}

TEST(IllusoryConjunctions, Examples) {
  auto truth = objs({{"green", "X-shape"}, {"green", "triangle"}, {"yellow", "triangle"}});
  EXPECT_EQ(score_edit_distance(truth, truth).illusory_conjunctions, 0);
  // a color absent from the scene is a hallucination, not a binding error
  auto hallucinated = objs({{"green", "X-shape"}, {"green", "triangle"}, {"purple", "triangle"}});
  EXPECT_EQ(score_edit_distance(truth, hallucinated).illusory_conjunctions, 0);
  // a second green X has no truth object left to account for it
  auto duplicate = objs({{"green", "X-shape"}, {"green", "triangle"}, {"yellow", "triangle"}, {"green", "X-shape"}});
  EXPECT_EQ(score_edit_distance(truth, duplicate).illusory_conjunctions, 1);
  // an inserted recombination is
  auto inserted = objs({{"green", "X-shape"}, {"green", "triangle"}, {"yellow", "triangle"}, {"yellow", "X-shape"}});
  auto r = score_edit_distance(truth, inserted);
  EXPECT_EQ(r.distance, 1);
  EXPECT_EQ(r.illusory_conjunctions, 1);
}

TEST(ScoreTrial, Examples) {
  auto search = trial_with(TaskKind::Search, BoolAnswer{true});
  EXPECT_EQ(metric_value(score_trial(search, Answer{BoolAnswer{true}}), metric::kCorrect), 1.0);

  auto count = trial_with(TaskKind::Count, IntAnswer{7});
  auto cs = score_trial(count, Answer{IntAnswer{5}});
  EXPECT_EQ(metric_value(cs, metric::kCorrect), 0.0);
  EXPECT_EQ(metric_value(cs, metric::kSignedError), -2.0);
  EXPECT_EQ(metric_value(cs, metric::kAbsError), 2.0);

  ObjectList twelve(12, ObjectDesc{"circle", "red"});
  auto desc = trial_with(TaskKind::Describe, ObjectListAnswer{twelve});
  auto ds = score_trial(desc, Failure{ErrorCode::MalformedJSON, "x"});
  EXPECT_EQ(metric_value(ds, metric::kEditDistance), 12.0);
  EXPECT_EQ(metric_value(ds, metric::kDeletes), 12.0);
  EXPECT_EQ(metric_value(ds, metric::kParseFailed), 1.0);

  auto failed = score_trial(count, Failure{ErrorCode::NoAnswerFound, "x"});
  EXPECT_EQ(metric_value(failed, metric::kCorrect), 0.0);
  for (const auto& r : failed) EXPECT_NE(r.metric, metric::kSignedError);
}

TEST(ScoreTrial, KeysCarryConditionsTaskAndExtras) {
  auto t = trial_with(TaskKind::Search, BoolAnswer{false});
  auto rs = score_trial(t, Answer{BoolAnswer{true}}, {{"model", "m"}});
  for (const auto& r : rs) {
    EXPECT_EQ(r.trial_id, "t");
    EXPECT_EQ(r.keys.at("condition"), "x");
    EXPECT_EQ(r.keys.at("task"), "search");
    EXPECT_EQ(r.keys.at("model"), "m");
  }
}

TEST(ScoreTrial, KindMismatch) {
  auto t = trial_with(TaskKind::Search, BoolAnswer{false});
  try {
    score_trial(t, Answer{IntAnswer{3}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::KindMismatch);
  }
}

TEST(Wilson, BoundariesAndOracle) {
  EXPECT_EQ(wilson_interval(0, 10).lo, 0.0);
  EXPECT_EQ(wilson_interval(10, 10).hi, 1.0);
  auto ci = wilson_interval(90, 100, 0.95);
  auto want = oracle::wilson(90, 100, oracle::kZ95);
  EXPECT_NEAR(ci.lo, want.lo, 1e-9);
  EXPECT_NEAR(ci.hi, want.hi, 1e-9);
  // frozen from the formula above
  EXPECT_NEAR(ci.lo, 0.8256343385, 1e-9);
  EXPECT_NEAR(ci.hi, 0.9447708629, 1e-9);
}

TEST(Wilson, PropertyContainsPointEstimate) {
  for (long long n = 1; n <= 60; ++n)
    for (long long k = 0; k <= n; ++k) {
      auto ci = wilson_interval(k, n);
      double p = static_cast<double>(k) / static_cast<double>(n);
      ASSERT_LE(ci.lo, p + 1e-12);
      ASSERT_GE(ci.hi, p - 1e-12);
      ASSERT_GE(ci.lo, 0.0);
      ASSERT_LE(ci.hi, 1.0);
      auto narrower = wilson_interval(k, n, 0.5);
      ASSERT_GE(narrower.lo, ci.lo - 1e-12);
      ASSERT_LE(narrower.hi, ci.hi + 1e-12);
    }
}

TEST(Wilson, DomainErrors) {
  EXPECT_THROW(wilson_interval(3, 2), Error);
  EXPECT_THROW(wilson_interval(0, 0), Error);
  EXPECT_THROW(wilson_interval(-1, 4), Error);
  EXPECT_THROW(wilson_interval(1, 4, 1.0), Error);
}

TEST(Aggregate, SingleGroupAllCorrect) {
  std::vector<ScoreRecord> rs;
  for (int i = 0; i < 5; ++i) rs.push_back(rec("t" + std::to_string(i), metric::kCorrect, 1, {{"c", "a"}}));
  auto rows = aggregate(rs, {"c"});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].mean, 1.0);
  EXPECT_EQ(rows[0].ci_hi, 1.0);
  EXPECT_EQ(rows[0].n, 5);
  EXPECT_EQ(rows[0].interval, IntervalKind::Wilson);
}

TEST(Aggregate, ThinTripletGroupsAreDropped) {
  std::vector<ScoreRecord> rs;
  for (int i = 0; i < 19; ++i) rs.push_back(rec("a" + std::to_string(i), metric::kEditDistance, 1, {{"triplets", "3"}}));
  for (int i = 0; i < 20; ++i) rs.push_back(rec("b" + std::to_string(i), metric::kEditDistance, 2, {{"triplets", "4"}}));
  auto rows = aggregate(rs, {"triplets"});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].group, std::vector<std::string>{"4"});
  EXPECT_EQ(rows[0].interval, IntervalKind::Sem);
  AggregateFilters off;
  off.min_trials_per_triplet_group = 0;
  EXPECT_EQ(aggregate(rs, {"triplets"}, off).size(), 2u);
}

TEST(Aggregate, T2iTrialsWithManyInsertsAreExcluded) {
  std::map<std::string, std::string> k{{"task", "t2i-describe"}, {"model", "m"}};
  std::vector<ScoreRecord> rs{rec("x", metric::kInserts, 4, k), rec("x", metric::kEditDistance, 9, k),
                              rec("y", metric::kInserts, 3, k), rec("y", metric::kEditDistance, 3, k)};
  AggregateFilters f;
  f.min_trials_per_triplet_group = 0;
  auto rows = aggregate(rs, {"model"}, f);
  for (const auto& r : rows) {
    EXPECT_EQ(r.n, 1);
    if (r.metric == metric::kEditDistance) EXPECT_EQ(r.mean, 3.0);
  }
}

TEST(Aggregate, OrderIndependentCsv) {
  std::vector<ScoreRecord> rs;
  for (int i = 0; i < 30; ++i)
    rs.push_back(rec("t" + std::to_string(i), metric::kAbsError, 0.1 * i, {{"c", i % 2 ? "a" : "b"}}));
  auto shuffled = rs;
  std::reverse(shuffled.begin(), shuffled.end());
  EXPECT_EQ(aggregate_csv(aggregate(rs, {"c"}), {"c"}), aggregate_csv(aggregate(shuffled, {"c"}), {"c"}));
}

TEST(Stats, StandardError) {
  EXPECT_EQ(standard_error({}), 0.0);
  EXPECT_EQ(standard_error({4}), 0.0);
  // sample sd of {1,2,3,4} is sqrt(5/3)
  EXPECT_NEAR(standard_error({1, 2, 3, 4}), std::sqrt(5.0 / 3.0) / 2.0, 1e-12);
}

TEST(Stats, LinearRegression) {
  auto exact = linear_regression({1, 2, 3, 4}, {3, 5, 7, 9});
  EXPECT_NEAR(exact.slope, 2.0, 1e-12);
  EXPECT_NEAR(exact.intercept, 1.0, 1e-12);
  // y = x + noise with known residuals; slope 1.0, se computed by hand
  auto fit = linear_regression({0, 1, 2, 3, 4}, {0.1, 0.9, 2.2, 2.8, 4.0});
  EXPECT_NEAR(fit.slope, 0.97, 1e-12);
  EXPECT_NEAR(fit.intercept, 0.06, 1e-12);
  // residuals: 0.04, -0.13, 0.20, -0.17, 0.06 -> SSE 0.091, se = sqrt(0.091/3/10)
  EXPECT_NEAR(fit.slope_se, std::sqrt(0.091 / 3.0 / 10.0), 1e-12);
  EXPECT_LT(fit.p_value, 1e-3);
  EXPECT_THROW(linear_regression({1, 1, 1}, {1, 2, 3}), Error);
}

TEST(Stats, Spearman) {
  EXPECT_NEAR(spearman_rho({1, 2, 3, 4}, {10, 20, 30, 40}), 1.0, 1e-12);
  EXPECT_NEAR(spearman_rho({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0, 1e-12);
  // ties take average ranks: x ranks 1,2.5,2.5,4 ; y ranks 1,2,3,4
  double rx[] = {1, 2.5, 2.5, 4}, ry[] = {1, 2, 3, 4};
  double mx = 2.5, my = 2.5, sxy = 0, sxx = 0, syy = 0;
  for (int i = 0; i < 4; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  EXPECT_NEAR(spearman_rho({1, 2, 2, 3}, {1, 2, 3, 4}), sxy / std::sqrt(sxx * syy), 1e-12);
}

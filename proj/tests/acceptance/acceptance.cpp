// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.
//
// usage: bindbench_acceptance <bindbench-cli> <run-config>

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/core.h>

#include "bindbench/analysis.hpp"
#include "bindbench/config.hpp"
#include "bindbench/observer.hpp"
#include "bindbench/parse.hpp"
#include "bindbench/prompts.hpp"
#include "bindbench/rng.hpp"
#include "bindbench/scoring.hpp"
#include "bindbench/trials.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "tempdir.hpp"

using namespace bindbench;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "<missing " + path.string() + ">";
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// trial id -> metric -> value, for the synthetic observer answering every trial.
using Scored = std::map<std::string, std::map<std::string, double>>;

Scored answer_all(const std::vector<TrialRecord>& trials, const ObserverParams& params, std::uint64_t master_seed) {
  Scored out;
  for (const auto& t : trials) {
    std::string text = synthetic_describe(t, params, observer_seed(t, master_seed));
    auto parsed = parse_answer(text, expected_kind(t), uses_rmts_features(t));
    for (const auto& r : score_trial(t, parsed)) out[r.trial_id][r.metric] = r.value;
  }
  return out;
}

// Mean of `metric` grouped by the value of condition `key`, optionally restricted by a predicate.
std::map<std::string, std::vector<double>> by_condition(const std::vector<TrialRecord>& trials, const Scored& scored,
                                                        const std::string& key, const std::string& metric_name,
                                                        const std::function<bool(const TrialRecord&)>& keep = {}) {
  std::map<std::string, std::vector<double>> groups;
  for (const auto& t : trials) {
    if (keep && !keep(t)) continue;
    groups[t.conditions.at(key)].push_back(scored.at(t.id).at(metric_name));
  }
  return groups;
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0 : s / static_cast<double>(v.size());
}

std::vector<int> d_bins() {
  std::vector<int> d;
  for (int x = 5; x <= 50; x += 5) d.push_back(x);
  return d;
}

Verdict triplet_counter() {
  Verdict v;
  auto start = Clock::now();
  std::mt19937_64 gen(101);
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(3, 15)(gen);
    int shapes = std::uniform_int_distribution<int>(1, 6)(gen);
    int colors = std::uniform_int_distribution<int>(1, 6)(gen);
    auto objects = oracle::random_objects(gen, n, shapes, colors);
    mismatches += count_feature_triplets(std::span<const ObjectDesc>(objects)) != oracle::count_triplets(objects);
  }
  double t = seconds_since(start);
  v.require(mismatches == 0, fmt::format("{} mismatches", mismatches));
  v.require(t < 10, fmt::format("runtime {:.2f} s", t));
  v.detail = v.pass ? fmt::format("1000 scenes equal, {:.2f} s", t) : v.detail;
  return v;
}

Verdict edit_distance() {
  Verdict v;
  auto start = Clock::now();
  std::mt19937_64 gen(202);
  auto random_list = [&] {
    std::size_t n = std::uniform_int_distribution<std::size_t>(0, 6)(gen);
    return oracle::random_objects(gen, n, 3, 3);
  };
  int mismatches = 0;
  for (int i = 0; i < 500; ++i) {
    auto truth = random_list();
    auto pred = random_list();
    mismatches += score_edit_distance(truth, pred).distance != oracle::edit_distance(truth, pred);
  }
  int asymmetric = 0, triangle = 0;
  for (int i = 0; i < 500; ++i) {
    auto a = random_list(), b = random_list(), c = random_list();
    int ab = score_edit_distance(a, b).distance, ba = score_edit_distance(b, a).distance;
    int bc = score_edit_distance(b, c).distance, ac = score_edit_distance(a, c).distance;
    asymmetric += ab != ba;
    triangle += ac > ab + bc;
  }
  double t = seconds_since(start);
  v.require(mismatches == 0, fmt::format("{} oracle mismatches", mismatches));
  v.require(asymmetric == 0, fmt::format("{} asymmetric triples", asymmetric));
  v.require(triangle == 0, fmt::format("{} triangle violations", triangle));
  v.require(t < 60, fmt::format("runtime {:.2f} s", t));
  v.detail = v.pass ? fmt::format("500 pairs equal, axioms hold on 500 triples, {:.2f} s", t) : v.detail;
  return v;
}

Verdict popout() {
  Verdict v;
  SearchTaskConfig cfg;
  cfg.conditions = {SearchCondition::Disjunctive, SearchCondition::DisjunctiveControl};
  cfg.distractors = d_bins();
  cfg.trials_per_cell = 200;
  auto trials = build_search_trials(cfg, 303);
  auto scored = answer_all(trials, ObserverParams{}, 303);
  for (const char* cond : {"disjunctive", "disjunctive-control"}) {
    auto bins = by_condition(trials, scored, "distractors", metric::kCorrect,
                             [&](const TrialRecord& t) { return t.conditions.at("condition") == cond; });
    for (int d : cfg.distractors) {
      const auto& b = bins[std::to_string(d)];
      v.require(b.size() == 200 && mean(b) == 1.0, fmt::format("{} D={} accuracy {:.4f}", cond, d, mean(b)));
    }
  }
  if (v.pass) v.detail = "accuracy 1.0 in all 10 bins (disjunctive and variable-color control)";
  return v;
}

Verdict conjunctive() {
  Verdict v;
  auto start = Clock::now();
  SearchTaskConfig cfg;
  cfg.conditions = {SearchCondition::Conjunctive};
  cfg.distractors = d_bins();
  cfg.trials_per_cell = 200;
  auto trials = build_search_trials(cfg, 404);
  auto scored = answer_all(trials, ObserverParams{}, 404);
  auto bins = by_condition(trials, scored, "distractors", metric::kCorrect);
  std::vector<double> xs, ys;
  for (int d : cfg.distractors) {
    xs.push_back(d);
    ys.push_back(mean(bins[std::to_string(d)]));
  }
  double t = seconds_since(start);
  bool strictly = true;
  for (std::size_t i = 1; i < ys.size(); ++i) strictly = strictly && ys[i] < ys[i - 1];
  double rho = spearman_rho(xs, ys);
  std::string curve;
  for (double y : ys) curve += fmt::format("{:.3f} ", y);
  v.require(strictly, "bin means not strictly decreasing: " + curve);
  v.require(rho <= -0.9, fmt::format("spearman {:.3f}", rho));
  v.require(ys.front() >= 0.85 && ys.front() <= 1.0, fmt::format("accuracy at D=5 {:.3f}", ys.front()));
  v.require(ys.front() - ys.back() >= 0.15, fmt::format("drop {:.3f}", ys.front() - ys.back()));
  v.require(t < 120, fmt::format("runtime {:.2f} s", t));
  if (v.pass) v.detail = fmt::format("curve {}rho {:.3f}, {:.2f} s", curve, rho, t);
  return v;
}

Verdict subitizing() {
  Verdict v;
  CountTaskConfig cfg;
  cfg.n_min = 1;
  cfg.n_max = 20;
  cfg.trials_per_cell = 500;
  auto trials = build_count_trials(cfg, 505);
  auto scored = answer_all(trials, ObserverParams{}, 505);
  auto acc = by_condition(trials, scored, "n", metric::kCorrect);
  for (int n = 1; n <= 4; ++n) {
    double a = mean(acc[std::to_string(n)]);
    v.require(a >= 0.99, fmt::format("accuracy {:.4f} at n={}", a, n));
  }
  std::string curve;
  for (int n = 5; n <= 20; ++n) {
    double here = mean(acc[std::to_string(n)]);
    curve += fmt::format("{:.3f} ", here);
    if (n > 5) {
      double prev = mean(acc[std::to_string(n - 1)]);
      v.require(here <= prev, fmt::format("accuracy rises from n={} ({:.4f}) to n={} ({:.4f})", n - 1, prev, n, here));
    }
  }
  auto mae = by_condition(trials, scored, "condition", metric::kAbsError);
  double low = mean(mae["low"]), mc = mean(mae["medium-unique-color"]), ms = mean(mae["medium-unique-shape"]),
         high = mean(mae["high"]);
  for (const auto& [cond, values] : mae) v.require(values.size() == 20 * 500, cond + " trial count");
  v.require(low >= mc && low >= ms, fmt::format("low {:.4f} below a medium ({:.4f}, {:.4f})", low, mc, ms));
  v.require(mc >= high && ms >= high, fmt::format("a medium ({:.4f}, {:.4f}) below high {:.4f}", mc, ms, high));
  if (v.pass)
    v.detail = fmt::format("n<=4 exact; n=5..20 accuracy {}; MAE low {:.3f} >= color {:.3f}, shape {:.3f} >= high {:.3f}",
                           curve, low, mc, ms, high);
  return v;
}

Verdict triplet_law() {
  Verdict v;
  DescribeTaskConfig cfg;
  cfg.triplet_targets = {0, 1, 2, 4, 6, 8, 10, 12};
  cfg.trials_per_target = 100;
  auto trials = build_describe_trials(cfg, 606);
  ObserverParams params;
  params.p_bind = 0.08;
  auto scored = answer_all(trials, params, 606);

  std::vector<ScoreRecord> records;
  int ic_without_triplets = 0, ic_total = 0;
  for (const auto& t : trials) {
    auto triplets = count_feature_triplets(t.scenes.front());
    v.require(std::to_string(triplets) == t.conditions.at("triplets"), t.id + " triplet label");
    const auto& m = scored.at(t.id);
    records.push_back({t.id, metric::kEditDistance, m.at(metric::kEditDistance), {{"triplets", t.conditions.at("triplets")}}});
    int ic = static_cast<int>(m.at(metric::kIllusoryConjunctions));
    ic_total += ic;
    if (triplets == 0) ic_without_triplets += ic;
  }
  AggregateFilters filters;
  filters.min_trials_per_triplet_group = 20;
  auto rows = aggregate(records, {"triplets"}, filters);
  std::vector<double> xs, ys;
  for (const auto& r : rows) {
    if (r.n < 100) continue;
    xs.push_back(std::stod(r.group.at(0)));
    ys.push_back(r.mean);
  }
  v.require(xs.size() >= 6, fmt::format("{} triplet groups with >= 100 trials", xs.size()));
  auto fit = linear_regression(xs, ys);
  v.require(fit.slope > 0 && fit.p_value < 0.01, fmt::format("slope {:.4f} p {:.2g}", fit.slope, fit.p_value));
  v.require(ic_without_triplets == 0, fmt::format("{} illusory conjunctions in triplet-free scenes", ic_without_triplets));
  v.require(ic_total > 0, "no illusory conjunctions at all");
  if (v.pass)
    v.detail = fmt::format("{} groups, slope {:.4f} per triplet, p {:.2g}, {} ICs all in scenes with triplets", xs.size(),
                           fit.slope, fit.p_value, ic_total);
  return v;
}

struct ProbeAccuracy {
  long long correct = 0;
  long long n = 0;
  double p() const { return static_cast<double>(correct) / static_cast<double>(n); }
};

std::map<std::pair<std::string, std::string>, ProbeAccuracy> rmts_accuracy(const std::vector<TrialRecord>& trials,
                                                                          const ObserverParams& params) {
  auto scored = answer_all(trials, params, 707);
  std::map<std::pair<std::string, std::string>, ProbeAccuracy> out;
  for (const auto& t : trials) {
    auto& a = out[{t.conditions.at("mode"), t.conditions.at("probe")}];
    a.correct += scored.at(t.id).at(metric::kCorrect) == 1.0;
    ++a.n;
  }
  return out;
}

Verdict decomposition() {
  Verdict v;
  RmtsTaskConfig cfg;
  cfg.trials = 2000;
  auto trials = build_rmts_trials(cfg, 707);
  const std::vector<std::string> probes{"analogy", "relation", "single_feature", "full_feature"};

  ObserverParams params;
  auto acc = rmts_accuracy(trials, params);
  std::string table;
  for (const auto& probe : probes) {
    const auto& u = acc[{"unified", probe}];
    const auto& d = acc[{"decomposed", probe}];
    v.require(u.n == 2000 && d.n == 2000, probe + " trial count");
    v.require(d.p() >= u.p(), fmt::format("{} decomposed {:.4f} < unified {:.4f}", probe, d.p(), u.p()));
    table += fmt::format("{} {:.3f}->{:.3f} ", probe, u.p(), d.p());
    if (probe == "analogy") {
      double se = std::sqrt(u.p() * (1 - u.p()) / u.n + d.p() * (1 - d.p()) / d.n);
      double z = (d.p() - u.p()) / se;
      v.require(z >= 3, fmt::format("analogy separation {:.2f} SE", z));
      table += fmt::format("({:.1f} SE) ", z);
    }
  }

  ObserverParams equal = params;
  equal.e_decomposed = equal.e_unified;
  auto same = rmts_accuracy(trials, equal);
  for (const auto& probe : probes) {
    const auto& u = same[{"unified", probe}];
    const auto& d = same[{"decomposed", probe}];
    auto iu = wilson_interval(u.correct, u.n);
    auto id = wilson_interval(d.correct, d.n);
    v.require(iu.lo <= id.hi && id.lo <= iu.hi, fmt::format("{} intervals disjoint at equal error", probe));
  }
  if (v.pass) v.detail = table + "; equal error rates give overlapping intervals on all probes";
  return v;
}

Bindings identity_bindings() {
  Bindings b;
  for (auto name : placeholder_names()) b.emplace(std::string(name), "{" + std::string(name) + "}");
  return b;
}

Verdict prompts_and_parser() {
  Verdict v;
  const fs::path fixtures = fs::path(BINDBENCH_TEST_DATA_DIR) / "prompts";
  std::set<fs::path> covered;
  for (const auto& t : prompt_templates()) {
    fs::path p = fixtures / std::string(t.family) / (std::string(t.variant) + ".txt");
    covered.insert(p);
    v.require(build_prompt(t.family, t.variant, identity_bindings()) == slurp(p), p.string() + " differs");
  }
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(fixtures)) {
    if (!e.is_regular_file()) continue;
    ++files;
    v.require(covered.count(e.path()) == 1, e.path().string() + " has no template");
  }
  Rng rng(808);
  int broken = 0;
  for (int i = 0; i < 10000; ++i) {
    Answer a = testgen::random_answer(rng);
    auto parsed = parse_answer(format_answer(a), kind_of(a));
    broken += !parsed.ok() || !(parsed.value() == a);
  }
  v.require(broken == 0, fmt::format("{} round-trip failures", broken));
  if (v.pass) v.detail = fmt::format("{} templates equal {} fixture files; 10000 answers round-trip", covered.size(), files);
  return v;
}

int spawn(const std::vector<std::string>& args) {
  pid_t pid = fork();
  if (pid == 0) {
    int null = open("/dev/null", O_WRONLY);
    if (null >= 0) dup2(null, STDOUT_FILENO);
    std::vector<char*> argv;
    for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    execv(argv[0], argv.data());
    _exit(127);
  }
  return pid;
}

int wait_exit(int pid, bool* signalled = nullptr) {
  int status = 0;
  waitpid(pid, &status, 0);
  if (signalled) *signalled = WIFSIGNALED(status);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = slurp(e.path());
  return files;
}

std::string first_difference(const fs::path& a, const fs::path& b) {
  auto ta = tree(a), tb = tree(b);
  for (const auto& [rel, data] : ta) {
    auto it = tb.find(rel);
    if (it == tb.end()) return rel + " missing";
    if (it->second != data) return rel + " differs";
  }
  for (const auto& [rel, data] : tb)
    if (!ta.count(rel)) return rel + " extra";
  return "";
}

Verdict determinism_and_resume(const std::string& cli, const std::string& config) {
  Verdict v;
  TempDir dir;
  auto run_to = [&](const fs::path& out) {
    return spawn({cli, "--log-level", "error", "run", "--config", config, "--out", out.string()});
  };
  auto start = Clock::now();
  int code_a = wait_exit(run_to(dir.path() / "a"));
  const double full = seconds_since(start);
  int code_b = wait_exit(run_to(dir.path() / "b"));
  v.require(code_a == 0 && code_b == 0, fmt::format("run exit codes {} {}", code_a, code_b));
  const std::string scores = slurp(dir.path() / "a" / "scores.jsonl");
  v.require(!scores.empty() && scores == slurp(dir.path() / "b" / "scores.jsonl"), "scores.jsonl differs between runs");
  if (auto diff = first_difference(dir.path() / "a", dir.path() / "b"); !diff.empty()) v.require(false, diff);

  std::random_device rd;
  const double kill_after = std::uniform_real_distribution<double>(0.05, 0.95)(rd) * full;
  int pid = run_to(dir.path() / "c");
  std::this_thread::sleep_for(std::chrono::duration<double>(kill_after));
  kill(pid, SIGKILL);
  bool signalled = false;
  wait_exit(pid, &signalled);
  v.require(signalled, "run finished before the kill");
  int code_c = wait_exit(run_to(dir.path() / "c"));
  v.require(code_c == 0, fmt::format("resumed run exit code {}", code_c));
  if (auto diff = first_difference(dir.path() / "a", dir.path() / "c"); !diff.empty()) v.require(false, "after resume: " + diff);
  if (v.pass)
    v.detail = fmt::format("two runs byte-identical ({} files); killed at {:.2f} s of {:.2f} s, resumed output identical",
                           tree(dir.path() / "a").size(), kill_after, full);
  return v;
}

Verdict wilson() {
  Verdict v;
  v.require(wilson_interval(0, 10).lo == 0.0, "(0,10) lo != 0");
  v.require(wilson_interval(10, 10).hi == 1.0, "(10,10) hi != 1");
  auto got = wilson_interval(90, 100, 0.95);
  auto want = oracle::wilson(90, 100, oracle::kZ95);
  v.require(std::abs(got.lo - want.lo) <= 1e-9 && std::abs(got.hi - want.hi) <= 1e-9,
            fmt::format("({:.12f}, {:.12f}) vs oracle ({:.12f}, {:.12f})", got.lo, got.hi, want.lo, want.hi));
  if (v.pass) v.detail = fmt::format("boundaries exact; (90,100) = [{:.10f}, {:.10f}]", got.lo, got.hi);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::fprintf(stderr, "usage: %s <bindbench-cli> <run-config>\n", argv[0]);
    return 2;
  }
  const std::string cli = argv[1];
  const std::string config = argv[2];

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"triplet counter vs exhaustive enumeration", triplet_counter},
      {"edit distance vs exhaustive matching", edit_distance},
      {"disjunctive search is distractor invariant", popout},
      {"conjunctive search declines with distractors", conjunctive},
      {"subitizing cliff and entropy ordering", subitizing},
      {"edit distance grows with feature triplets", triplet_law},
      {"decomposed presentation helps RMTS", decomposition},
      {"prompt fixtures and parser round trip", prompts_and_parser},
      {"determinism and resume", [&] { return determinism_and_resume(cli, config); }},
      {"wilson intervals", wilson},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    auto start = Clock::now();
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    failed += !v.pass;
    std::printf("%s criterion %zu: %s (%.1f s): %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                seconds_since(start), v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

#include <gtest/gtest.h>

#include <set>

#include "bindbench/adapters.hpp"
#include "bindbench/annotation.hpp"
#include "bindbench/harness.hpp"
#include "bindbench/hashing.hpp"
#include "bindbench/json_io.hpp"
#include "bindbench/png.hpp"
#include "stub_server.hpp"
#include "tempdir.hpp"

using namespace bindbench;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kSmall = R"(
seed = 21
workers = 2
[tasks.search]
distractors = [5, 10]
trials_per_cell = 3
[tasks.count]
n_min = 1
n_max = 6
trials_per_cell = 2
[tasks.describe]
triplet_targets = [0, 2]
trials_per_target = 2
[tasks.rmts]
trials = 3
[[models]]
id = "observer"
kind = "synthetic"
[filters]
min_trials_per_triplet = 0
)";

RunConfig config_at(const std::string& text, const fs::path& out) {
  auto cfg = parse_run_config(text);
  cfg.out = out;
  return cfg;
}

std::size_t lines_of(const fs::path& p) {
  auto text = read_file(p);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST(EndToEnd, SyntheticRunsAreReproducibleAndResumable) {
  TempDir a, b;
  auto sa = run(config_at(kSmall, a.path()));
  auto sb = run(config_at(kSmall, b.path()));
  EXPECT_EQ(sa.failures, 0u);
  EXPECT_EQ(sa.cache_hits, 0u);
  EXPECT_EQ(sa.trials, 3u * 2 * 3 + 4u * 6 * 2 + 2u * 2 + 3u * 2 * 4);
  EXPECT_EQ(sa.work_items, sa.trials);
  for (const char* f : {"scores.jsonl", "trials.jsonl", "transcripts/observer.jsonl", "manifest.json",
                        "aggregates/search.csv", "aggregates/count.csv", "aggregates/describe_triplets.csv",
                        "aggregates/rmts_probe_accuracy.csv", "plots/search_accuracy_vs_distractors.svg"}) {
    ASSERT_TRUE(fs::exists(a.path() / f)) << f;
    EXPECT_EQ(read_file(a.path() / f), read_file(b.path() / f)) << f;
  }
  EXPECT_EQ(read_file(a.path() / "failures.jsonl"), "");
  auto trials = parse_jsonl(read_file(a.path() / "trials.jsonl"));
  for (const auto& t : trials)
    for (const auto& img : t.at("images")) EXPECT_TRUE(fs::exists(a.path() / img.get<std::string>())) << img;

  const std::string scores = read_file(a.path() / "scores.jsonl");
  auto again = run(config_at(kSmall, a.path()));
  EXPECT_EQ(again.cache_hits, again.work_items);
  EXPECT_EQ(read_file(a.path() / "scores.jsonl"), scores);
}

TEST(EndToEnd, FailingRemoteDoesNotStopOtherModels) {
  TempDir dir;
  std::string text = std::string(kSmall) + R"(
[[models]]
id = "offline"
kind = "remote"
endpoint = "http://127.0.0.1:1/unreachable"
max_retries = 0
backoff_ms = 1
rate_per_minute = 600000
timeout_s = 1
)";
  auto summary = run(config_at(text, dir.path()));
  EXPECT_EQ(summary.work_items, 2 * summary.trials);
  EXPECT_EQ(summary.failures, summary.trials);
  EXPECT_EQ(lines_of(dir.path() / "failures.jsonl"), summary.trials);
  auto failures = parse_jsonl(read_file(dir.path() / "failures.jsonl"));
  EXPECT_EQ(failures[0]["model"], "offline");
  EXPECT_EQ(failures[0]["code"], "NetworkError");
  std::size_t failed = 0, answered = 0;
  for (const auto& s : parse_jsonl(read_file(dir.path() / "scores.jsonl"))) {
    if (s["metric"] != "query_failed") continue;
    (s["value"] == 1.0 ? failed : answered) += 1;
    EXPECT_EQ(s["keys"]["model"], s["value"] == 1.0 ? "offline" : "observer");
  }
  EXPECT_EQ(failed, summary.trials);
  EXPECT_EQ(answered, summary.trials);
  EXPECT_EQ(read_file(dir.path() / "transcripts" / "offline.jsonl"), "");
}

TEST(EndToEnd, RemoteDescriberIsScored) {
  StubServer s([](const httplib::Request&, httplib::Response& res, int) {
    res.set_content(json{{"text", "I think [True] and [5]"}}.dump(), "application/json");
  });
  TempDir dir;
  std::string text = R"(
seed = 4
[tasks.search]
distractors = [5]
trials_per_cell = 2
[[models]]
id = "stub"
kind = "remote"
max_retries = 0
rate_per_minute = 600000
endpoint = ")" + s.url("/e2e-describe") + "\"\n";
  auto summary = run(config_at(text, dir.path()));
  EXPECT_EQ(summary.failures, 0u);
  EXPECT_EQ(s.calls(), static_cast<int>(summary.trials));
  EXPECT_EQ(lines_of(dir.path() / "transcripts" / "stub.jsonl"), summary.trials);
  auto rerun = run(config_at(text, dir.path()));
  EXPECT_EQ(rerun.cache_hits, rerun.work_items);
  EXPECT_EQ(s.calls(), static_cast<int>(summary.trials));
}

TEST(EndToEnd, TextToImageAnnotationFlow) {
  const std::string png = encode_png(Image(16, 16, {200, 10, 10}));
  StubServer s([&](const httplib::Request&, httplib::Response& res, int) {
    res.set_content(json{{"image_base64", base64_encode(png)}}.dump(), "application/json");
  });
  TempDir dir;
  std::string text = R"(
seed = 9
[tasks.t2i_count]
categories = ["apples"]
n_min = 2
n_max = 3
[tasks.t2i_describe]
triplet_targets = [0]
trials_per_target = 2
[[models]]
id = "painter"
kind = "remote-image"
max_retries = 0
rate_per_minute = 600000
endpoint = ")" + s.url("/e2e-images") + "\"\n[filters]\nmin_trials_per_triplet = 0\n";
  auto summary = run(config_at(text, dir.path()));
  EXPECT_EQ(summary.failures, 0u);
  EXPECT_EQ(summary.annotation_tasks, 4u);
  EXPECT_EQ(summary.t2i_scores, 0u);
  EXPECT_TRUE(fs::exists(dir.path() / "images" / "generated" / (sha256_hex(png) + ".png")));

  auto tasks = load_annotation_tasks(dir.path() / "annotation_tasks.jsonl");
  ASSERT_EQ(tasks.size(), 4u);
  auto trials = parse_jsonl(read_file(dir.path() / "trials.jsonl"));
  std::string log;
  for (const auto& task : tasks) {
    AnnotationRecord r;
    r.task_id = task.task_id;
    r.annotator = "ann";
    if (task.kind == AnnotationKind::Count) {
      for (const auto& t : trials)
        if (t["trial_id"] == task.trial_id) r.count = std::stoll(t["conditions"]["n"].get<std::string>());
    } else {
      for (const auto& l : task.labels) r.labels[l] = true;
      r.extraneous = {"green frog"};
    }
    log += json(r).dump() + "\n";
  }
  write_file_atomic(dir.path() / "annotations.jsonl", log);
  const std::size_t n_scores = score_t2i_annotations(dir.path());
  auto scores = parse_jsonl(read_file(dir.path() / "t2i_scores.jsonl"));
  EXPECT_EQ(scores.size(), n_scores);
  std::set<std::string> scored;
  int correct_counts = 0, inserts = 0;
  for (const auto& sc : scores) {
    scored.insert(sc["trial_id"].get<std::string>());
    if (sc["keys"]["task"] == "t2i-count" && sc["metric"] == "correct") correct_counts += sc["value"] == 1.0;
    if (sc["keys"]["task"] == "t2i-describe" && sc["metric"] == "inserts") inserts += static_cast<int>(sc["value"].get<double>());
  }
  EXPECT_EQ(correct_counts, 2);
  EXPECT_EQ(inserts, 2);
  EXPECT_EQ(scored.size(), 4u);
}

#include <gtest/gtest.h>
#include <httplib.h>

#include <thread>

#include "bindbench/adapters.hpp"
#include "bindbench/annotation.hpp"
#include "bindbench/error.hpp"
#include "bindbench/hashing.hpp"
#include "bindbench/png.hpp"
#include "tempdir.hpp"

using namespace bindbench;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

TrialRecord count_trial() {
  TrialRecord t;
  t.id = "t2i-count-apples-n03-r000";
  t.task = TaskKind::T2ICount;
  t.variant = "t2i";
  t.expected = IntAnswer{3};
  t.conditions = {{"n", "3"}};
  return t;
}

TrialRecord describe_trial() {
  TrialRecord t;
  t.id = "t2i-describe-t00-r000";
  t.task = TaskKind::T2IDescribe;
  t.variant = "t2i";
  t.expected = ObjectListAnswer{{{"cube", "red"}, {"apple", "green"}}};
  t.conditions = {{"triplets", "0"}};
  return t;
}

class ServerFixture : public ::testing::Test {
 protected:
  void start(int annotators_per_image) {
    png_ = encode_png(Image(4, 4, {1, 2, 3}));
    const std::string hash = sha256_hex(png_);
    write_file_atomic(dir_.path() / "images" / "generated" / (hash + ".png"), png_);
    std::string lines = json(make_annotation_task(count_trial(), "gen", hash)).dump() + "\n" +
                        json(make_annotation_task(describe_trial(), "gen", hash)).dump() + "\n";
    write_file_atomic(dir_.path() / "annotation_tasks.jsonl", lines);
    server_ = std::make_unique<AnnotationServer>(dir_.path(), AnnotationServerOptions{annotators_per_image, "go", {}});
    port_ = server_->bind("127.0.0.1", 0);
    thread_ = std::thread([this] { server_->listen(); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    for (int i = 0; i < 100 && !client_->Get("/api/progress"); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));
    hash_ = hash;
  }
  void TearDown() override {
    if (server_) {
      server_->stop();
      thread_.join();
    }
  }

  httplib::Result post(const json& body) { return client_->Post("/api/annotations", body.dump(), "application/json"); }
  json get_json(const std::string& path) {
    auto res = client_->Get(path);
    EXPECT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    return json::parse(res->body);
  }

  TempDir dir_;
  std::string png_;
  std::string hash_;
  std::unique_ptr<AnnotationServer> server_;
  std::thread thread_;
  int port_ = 0;
  std::unique_ptr<httplib::Client> client_;
};

}  // namespace

TEST_F(ServerFixture, TaskFlowAndDuplicates) {
  start(1);
  auto next = get_json("/api/tasks/next?annotator=ann");
  EXPECT_EQ(next["task_id"], "gen:t2i-count-apples-n03-r000");
  EXPECT_EQ(next["image_url"], "/images/" + hash_ + ".png");
  EXPECT_EQ(next["instructions"], "go");

  json count{{"task_id", "gen:t2i-count-apples-n03-r000"}, {"annotator", "ann"}, {"count", 3}};
  auto res = post(count);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  res = post(count);
  EXPECT_EQ(res->status, 409);

  auto progress = get_json("/api/progress?annotator=ann");
  EXPECT_EQ(progress["total_tasks"], 2);
  EXPECT_EQ(progress["completed_tasks"], 1);
  EXPECT_EQ(progress["records"], 1);
  EXPECT_EQ(progress["annotator_records"], 1);

  next = get_json("/api/tasks/next?annotator=ann");
  EXPECT_EQ(next["task_id"], "gen:t2i-describe-t00-r000");
  EXPECT_EQ(next["labels"], json::array({"red cube", "green apple"}));

  json partial{{"task_id", "gen:t2i-describe-t00-r000"}, {"annotator", "ann"}, {"labels", {{"red cube", true}}}};
  EXPECT_EQ(post(partial)->status, 400);
  json match{{"task_id", "gen:t2i-describe-t00-r000"},
             {"annotator", "ann"},
             {"labels", {{"red cube", true}, {"green apple", false}}},
             {"extraneous", {"blue bird"}}};
  EXPECT_EQ(post(match)->status, 200);
  EXPECT_EQ(get_json("/api/tasks/next?annotator=ann")["done"], true);
  EXPECT_EQ(get_json("/api/tasks/next?annotator=other")["done"], true);

  auto log = load_annotations(dir_.path() / "annotations.jsonl");
  ASSERT_EQ(log.size(), 2u);
  EXPECT_EQ(log[0].count, 3);
  EXPECT_FALSE(log[0].timestamp.empty());
  EXPECT_EQ(log[1].extraneous, std::vector<std::string>{"blue bird"});
}

TEST_F(ServerFixture, RejectsBadRequests) {
  start(2);
  auto res = client_->Get("/api/tasks/next");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  EXPECT_EQ(client_->Post("/api/annotations", "not json", "application/json")->status, 400);
  EXPECT_EQ(post(json{{"task_id", "nope"}, {"annotator", "a"}, {"count", 1}})->status, 400);
  EXPECT_EQ(post(json{{"task_id", "gen:t2i-count-apples-n03-r000"}, {"annotator", ""}, {"count", 1}})->status, 400);
  EXPECT_EQ(post(json{{"task_id", "gen:t2i-count-apples-n03-r000"}, {"annotator", "a"}, {"count", -2}})->status, 400);
  EXPECT_EQ(get_json("/api/progress")["records"], 0);
}

TEST_F(ServerFixture, ServesImagesAndSharesTasksUpToQuota) {
  start(2);
  auto img = client_->Get("/images/" + hash_ + ".png");
  ASSERT_TRUE(img);
  EXPECT_EQ(img->status, 200);
  EXPECT_EQ(img->body, png_);
  EXPECT_EQ(client_->Get("/images/" + std::string(64, '0') + ".png")->status, 404);

  const std::string id = "gen:t2i-count-apples-n03-r000";
  EXPECT_EQ(post(json{{"task_id", id}, {"annotator", "a"}, {"count", 3}})->status, 200);
  EXPECT_EQ(get_json("/api/tasks/next?annotator=b")["task_id"], id);
  EXPECT_EQ(get_json("/api/progress")["completed_tasks"], 0);
  EXPECT_EQ(post(json{{"task_id", id}, {"annotator", "b"}, {"count", 4}})->status, 200);
  EXPECT_EQ(get_json("/api/progress")["completed_tasks"], 1);
  EXPECT_NE(get_json("/api/tasks/next?annotator=c")["task_id"], id);
}

TEST_F(ServerFixture, RestartKeepsLoggedRecords) {
  start(1);
  EXPECT_EQ(post(json{{"task_id", "gen:t2i-count-apples-n03-r000"}, {"annotator", "a"}, {"count", 3}})->status, 200);
  server_->stop();
  thread_.join();
  server_.reset();
  AnnotationServer again(dir_.path(), AnnotationServerOptions{});
  int port = again.bind("127.0.0.1", 0);
  std::thread t([&] { again.listen(); });
  httplib::Client c("127.0.0.1", port);
  httplib::Result res;
  for (int i = 0; i < 100 && !(res = c.Get("/api/progress")); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));
  ASSERT_TRUE(res);
  EXPECT_EQ(json::parse(res->body)["records"], 1);
  EXPECT_EQ(c.Post("/api/annotations",
                   json{{"task_id", "gen:t2i-count-apples-n03-r000"}, {"annotator", "a"}, {"count", 3}}.dump(),
                   "application/json")
                ->status,
            409);
  again.stop();
  t.join();
}

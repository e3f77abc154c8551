#include <gtest/gtest.h>

#include <cstdlib>

#include "bindbench/adapters.hpp"
#include "bindbench/error.hpp"
#include "bindbench/hashing.hpp"
#include "bindbench/png.hpp"
#include "stub_server.hpp"
#include "tempdir.hpp"

using namespace bindbench;
using nlohmann::json;

namespace {

EndpointConfig endpoint(const StubServer& s, const std::string& path) {
  EndpointConfig cfg;
  cfg.model_id = "stub";
  cfg.url = s.url(path);
  cfg.rate_per_minute = 60000;
  cfg.backoff_ms = 1;
  cfg.max_retries = 3;
  cfg.timeout_s = 5;
  return cfg;
}

void reply_text(httplib::Response& res, const std::string& text) {
  res.set_content(json{{"text", text}}.dump(), "application/json");
}

const std::string kImage = "\x89PNG fake image bytes";

}  // namespace

TEST(Remote, TransientServerErrorsAreRetried) {
  StubServer s([](const httplib::Request&, httplib::Response& res, int call) {
    if (call < 2) {
      res.status = 503;
      return;
    }
    reply_text(res, "answer [True]");
  });
  TempDir dir;
  TranscriptCache cache(dir.path() / "cache");
  RemoteModel model(endpoint(s, "/retry"), &cache);
  auto r = model.describe({kImage}, "prompt", "trial-1");
  EXPECT_EQ(r.text, "answer [True]");
  EXPECT_EQ(r.transcript.retries, 2);
  EXPECT_EQ(s.calls(), 3);
  EXPECT_EQ(model.requests_sent(), 3);
  EXPECT_EQ(r.transcript.trial_id, "trial-1");
  EXPECT_EQ(r.transcript.prompt_hash, sha256_hex("prompt"));
  EXPECT_EQ(r.transcript.image_hashes, std::vector<std::string>{sha256_hex(kImage)});
  EXPECT_FALSE(r.transcript.timestamp.empty());

  auto body = json::parse(s.last_body());
  EXPECT_EQ(body["messages"][0]["content"], "prompt");
  EXPECT_EQ(body["messages"][0]["images"][0], base64_encode(kImage));
}

TEST(Remote, CacheHitSendsNoRequest) {
  StubServer s([](const httplib::Request&, httplib::Response& res, int) { reply_text(res, "[3]"); });
  TempDir dir;
  TranscriptCache cache(dir.path() / "cache");
  RemoteModel first(endpoint(s, "/cache"), &cache);
  auto a = first.describe({kImage}, "count", "t");
  EXPECT_FALSE(a.from_cache);
  RemoteModel second(endpoint(s, "/cache"), &cache);
  auto b = second.describe({kImage}, "count", "t");
  EXPECT_TRUE(b.from_cache);
  EXPECT_EQ(b.text, a.text);
  EXPECT_EQ(s.calls(), 1);
  EXPECT_EQ(second.requests_sent(), 0);
}

TEST(Remote, ServerErrorsExhaustRetries) {
  StubServer s([](const httplib::Request&, httplib::Response& res, int) { res.status = 500; });
  RemoteModel model(endpoint(s, "/down"), nullptr);
  try {
    model.describe({kImage}, "p");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NetworkError);
  }
  EXPECT_EQ(s.calls(), 4);
}

TEST(Remote, ClientErrorsAreNotRetried) {
  StubServer s([](const httplib::Request&, httplib::Response& res, int) { res.status = 400; });
  RemoteModel model(endpoint(s, "/bad"), nullptr);
  EXPECT_THROW(model.describe({kImage}, "p"), Error);
  EXPECT_EQ(s.calls(), 1);
}

TEST(Remote, TooManyRequestsRaisesRateLimited) {
  StubServer s([](const httplib::Request&, httplib::Response& res, int) {
    res.status = 429;
    res.set_header("Retry-After", "7");
  });
  RemoteModel model(endpoint(s, "/limited"), nullptr);
  try {
    model.describe({kImage}, "p");
    FAIL();
  } catch (const RateLimitedError& e) {
    EXPECT_EQ(e.code(), ErrorCode::RateLimited);
    ASSERT_TRUE(e.retry_after_seconds());
    EXPECT_EQ(*e.retry_after_seconds(), 7.0);
  }
  EXPECT_EQ(s.calls(), 1);
}

TEST(Remote, MissingSecretFailsBeforeAnyRequest) {
  StubServer s([](const httplib::Request&, httplib::Response& res, int) { reply_text(res, "x"); });
  auto cfg = endpoint(s, "/auth");
  cfg.auth_env = "BINDBENCH_TEST_SECRET_THAT_IS_UNSET";
  ::unsetenv(cfg.auth_env.c_str());
  RemoteModel model(cfg, nullptr);
  try {
    model.describe({kImage}, "p");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AuthMissing);
  }
  EXPECT_EQ(s.calls(), 0);

  ::setenv("BINDBENCH_TEST_SECRET_SET", "s3cret", 1);
  cfg.auth_env = "BINDBENCH_TEST_SECRET_SET";
  RemoteModel authed(cfg, nullptr);
  authed.describe({kImage}, "p");
  EXPECT_EQ(s.last_auth(), "Bearer s3cret");
}

TEST(Remote, MalformedResponses) {
  StubServer s([](const httplib::Request&, httplib::Response& res, int call) {
    if (call == 0) res.set_content("not json", "text/plain");
    else res.set_content(R"({"other": 1})", "application/json");
  });
  RemoteModel model(endpoint(s, "/garbage"), nullptr);
  EXPECT_THROW(model.describe({kImage}, "p"), Error);
  EXPECT_THROW(model.describe({kImage}, "p"), Error);
}

TEST(Remote, ProviderMappings) {
  EndpointConfig cfg;
  cfg.model_id = "m";
  cfg.provider = Provider::OpenAI;
  cfg.options = {{"model", "gpt-x"}, {"temperature", 0}};
  auto body = describe_request(cfg, {kImage}, "hello");
  EXPECT_EQ(body["model"], "gpt-x");
  EXPECT_EQ(body["temperature"], 0);
  EXPECT_EQ(body["messages"][0]["content"][0]["text"], "hello");
  EXPECT_EQ(body["messages"][0]["content"][1]["image_url"]["url"], "data:image/png;base64," + base64_encode(kImage));
  EXPECT_EQ(extract_response(cfg, json::parse(R"({"choices":[{"message":{"content":"hi"}}]})"), false), "hi");

  cfg.provider = Provider::Anthropic;
  body = describe_request(cfg, {kImage}, "hello");
  EXPECT_EQ(body["messages"][0]["content"][0]["source"]["data"], base64_encode(kImage));
  EXPECT_EQ(body["messages"][0]["content"][1]["text"], "hello");
  EXPECT_EQ(extract_response(cfg, json::parse(R"({"content":[{"type":"text","text":"yo"}]})"), false), "yo");

  cfg.response_pointer = "/deep/answer";
  EXPECT_EQ(extract_response(cfg, json::parse(R"({"deep":{"answer":"z"}})"), false), "z");
}

TEST(Remote, GeneratedImagesAreStoredByHash) {
  Image img(8, 8, {10, 20, 30});
  const std::string png = encode_png(img);
  StubServer s([&](const httplib::Request&, httplib::Response& res, int) {
    res.set_content(json{{"image_base64", base64_encode(png)}}.dump(), "application/json");
  });
  TempDir dir;
  TranscriptCache cache(dir.path() / "cache");
  RemoteModel model(endpoint(s, "/gen"), &cache, dir.path() / "generated");
  auto r = model.generate_image("Render an image", "t2i-1");
  EXPECT_EQ(r.image, png);
  EXPECT_EQ(r.transcript.raw, sha256_hex(png));
  EXPECT_EQ(read_file(dir.path() / "generated" / (sha256_hex(png) + ".png")), png);
  auto again = model.generate_image("Render an image", "t2i-1");
  EXPECT_TRUE(again.from_cache);
  EXPECT_EQ(again.image, png);
  EXPECT_EQ(s.calls(), 1);
}

TEST(Cache, StaleTemporariesAreRemovedAndPartialEntriesIgnored) {
  TempDir dir;
  TranscriptCache cache(dir.path());
  Transcript t;
  t.model_id = "m";
  t.cache_key = "k1";
  t.raw = "r";
  cache.store(t);
  write_file_atomic(dir.path() / "m" / "k2.json", "{ truncated");
  write_file_atomic(dir.path() / "m" / "k3.json.tmp.123.0", "x");
  EXPECT_TRUE(cache.load("m", "k1"));
  EXPECT_FALSE(cache.load("m", "k2"));
  cache.remove_stale_temporaries();
  EXPECT_FALSE(std::filesystem::exists(dir.path() / "m" / "k3.json.tmp.123.0"));
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "m" / "k1.json"));
}

TEST(Cache, KeyDependsOnEveryInput) {
  auto base = cache_key("m", "p", {"i"}, json::object());
  EXPECT_EQ(base, cache_key("m", "p", {"i"}, json::object()));
  EXPECT_NE(base, cache_key("n", "p", {"i"}, json::object()));
  EXPECT_NE(base, cache_key("m", "q", {"i"}, json::object()));
  EXPECT_NE(base, cache_key("m", "p", {"j"}, json::object()));
  EXPECT_NE(base, cache_key("m", "p", {"i"}, json{{"t", 1}}));
}

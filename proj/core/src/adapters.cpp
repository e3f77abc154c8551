#include "bindbench/adapters.hpp"

#include <httplib.h>
#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <spdlog/spdlog.h>
#include <sstream>
#include <thread>

#include "bindbench/error.hpp"
#include "bindbench/hashing.hpp"

namespace bindbench {
namespace fs = std::filesystem;
using nlohmann::json;

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}.{:03}Z", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                     tm.tm_hour, tm.tm_min, tm.tm_sec, ms);
}

std::string_view to_string(Provider p) {
  switch (p) {
    case Provider::Generic: return "generic";
    case Provider::OpenAI: return "openai";
    case Provider::Anthropic: return "anthropic";
  }
  return "generic";
}

Provider provider_from_string(std::string_view text) {
  for (auto p : {Provider::Generic, Provider::OpenAI, Provider::Anthropic}) {
    if (to_string(p) == text) return p;
  }
  throw Error(ErrorCode::ConfigError, "unknown provider '" + std::string(text) + "'");
}

void EndpointConfig::validate() const {
  if (model_id.empty()) throw Error(ErrorCode::ConfigError, "model id is empty");
  if (url.rfind("http://", 0) != 0 && url.rfind("https://", 0) != 0) {
    throw Error(ErrorCode::ConfigError, "model " + model_id + ": endpoint must be an http(s) URL");
  }
  if (!(rate_per_minute > 0)) throw Error(ErrorCode::ConfigError, "model " + model_id + ": rate limit must be > 0");
  if (max_retries < 0 || backoff_ms < 0 || !(timeout_s > 0)) {
    throw Error(ErrorCode::ConfigError, "model " + model_id + ": bad retry or timeout settings");
  }
}

void to_json(json& j, const Transcript& t) {
  j = json{{"trial_id", t.trial_id},       {"model_id", t.model_id}, {"cache_key", t.cache_key},
           {"prompt_hash", t.prompt_hash}, {"image_hashes", t.image_hashes}, {"raw", t.raw},
           {"timestamp", t.timestamp},     {"latency_ms", t.latency_ms}, {"retries", t.retries},
           {"metadata", t.metadata}};
}

void from_json(const json& j, Transcript& t) {
  j.at("trial_id").get_to(t.trial_id);
  j.at("model_id").get_to(t.model_id);
  j.at("cache_key").get_to(t.cache_key);
  j.at("prompt_hash").get_to(t.prompt_hash);
  j.at("image_hashes").get_to(t.image_hashes);
  j.at("raw").get_to(t.raw);
  j.at("timestamp").get_to(t.timestamp);
  j.at("latency_ms").get_to(t.latency_ms);
  j.at("retries").get_to(t.retries);
  t.metadata = j.value("metadata", json::object());
}

std::string cache_key(const std::string& model_id, const std::string& prompt, const std::vector<std::string>& images,
                      const json& options) {
  std::string material = model_id + "|" + sha256_hex(prompt);
  for (const auto& img : images) material += "|" + sha256_hex(img);
  material += "|" + sha256_hex(options.dump());
  return sha256_hex(material);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& data) {
  static std::atomic<unsigned long> counter{0};
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += fmt::format(".tmp.{}.{}", static_cast<long>(::getpid()), counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

TranscriptCache::TranscriptCache(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

fs::path TranscriptCache::path_for(const std::string& model_id, const std::string& key) const {
  return root_ / model_id / (key + ".json");
}

std::optional<Transcript> TranscriptCache::load(const std::string& model_id, const std::string& key) const {
  fs::path p = path_for(model_id, key);
  std::error_code ec;
  if (!fs::exists(p, ec)) return std::nullopt;
  try {
    return json::parse(read_file(p)).get<Transcript>();
  } catch (const std::exception& e) {
    spdlog::warn("ignoring unreadable cache entry {}: {}", p.string(), e.what());
    return std::nullopt;
  }
}

void TranscriptCache::store(const Transcript& t) {
  std::lock_guard lock(write_mutex_);
  write_file_atomic(path_for(t.model_id, t.cache_key), json(t).dump(2) + "\n");
}

void TranscriptCache::remove_stale_temporaries() {
  std::error_code ec;
  if (!fs::exists(root_, ec)) return;
  std::vector<fs::path> stale;
  for (const auto& entry : fs::recursive_directory_iterator(root_)) {
    if (entry.is_regular_file() && entry.path().filename().string().find(".tmp.") != std::string::npos) {
      stale.push_back(entry.path());
    }
  }
  for (const auto& p : stale) fs::remove(p, ec);
}

TokenBucket::TokenBucket(double rate_per_minute, double burst)
    : rate_per_second_(rate_per_minute / 60.0),
      capacity_(std::max(1.0, burst)),
      tokens_(capacity_),
      last_(std::chrono::steady_clock::now()) {
  if (!(rate_per_minute > 0)) throw Error(ErrorCode::ConfigError, "rate limit must be > 0");
}

void TokenBucket::acquire() {
  std::unique_lock lock(mutex_);
  for (;;) {
    auto now = std::chrono::steady_clock::now();
    double elapsed = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    tokens_ = std::min(capacity_, tokens_ + elapsed * rate_per_second_);
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    double wait = (1.0 - tokens_) / rate_per_second_;
    lock.unlock();
    std::this_thread::sleep_for(std::chrono::duration<double>(wait));
    lock.lock();
  }
}

TokenBucket& endpoint_limiter(const std::string& url, double rate_per_minute) {
  static std::mutex mutex;
  static std::map<std::string, std::unique_ptr<TokenBucket>> buckets;
  std::lock_guard lock(mutex);
  auto& slot = buckets[url];
  if (!slot) slot = std::make_unique<TokenBucket>(rate_per_minute);
  return *slot;
}

namespace {

std::string data_url(const std::string& png) { return "data:image/png;base64," + base64_encode(png); }

void merge_options(json& body, const json& options) {
  if (!options.is_object()) return;
  for (const auto& [k, v] : options.items()) body[k] = v;
}

struct SplitUrl {
  std::string origin;
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::optional<double> retry_after(const httplib::Result& res) {
  if (!res->has_header("Retry-After")) return std::nullopt;
  try {
    return std::stod(res->get_header_value("Retry-After"));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

json describe_request(const EndpointConfig& cfg, const std::vector<std::string>& images_png, const std::string& prompt) {
  json body;
  switch (cfg.provider) {
    case Provider::Generic: {
      json images = json::array();
      for (const auto& img : images_png) images.push_back(base64_encode(img));
      body = {{"model", cfg.model_id},
              {"messages", json::array({{{"role", "user"}, {"content", prompt}, {"images", images}}})}};
      break;
    }
    case Provider::OpenAI: {
      json content = json::array({{{"type", "text"}, {"text", prompt}}});
      for (const auto& img : images_png) content.push_back({{"type", "image_url"}, {"image_url", {{"url", data_url(img)}}}});
      body = {{"model", cfg.model_id}, {"messages", json::array({{{"role", "user"}, {"content", content}}})}};
      break;
    }
    case Provider::Anthropic: {
      json content = json::array();
      for (const auto& img : images_png) {
        content.push_back({{"type", "image"},
                           {"source", {{"type", "base64"}, {"media_type", "image/png"}, {"data", base64_encode(img)}}}});
      }
      content.push_back({{"type", "text"}, {"text", prompt}});
      body = {{"model", cfg.model_id},
              {"max_tokens", 1024},
              {"messages", json::array({{{"role", "user"}, {"content", content}}})}};
      break;
    }
  }
  merge_options(body, cfg.options);
  return body;
}

json image_request(const EndpointConfig& cfg, const std::string& prompt) {
  json body{{"model", cfg.model_id}, {"prompt", prompt}};
  if (cfg.provider == Provider::OpenAI) {
    body["response_format"] = "b64_json";
    body["n"] = 1;
  }
  merge_options(body, cfg.options);
  return body;
}

std::string extract_response(const EndpointConfig& cfg, const json& body, bool image) {
  std::string pointer = cfg.response_pointer;
  if (pointer.empty()) {
    if (image) {
      pointer = cfg.provider == Provider::OpenAI ? "/data/0/b64_json" : "/image_base64";
    } else {
      switch (cfg.provider) {
        case Provider::Generic: pointer = "/text"; break;
        case Provider::OpenAI: pointer = "/choices/0/message/content"; break;
        case Provider::Anthropic: pointer = "/content/0/text"; break;
      }
    }
  }
  try {
    const json& v = body.at(json::json_pointer(pointer));
    if (!v.is_string()) throw Error(ErrorCode::NetworkError, "response field " + pointer + " is not a string");
    return v.get<std::string>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::NetworkError, "response lacks " + pointer);
  }
}

RemoteModel::RemoteModel(EndpointConfig cfg, TranscriptCache* cache, fs::path image_dir)
    : cfg_(std::move(cfg)), cache_(cache), image_dir_(std::move(image_dir)) {
  cfg_.validate();
}

std::string RemoteModel::secret() const {
  if (cfg_.auth_env.empty()) return {};
  const char* v = std::getenv(cfg_.auth_env.c_str());
  if (v == nullptr || *v == '\0') {
    throw Error(ErrorCode::AuthMissing, "model " + cfg_.model_id + ": environment variable " + cfg_.auth_env + " is unset");
  }
  return v;
}

RemoteModel::HttpOutcome RemoteModel::post(const json& body) {
  const std::string key = secret();
  httplib::Headers headers;
  if (!key.empty()) {
    if (cfg_.provider == Provider::Anthropic) {
      headers.emplace("x-api-key", key);
      headers.emplace("anthropic-version", "2023-06-01");
    } else {
      headers.emplace("Authorization", "Bearer " + key);
    }
  }
  auto [origin, path] = split_url(cfg_.url);
  httplib::Client client(origin);
  auto timeout = std::chrono::duration<double>(cfg_.timeout_s);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  const std::string payload = body.dump();

  HttpOutcome out;
  for (int attempt = 0;; ++attempt) {
    endpoint_limiter(cfg_.url, cfg_.rate_per_minute).acquire();
    auto start = std::chrono::steady_clock::now();
    ++requests_;
    auto res = client.Post(path, headers, payload, "application/json");
    out.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    std::string failure;
    if (!res) {
      failure = "connection error: " + httplib::to_string(res.error());
    } else if (res->status == 429) {
      throw RateLimitedError("model " + cfg_.model_id + " rate limited (HTTP 429)", retry_after(res));
    } else if (res->status >= 500) {
      failure = fmt::format("HTTP {}", res->status);
    } else if (res->status < 200 || res->status >= 300) {
      throw Error(ErrorCode::NetworkError, fmt::format("model {}: HTTP {}", cfg_.model_id, res->status));
    } else {
      out.body = json::parse(res->body, nullptr, false);
      if (out.body.is_discarded()) throw Error(ErrorCode::NetworkError, "model " + cfg_.model_id + ": body is not JSON");
      out.retries = attempt;
      return out;
    }

    if (attempt >= cfg_.max_retries) {
      throw Error(ErrorCode::NetworkError,
                  fmt::format("model {}: {} after {} retries", cfg_.model_id, failure, cfg_.max_retries));
    }
    auto delay = std::chrono::milliseconds(static_cast<long long>(cfg_.backoff_ms * std::pow(2.0, attempt)));
    spdlog::debug("model {}: {}; retrying in {} ms", cfg_.model_id, failure, delay.count());
    std::this_thread::sleep_for(delay);
  }
}

RemoteResult RemoteModel::describe(const std::vector<std::string>& images_png, const std::string& prompt,
                                   const std::string& trial_id) {
  if (images_png.empty()) throw Error(ErrorCode::PreconditionViolated, "describe needs at least one image");
  if (prompt.empty()) throw Error(ErrorCode::PreconditionViolated, "describe needs a prompt");
  RemoteResult r;
  std::string key = cache_key(cfg_.model_id, prompt, images_png, cfg_.options);
  if (cache_ != nullptr) {
    if (auto hit = cache_->load(cfg_.model_id, key)) {
      r.text = hit->raw;
      r.transcript = *hit;
      r.from_cache = true;
      return r;
    }
  }
  auto http = post(describe_request(cfg_, images_png, prompt));
  Transcript& t = r.transcript;
  t.trial_id = trial_id;
  t.model_id = cfg_.model_id;
  t.cache_key = key;
  t.prompt_hash = sha256_hex(prompt);
  for (const auto& img : images_png) t.image_hashes.push_back(sha256_hex(img));
  t.raw = extract_response(cfg_, http.body, false);
  t.timestamp = utc_timestamp();
  t.latency_ms = http.latency_ms;
  t.retries = http.retries;
  if (http.body.contains("usage")) t.metadata["usage"] = http.body["usage"];
  t.metadata["provider"] = to_string(cfg_.provider);
  r.text = t.raw;
  if (cache_ != nullptr) cache_->store(t);
  return r;
}

RemoteResult RemoteModel::generate_image(const std::string& prompt, const std::string& trial_id) {
  if (prompt.empty()) throw Error(ErrorCode::PreconditionViolated, "generate_image needs a prompt");
  RemoteResult r;
  std::string key = cache_key(cfg_.model_id, prompt, {}, cfg_.options);
  auto image_path = [&](const std::string& hash) { return image_dir_ / (hash + ".png"); };
  if (cache_ != nullptr) {
    if (auto hit = cache_->load(cfg_.model_id, key)) {
      std::error_code ec;
      if (fs::exists(image_path(hit->raw), ec)) {
        r.image = read_file(image_path(hit->raw));
        r.transcript = *hit;
        r.from_cache = true;
        return r;
      }
    }
  }
  auto http = post(image_request(cfg_, prompt));
  r.image = base64_decode(extract_response(cfg_, http.body, true));
  Transcript& t = r.transcript;
  t.trial_id = trial_id;
  t.model_id = cfg_.model_id;
  t.cache_key = key;
  t.prompt_hash = sha256_hex(prompt);
  t.raw = sha256_hex(r.image);
  t.timestamp = utc_timestamp();
  t.latency_ms = http.latency_ms;
  t.retries = http.retries;
  t.metadata["provider"] = to_string(cfg_.provider);
  if (!image_dir_.empty()) write_file_atomic(image_path(t.raw), r.image);
  if (cache_ != nullptr) cache_->store(t);
  return r;
}

}  // namespace bindbench

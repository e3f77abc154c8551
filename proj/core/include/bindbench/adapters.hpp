#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace bindbench {

// Request/response mapping for a provider family.
enum class Provider { Generic, OpenAI, Anthropic };

std::string_view to_string(Provider p);
Provider provider_from_string(std::string_view text);

struct EndpointConfig {
  std::string model_id;
  std::string url;                  // scheme://host[:port]/path
  Provider provider = Provider::Generic;
  std::string auth_env;             // name of the env var holding the secret; empty = no auth
  int max_retries = 3;
  int backoff_ms = 500;
  double rate_per_minute = 60;
  double timeout_s = 60;
  nlohmann::json options = nlohmann::json::object();  // passed through into the request body
  std::string response_pointer;     // JSON pointer overriding the provider default

  // Throws ConfigError.
  void validate() const;
};

struct Transcript {
  std::string trial_id;
  std::string model_id;
  std::string cache_key;
  std::string prompt_hash;
  std::vector<std::string> image_hashes;
  std::string raw;             // text response, or the sha256 of a generated image
  std::string timestamp;       // ISO-8601 UTC for remote calls; empty for offline models
  double latency_ms = 0;
  int retries = 0;
  nlohmann::json metadata = nlohmann::json::object();
};

void to_json(nlohmann::json& j, const Transcript& t);
void from_json(const nlohmann::json& j, Transcript& t);

// sha256 over model id, prompt hash, image hashes and the canonical dump of `options`.
std::string cache_key(const std::string& model_id, const std::string& prompt, const std::vector<std::string>& images,
                      const nlohmann::json& options);

// Content-addressed transcripts under <root>/<model-id>/<key>.json. Writes go to a temporary file that
// is renamed into place, so a reader never observes a partial entry.
class TranscriptCache {
 public:
  explicit TranscriptCache(std::filesystem::path root);

  std::optional<Transcript> load(const std::string& model_id, const std::string& key) const;
  void store(const Transcript& t);
  // Deletes temporary files left behind by an interrupted writer.
  void remove_stale_temporaries();
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path path_for(const std::string& model_id, const std::string& key) const;

  std::filesystem::path root_;
  std::mutex write_mutex_;
};

// Blocking token bucket; refills at rate_per_minute / 60 tokens per second.
class TokenBucket {
 public:
  explicit TokenBucket(double rate_per_minute, double burst = 1.0);
  void acquire();

 private:
  std::mutex mutex_;
  double rate_per_second_;
  double capacity_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
};

// One limiter per endpoint URL, shared by every client in the process.
TokenBucket& endpoint_limiter(const std::string& url, double rate_per_minute);

struct RemoteResult {
  std::string text;   // describe: model text
  std::string image;  // generate_image: PNG bytes
  Transcript transcript;
  bool from_cache = false;
};

// HTTP client for one endpoint with retries, rate limiting and the transcript cache.
class RemoteModel {
 public:
  RemoteModel(EndpointConfig cfg, TranscriptCache* cache, std::filesystem::path image_dir = {});

  // Throws AuthMissing, NetworkError or RateLimitedError.
  RemoteResult describe(const std::vector<std::string>& images_png, const std::string& prompt,
                        const std::string& trial_id = {});
  // The image is written to <image_dir>/<sha256>.png and its hash stored as the transcript text.
  RemoteResult generate_image(const std::string& prompt, const std::string& trial_id = {});

  const EndpointConfig& config() const { return cfg_; }
  // HTTP requests sent, including retries.
  long requests_sent() const { return requests_; }

 private:
  struct HttpOutcome {
    nlohmann::json body;
    int retries = 0;
    double latency_ms = 0;
  };
  HttpOutcome post(const nlohmann::json& body);
  std::string secret() const;

  EndpointConfig cfg_;
  TranscriptCache* cache_;
  std::filesystem::path image_dir_;
  std::atomic<long> requests_{0};
};

// Builds the request body for a describe call.
nlohmann::json describe_request(const EndpointConfig& cfg, const std::vector<std::string>& images_png,
                                const std::string& prompt);
nlohmann::json image_request(const EndpointConfig& cfg, const std::string& prompt);

// Extracts the text (or base64 image) from a response body. Throws NetworkError when absent.
std::string extract_response(const EndpointConfig& cfg, const nlohmann::json& body, bool image);

// Writes `data` to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& data);
std::string read_file(const std::filesystem::path& path);

// Current UTC time as 2024-01-31T12:00:00.000Z.
std::string utc_timestamp();

}  // namespace bindbench

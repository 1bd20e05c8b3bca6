#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "recmem/dataset.hpp"
#include "recmem/prompt.hpp"

namespace recmem {

// Deterministic decoding configuration: greedy sampling, full nucleus, no
// repetition penalties, fixed seed.
struct DecodingConfig {
  double temperature = 0.0;
  double top_p = 1.0;
  double frequency_penalty = 0.0;
  double presence_penalty = 0.0;
  std::int64_t seed = 42;
  int max_tokens = 256;

  void validate() const;  // throws ConfigError
};

enum class Backend { Http, Replay, Oracle };

const char* backend_name(Backend backend);
Backend backend_from_name(const std::string& name);  // throws ConfigError

// Test double simulating a model that memorized a known fraction of the
// dataset. The memorized subset is a seeded permutation prefix of the entity
// ids, picked independently per probe kind, so a full sweep over n entities
// scores exactly round(fraction*n) matches.
struct OracleSpec {
  double memorized_fraction = 1.0;
  std::uint64_t selection_seed = 42;
  const MovieLensDataset* dataset = nullptr;
  const SplitLog* split = nullptr;  // needed for recommendation prompts
};

struct ModelEndpoint {
  std::string model_name = "oracle";
  Backend backend = Backend::Oracle;
  std::string base_url;        // http: scheme://host[:port][/prefix]
  std::string auth_token_env;  // http: env var holding the bearer token
  std::string cache_path;      // replay: recorded cache to serve from
  OracleSpec oracle;
  double requests_per_second = 2.0;  // http client-side rate limit
  int max_attempts = 5;
  int retry_base_ms = 250;
  int timeout_s = 60;

  void validate() const;
};

// Stable digest over (model, decoding config, messages). Any change to any
// field or any message, or a reordering of messages, changes the key.
std::string cache_key(const std::string& model_name, const DecodingConfig& cfg,
                      const std::vector<ChatMessage>& messages);

// The exact chat-completions request body sent over the wire. Byte-stable for
// fixed inputs (keys serialized in sorted order).
std::string chat_request_body(const std::string& model_name, const DecodingConfig& cfg,
                              const std::vector<ChatMessage>& messages);

// Append-only response store: one self-contained JSON object per line,
// last-write-wins on duplicate keys. In-memory when constructed without a
// path. Appends are serialized through a single writer.
class ResponseCache {
 public:
  ResponseCache() = default;  // in-memory
  explicit ResponseCache(const std::filesystem::path& path, bool writable = true);

  std::optional<std::string> lookup(const std::string& key) const;
  void append(const std::string& key, const std::string& response_text);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::unordered_map<std::string, std::string> entries_;
  std::unique_ptr<std::ofstream> out_;
};

// Token bucket; acquire() blocks until a token is available.
class TokenBucket {
 public:
  TokenBucket(double tokens_per_second, double capacity);
  void acquire();

 private:
  std::mutex mu_;
  double rate_;
  double capacity_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
};

void set_debug_logging(bool enabled);

// Delivers prompts to a backend. complete() is safe to call from multiple
// threads; run_with_cache() additionally guarantees that concurrent misses on
// the same key issue a single backend call.
class LlmGateway {
 public:
  LlmGateway(ModelEndpoint endpoint, DecodingConfig cfg);
  ~LlmGateway();

  const ModelEndpoint& endpoint() const { return endpoint_; }
  const DecodingConfig& decoding() const { return cfg_; }

  // Returns the assistant text. Retries transient HTTP failures with
  // exponential backoff; replay misses raise CacheMissError.
  std::string complete(const ChatPrompt& prompt);

  // (response text, cache-hit flag).
  std::pair<std::string, bool> run_with_cache(const ChatPrompt& prompt,
                                              ResponseCache& cache);

  std::uint64_t http_requests_issued() const { return http_requests_.load(); }

 private:
  std::string complete_http(const ChatPrompt& prompt);
  std::string complete_replay(const ChatPrompt& prompt);

  ModelEndpoint endpoint_;
  DecodingConfig cfg_;
  std::unique_ptr<ResponseCache> replay_store_;
  std::unique_ptr<TokenBucket> limiter_;
  std::unique_ptr<class MemorizingOracle> oracle_;
  std::atomic<std::uint64_t> http_requests_{0};

  std::mutex inflight_mu_;
  std::condition_variable inflight_cv_;
  std::set<std::string> inflight_;
};

// Oracle backend internals, exposed for targeted tests.
class MemorizingOracle {
 public:
  explicit MemorizingOracle(OracleSpec spec);
  std::string respond(const ChatPrompt& prompt);
  bool memorized(PromptKind kind, std::int64_t id);

 private:
  const std::set<std::int64_t>& memorized_set(PromptKind kind);

  OracleSpec spec_;
  std::mutex mu_;
  std::unordered_map<int, std::set<std::int64_t>> memo_;
  std::optional<std::map<std::int64_t, std::vector<Interaction>>> by_user_;
};

}  // namespace recmem

#include "recmem/gateway.hpp"

#include <charconv>
#include <cstdlib>
#include <iostream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "recmem/digest.hpp"
#include "recmem/errors.hpp"

namespace recmem {

using nlohmann::json;

namespace {

std::atomic<bool> g_debug_logging{false};

std::string fmt_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

void debug_log(const std::string& line) {
  if (g_debug_logging.load(std::memory_order_relaxed)) {
    std::cerr << "[debug] " << line << "\n";
  }
}

}  // namespace

void set_debug_logging(bool enabled) { g_debug_logging.store(enabled); }

void DecodingConfig::validate() const {
  if (temperature < 0.0) throw ConfigError("temperature must be >= 0");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw ConfigError("top_p must be in (0,1]");
  if (max_tokens <= 0) throw ConfigError("max_tokens must be positive");
}

const char* backend_name(Backend backend) {
  switch (backend) {
    case Backend::Http: return "http";
    case Backend::Replay: return "replay";
    case Backend::Oracle: return "oracle";
  }
  return "oracle";
}

Backend backend_from_name(const std::string& name) {
  if (name == "http") return Backend::Http;
  if (name == "replay") return Backend::Replay;
  if (name == "oracle") return Backend::Oracle;
  throw ConfigError("unknown backend '" + name + "'");
}

void ModelEndpoint::validate() const {
  if (model_name.empty()) throw ConfigError("endpoint requires a model name");
  switch (backend) {
    case Backend::Http:
      if (base_url.empty()) throw ConfigError("http backend requires base_url");
      break;
    case Backend::Replay:
      if (cache_path.empty()) throw ConfigError("replay backend requires a cache path");
      break;
    case Backend::Oracle:
      if (oracle.dataset == nullptr) throw ConfigError("oracle backend requires a dataset");
      if (oracle.memorized_fraction < 0.0 || oracle.memorized_fraction > 1.0) {
        throw ConfigError("oracle fraction must be in [0,1]");
      }
      break;
  }
}

std::string cache_key(const std::string& model_name, const DecodingConfig& cfg,
                      const std::vector<ChatMessage>& messages) {
  // \x1f separates fields, \x1e separates records; neither occurs in the
  // values we serialize.
  std::string payload;
  payload += "model\x1f" + model_name + "\x1e";
  payload += "temperature\x1f" + fmt_double(cfg.temperature) + "\x1e";
  payload += "top_p\x1f" + fmt_double(cfg.top_p) + "\x1e";
  payload += "frequency_penalty\x1f" + fmt_double(cfg.frequency_penalty) + "\x1e";
  payload += "presence_penalty\x1f" + fmt_double(cfg.presence_penalty) + "\x1e";
  payload += "seed\x1f" + std::to_string(cfg.seed) + "\x1e";
  payload += "max_tokens\x1f" + std::to_string(cfg.max_tokens) + "\x1e";
  for (const ChatMessage& m : messages) {
    payload += "message\x1f";
    payload += role_name(m.role);
    payload += '\x1f';
    payload += m.content;
    payload += '\x1e';
  }
  return sha256_hex(payload);
}

std::string chat_request_body(const std::string& model_name, const DecodingConfig& cfg,
                              const std::vector<ChatMessage>& messages) {
  json body;
  body["model"] = model_name;
  json msgs = json::array();
  for (const ChatMessage& m : messages) {
    msgs.push_back(json{{"role", role_name(m.role)}, {"content", m.content}});
  }
  body["messages"] = std::move(msgs);
  body["temperature"] = cfg.temperature;
  body["top_p"] = cfg.top_p;
  body["seed"] = cfg.seed;
  body["frequency_penalty"] = cfg.frequency_penalty;
  body["presence_penalty"] = cfg.presence_penalty;
  body["max_tokens"] = cfg.max_tokens;
  return body.dump();
}

TokenBucket::TokenBucket(double tokens_per_second, double capacity)
    : rate_(tokens_per_second), capacity_(capacity), tokens_(capacity),
      last_(std::chrono::steady_clock::now()) {}

void TokenBucket::acquire() {
  std::unique_lock<std::mutex> lock(mu_);
  while (true) {
    auto now = std::chrono::steady_clock::now();
    double elapsed = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    tokens_ = std::min(capacity_, tokens_ + elapsed * rate_);
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    double wait_s = (1.0 - tokens_) / rate_;
    lock.unlock();
    std::this_thread::sleep_for(std::chrono::duration<double>(wait_s));
    lock.lock();
  }
}

LlmGateway::LlmGateway(ModelEndpoint endpoint, DecodingConfig cfg)
    : endpoint_(std::move(endpoint)), cfg_(std::move(cfg)) {
  endpoint_.validate();
  cfg_.validate();
  switch (endpoint_.backend) {
    case Backend::Replay:
      replay_store_ =
          std::make_unique<ResponseCache>(endpoint_.cache_path, /*writable=*/false);
      break;
    case Backend::Oracle:
      oracle_ = std::make_unique<MemorizingOracle>(endpoint_.oracle);
      break;
    case Backend::Http:
      limiter_ = std::make_unique<TokenBucket>(
          endpoint_.requests_per_second,
          std::max(1.0, endpoint_.requests_per_second));
      break;
  }
}

LlmGateway::~LlmGateway() = default;

std::string LlmGateway::complete(const ChatPrompt& prompt) {
  switch (endpoint_.backend) {
    case Backend::Http: return complete_http(prompt);
    case Backend::Replay: return complete_replay(prompt);
    case Backend::Oracle: return oracle_->respond(prompt);
  }
  throw ConfigError("unreachable backend");
}

std::string LlmGateway::complete_replay(const ChatPrompt& prompt) {
  std::string key = cache_key(endpoint_.model_name, cfg_, prompt.messages);
  auto hit = replay_store_->lookup(key);
  if (!hit) {
    throw CacheMissError("replay cache has no record for key " + key +
                         " (target " + prompt.target_key + ")");
  }
  return *hit;
}

std::string LlmGateway::complete_http(const ChatPrompt& prompt) {
  // Split scheme://host[:port] from an optional path prefix.
  std::string url = endpoint_.base_url;
  std::string host_part = url;
  std::string prefix;
  std::size_t scheme_end = url.find("://");
  if (scheme_end != std::string::npos) {
    std::size_t path_start = url.find('/', scheme_end + 3);
    if (path_start != std::string::npos) {
      host_part = url.substr(0, path_start);
      prefix = url.substr(path_start);
      while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    }
  }

  httplib::Client client(host_part);
  client.set_connection_timeout(endpoint_.timeout_s, 0);
  client.set_read_timeout(endpoint_.timeout_s, 0);

  httplib::Headers headers;
  if (!endpoint_.auth_token_env.empty()) {
    const char* token = std::getenv(endpoint_.auth_token_env.c_str());
    if (token == nullptr || *token == '\0') {
      throw ConfigError("credential environment variable " + endpoint_.auth_token_env +
                        " is not set");
    }
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }

  const std::string path = prefix + "/chat/completions";
  const std::string body = chat_request_body(endpoint_.model_name, cfg_, prompt.messages);
  debug_log("POST " + host_part + path + " body=" + body);

  std::string last_error;
  for (int attempt = 1; attempt <= endpoint_.max_attempts; ++attempt) {
    if (limiter_) limiter_->acquire();
    http_requests_.fetch_add(1);
    auto res = client.Post(path, headers, body, "application/json");
    if (!res) {
      last_error = "connection failure: " + httplib::to_string(res.error());
    } else if (res->status == 200) {
      json reply = json::parse(res->body, nullptr, false);
      if (reply.is_discarded()) throw ProtocolError("endpoint reply is not JSON");
      try {
        std::string text = reply.at("choices").at(0).at("message").at("content")
                               .get<std::string>();
        debug_log("status=200 response=" + text);
        return text;
      } catch (const json::exception& e) {
        throw ProtocolError(std::string("unexpected reply shape: ") + e.what());
      }
    } else if (res->status == 408 || res->status == 429 || res->status >= 500) {
      last_error = "status " + std::to_string(res->status);
    } else {
      throw ProtocolError("endpoint returned status " + std::to_string(res->status) +
                          ": " + res->body.substr(0, 200));
    }
    debug_log("attempt " + std::to_string(attempt) + " failed: " + last_error);
    if (attempt < endpoint_.max_attempts) {
      auto delay = std::chrono::milliseconds(endpoint_.retry_base_ms) * (1 << (attempt - 1));
      std::this_thread::sleep_for(delay);
    }
  }
  throw TransportError("exhausted " + std::to_string(endpoint_.max_attempts) +
                       " attempts against " + endpoint_.base_url + ": " + last_error);
}

std::pair<std::string, bool> LlmGateway::run_with_cache(const ChatPrompt& prompt,
                                                        ResponseCache& cache) {
  std::string key = cache_key(endpoint_.model_name, cfg_, prompt.messages);
  {
    std::unique_lock<std::mutex> lock(inflight_mu_);
    while (true) {
      if (auto hit = cache.lookup(key)) return {*hit, true};
      if (inflight_.find(key) == inflight_.end()) {
        inflight_.insert(key);
        break;
      }
      inflight_cv_.wait(lock);
    }
  }
  try {
    std::string text = complete(prompt);
    cache.append(key, text);
    std::lock_guard<std::mutex> lock(inflight_mu_);
    inflight_.erase(key);
    inflight_cv_.notify_all();
    return {text, false};
  } catch (...) {
    std::lock_guard<std::mutex> lock(inflight_mu_);
    inflight_.erase(key);
    inflight_cv_.notify_all();
    throw;
  }
}

}  // namespace recmem

#include <ctime>

#include <nlohmann/json.hpp>

#include "recmem/errors.hpp"
#include "recmem/gateway.hpp"
#include "recmem/strings.hpp"

namespace recmem {

using nlohmann::json;

ResponseCache::ResponseCache(const std::filesystem::path& path, bool writable) {
  std::ifstream in(path, std::ios::binary);
  if (in) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      json record = json::parse(line, nullptr, false);
      if (record.is_discarded() || !record.contains("key") ||
          !record.contains("response_text")) {
        throw StorageError("cache " + path.string() + " line " +
                           std::to_string(line_no) + ": malformed record");
      }
      // last-write-wins
      entries_[record["key"].get<std::string>()] =
          record["response_text"].get<std::string>();
    }
  }
  if (writable) {
    out_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::app);
    if (!*out_) throw StorageError("cannot open cache for append: " + path.string());
  }
}

std::optional<std::string> ResponseCache::lookup(const std::string& key) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::append(const std::string& key, const std::string& response_text) {
  std::lock_guard<std::mutex> lock(mu_);
  entries_[key] = response_text;
  if (out_) {
    char stamp[32];
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm);
    json record{{"created_at", stamp}, {"key", key}, {"response_text", response_text}};
    *out_ << record.dump() << '\n';
    out_->flush();
    if (!*out_) throw StorageError("cache write failed");
  }
}

std::size_t ResponseCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

}  // namespace recmem

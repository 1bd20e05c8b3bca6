#include <algorithm>
#include <cmath>

#include "recmem/errors.hpp"
#include "recmem/gateway.hpp"
#include "recmem/rng.hpp"
#include "recmem/strings.hpp"

namespace recmem {

namespace {

int kind_tag(PromptKind kind) {
  switch (kind) {
    case PromptKind::ItemProbe: return 1;
    case PromptKind::UserProbe: return 2;
    case PromptKind::InteractionProbe: return 3;
    case PromptKind::Recommendation: return 4;
  }
  return 0;
}

std::int64_t parse_key(const std::string& key) {
  auto v = parse_canonical_int(key);
  if (!v) throw ConfigError("oracle cannot parse target key '" + key + "'");
  return *v;
}

}  // namespace

MemorizingOracle::MemorizingOracle(OracleSpec spec) : spec_(std::move(spec)) {
  if (spec_.dataset == nullptr) throw ConfigError("oracle requires a dataset");
}

const std::set<std::int64_t>& MemorizingOracle::memorized_set(PromptKind kind) {
  int tag = kind_tag(kind);
  auto it = memo_.find(tag);
  if (it != memo_.end()) return it->second;

  // The pool is the full entity table (items for item probes, users for
  // everything else). A seeded permutation prefix of size round(f*n) makes a
  // full sweep come out at exactly round(f*n)/n coverage.
  std::vector<std::int64_t> pool;
  if (kind == PromptKind::ItemProbe) {
    for (const auto& item : spec_.dataset->items.items()) pool.push_back(item.id);
  } else {
    for (const auto& user : spec_.dataset->users.users()) pool.push_back(user.id);
  }
  std::sort(pool.begin(), pool.end());
  Rng rng(mix_seed(spec_.selection_seed, static_cast<std::uint64_t>(tag)));
  rng.shuffle(pool);
  auto take = static_cast<std::size_t>(std::llround(
      spec_.memorized_fraction * static_cast<double>(pool.size())));
  take = std::min(take, pool.size());
  std::set<std::int64_t> chosen(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take));
  return memo_.emplace(tag, std::move(chosen)).first->second;
}

bool MemorizingOracle::memorized(PromptKind kind, std::int64_t id) {
  std::lock_guard<std::mutex> lock(mu_);
  const auto& set = memorized_set(kind);
  return set.find(id) != set.end();
}

std::string MemorizingOracle::respond(const ChatPrompt& prompt) {
  std::lock_guard<std::mutex> lock(mu_);
  std::int64_t target = parse_key(prompt.target_key);
  const auto& known = memorized_set(prompt.kind);
  bool is_memorized = known.find(target) != known.end();

  switch (prompt.kind) {
    case PromptKind::ItemProbe: {
      const Item* item = spec_.dataset->items.find(target);
      if (item == nullptr || !is_memorized) return "Unknown";
      return std::to_string(item->id) + "::" + item->raw_value;
    }
    case PromptKind::UserProbe: {
      const User* user = spec_.dataset->users.find(target);
      if (user == nullptr || !is_memorized) return "Unknown";
      return std::to_string(user->id) + "::" + user->raw_value;
    }
    case PromptKind::InteractionProbe: {
      if (!by_user_) by_user_ = interactions_by_user(spec_.dataset->interactions);
      auto it = by_user_->find(target);
      // Shot pairs sit between the system message and the trailing query.
      std::size_t k = (prompt.messages.size() - 2) / 2;
      if (it == by_user_->end() || it->second.size() < k + 1) return "Unknown";
      std::int64_t truth = it->second[k].item_id;
      if (is_memorized) return prompt.target_key + "::" + std::to_string(truth);
      return prompt.target_key + "::" + std::to_string(truth + 1);
    }
    case PromptKind::Recommendation: {
      if (!is_memorized) {
        std::string out;
        for (int i = 1; i <= 50; ++i) {
          out += std::to_string(i) + ". Nonexistent Movie #" + std::to_string(i) + "\n";
        }
        return out;
      }
      if (spec_.split == nullptr) {
        throw ConfigError("oracle recommendation prompts require a split");
      }
      std::set<std::int64_t> train_ids, test_ids;
      std::vector<std::int64_t> test_order;
      for (const auto& x : spec_.split->train) {
        if (x.user_id == target) train_ids.insert(x.item_id);
      }
      for (const auto& x : spec_.split->test) {
        if (x.user_id == target && test_ids.insert(x.item_id).second) {
          test_order.push_back(x.item_id);
        }
      }
      // Test items first (a perfect recommender), then unseen catalog
      // titles as filler up to 50 lines.
      std::vector<std::string> titles;
      for (auto id : test_order) {
        const Item* item = spec_.dataset->items.find(id);
        if (item != nullptr && titles.size() < 50) titles.push_back(item->title);
      }
      for (const auto& item : spec_.dataset->items.items()) {
        if (titles.size() >= 50) break;
        if (train_ids.count(item.id) || test_ids.count(item.id)) continue;
        titles.push_back(item.title);
      }
      std::string out;
      for (std::size_t i = 0; i < titles.size(); ++i) {
        out += std::to_string(i + 1) + ". " + titles[i] + "\n";
      }
      return out;
    }
  }
  return "Unknown";
}

}  // namespace recmem

#include "recmem/probe.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "recmem/errors.hpp"
#include "recmem/prompt.hpp"
#include "recmem/strings.hpp"

namespace recmem {

const char* entity_kind_name(EntityKind kind) {
  switch (kind) {
    case EntityKind::Item: return "item";
    case EntityKind::User: return "user";
    case EntityKind::Interaction: return "interaction";
  }
  return "item";
}

EntityKind entity_kind_from_name(const std::string& name) {
  if (name == "item" || name == "items") return EntityKind::Item;
  if (name == "user" || name == "users") return EntityKind::User;
  if (name == "interaction" || name == "interactions") return EntityKind::Interaction;
  throw ConfigError("unknown entity kind '" + name + "'");
}

std::string normalize_response(std::string_view text) {
  std::string s(trim(text));
  constexpr std::string_view kEcho = "Input: ";
  if (s.rfind(kEcho, 0) == 0) s.erase(0, kEcho.size());
  std::size_t brk = s.find_first_of("\r\n");
  if (brk != std::string::npos) s.resize(brk);
  s = collapse_spaces(s);
  return std::string(trim(s));
}

bool match_item(const std::string& normalized_response, const Item& item) {
  // §-level criterion is MovieID::Title; a trailing ::genres field is
  // tolerated because the probe elicits full records.
  std::string expected = std::to_string(item.id) + "::" + item.title;
  if (normalized_response == expected) return true;
  return normalized_response.size() > expected.size() + 2 &&
         normalized_response.compare(0, expected.size(), expected) == 0 &&
         normalized_response.compare(expected.size(), 2, "::") == 0;
}

bool match_user(const std::string& normalized_response, const User& user) {
  return normalized_response == std::to_string(user.id) + "::" + user.raw_value;
}

bool match_interaction(const std::string& normalized_response, std::int64_t user_id,
                       std::int64_t next_item_id) {
  return normalized_response ==
         std::to_string(user_id) + "::" + std::to_string(next_item_id);
}

double coverage(std::size_t matched, std::size_t total) {
  if (total == 0) throw ConfigError("coverage undefined for zero probes");
  return static_cast<double>(matched) / static_cast<double>(total);
}

namespace {

struct ProbeTask {
  std::string entity_key;
  std::string expected;
  ChatPrompt prompt;
  std::int64_t entity_id = 0;
  std::int64_t next_item_id = 0;  // interactions only
};

std::vector<ProbeTask> build_tasks(EntityKind kind, const MovieLensDataset& dataset,
                                   const CampaignOptions& options) {
  std::vector<ProbeTask> tasks;
  switch (kind) {
    case EntityKind::Item: {
      std::vector<const Item*> sorted;
      for (const auto& item : dataset.items.items()) sorted.push_back(&item);
      std::sort(sorted.begin(), sorted.end(),
                [](const Item* a, const Item* b) { return a->id < b->id; });
      for (const Item* item : sorted) {
        ProbeTask t;
        t.entity_id = item->id;
        t.entity_key = std::to_string(item->id);
        t.expected = std::to_string(item->id) + "::" + item->title;
        auto shots = select_shots(dataset.items, item->id, options.shots, options.seed);
        t.prompt = build_entity_probe(PromptKind::ItemProbe, shots, item->id);
        tasks.push_back(std::move(t));
        if (options.limit && tasks.size() >= *options.limit) return tasks;
      }
      break;
    }
    case EntityKind::User: {
      std::vector<const User*> sorted;
      for (const auto& user : dataset.users.users()) sorted.push_back(&user);
      std::sort(sorted.begin(), sorted.end(),
                [](const User* a, const User* b) { return a->id < b->id; });
      for (const User* user : sorted) {
        ProbeTask t;
        t.entity_id = user->id;
        t.entity_key = std::to_string(user->id);
        t.expected = std::to_string(user->id) + "::" + user->raw_value;
        auto shots = select_shots(dataset.users, user->id, options.shots, options.seed);
        t.prompt = build_entity_probe(PromptKind::UserProbe, shots, user->id);
        tasks.push_back(std::move(t));
        if (options.limit && tasks.size() >= *options.limit) return tasks;
      }
      break;
    }
    case EntityKind::Interaction: {
      // One probe per user by default: predict the item right after the
      // k-interaction prefix. Sliding mode probes every prefix window.
      // Users whose history cannot yield a ground truth are excluded.
      std::size_t k = options.shots;
      if (k == 0) throw ConfigError("interaction probes require at least one shot");
      auto by_user = interactions_by_user(dataset.interactions);
      for (const auto& [uid, rows] : by_user) {
        if (rows.size() < k + 1) continue;
        std::vector<std::int64_t> history;
        history.reserve(rows.size());
        for (const auto& x : rows) history.push_back(x.item_id);
        std::size_t window_count = options.sliding_window ? rows.size() - k : 1;
        for (std::size_t w = 0; w < window_count; ++w) {
          ProbeTask t;
          t.entity_id = uid;
          t.entity_key = options.sliding_window
                             ? std::to_string(uid) + "@" + std::to_string(w)
                             : std::to_string(uid);
          t.next_item_id = history[w + k];
          t.expected = std::to_string(uid) + "::" + std::to_string(t.next_item_id);
          std::vector<std::int64_t> prefix(history.begin() + static_cast<std::ptrdiff_t>(w),
                                           history.begin() + static_cast<std::ptrdiff_t>(w + k));
          t.prompt = build_interaction_probe(uid, prefix, k);
          tasks.push_back(std::move(t));
          if (options.limit && tasks.size() >= *options.limit) return tasks;
        }
      }
      break;
    }
  }
  return tasks;
}

}  // namespace

CoverageReport run_campaign(EntityKind kind, const MovieLensDataset& dataset,
                            LlmGateway& gateway, const CampaignOptions& options) {
  auto tasks = build_tasks(kind, dataset, options);
  if (tasks.empty()) throw ConfigError("campaign has no probeable entities");

  std::vector<ProbeOutcome> outcomes(tasks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex err_mu;
  std::exception_ptr first_error;
  std::size_t first_error_index = tasks.size();

  auto execute = [&](std::size_t i) {
    const ProbeTask& task = tasks[i];
    ProbeOutcome outcome;
    outcome.kind = kind;
    outcome.entity_key = task.entity_key;
    outcome.expected = task.expected;
    try {
      std::string response = options.cache
                                 ? gateway.run_with_cache(task.prompt, *options.cache).first
                                 : gateway.complete(task.prompt);
      outcome.response = response;
      std::string normalized = normalize_response(response);
      switch (kind) {
        case EntityKind::Item:
          outcome.matched = match_item(normalized, *dataset.items.find(task.entity_id));
          break;
        case EntityKind::User:
          outcome.matched = match_user(normalized, *dataset.users.find(task.entity_id));
          break;
        case EntityKind::Interaction:
          outcome.matched =
              match_interaction(normalized, task.entity_id, task.next_item_id);
          break;
      }
    } catch (const Error& e) {
      if (!options.allow_partial) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (i < first_error_index) {
          first_error_index = i;
          first_error = std::current_exception();
        }
        stop.store(true);
        return;
      }
      outcome.errored = true;
      outcome.error = e.what();
    }
    outcomes[i] = std::move(outcome);
  };

  std::size_t workers = std::max<std::size_t>(1, options.workers);
  if (workers == 1) {
    for (std::size_t i = 0; i < tasks.size() && !stop.load(); ++i) execute(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (!stop.load()) {
          std::size_t i = next.fetch_add(1);
          if (i >= tasks.size()) break;
          execute(i);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  CoverageReport report;
  report.model = gateway.endpoint().model_name;
  report.kind = kind;
  report.per_entity = std::move(outcomes);
  for (const auto& outcome : report.per_entity) {
    if (outcome.errored) {
      ++report.errors;
      continue;
    }
    ++report.total;
    if (outcome.matched) ++report.matched;
  }
  report.partial = report.errors > 0;
  report.coverage = coverage(report.matched, report.total);
  return report;
}

std::map<std::string, double> tier_coverage(const CoverageReport& report,
                                            const PopularityTiers& tiers) {
  if (report.kind != EntityKind::Item) {
    throw ConfigError("tier coverage is defined for item campaigns only");
  }
  struct Bucket {
    std::size_t total = 0, matched = 0;
  };
  auto tally = [&](const std::set<std::int64_t>& members) {
    Bucket b;
    for (const auto& outcome : report.per_entity) {
      if (outcome.errored) continue;
      auto id = parse_canonical_int(outcome.entity_key);
      if (!id || members.find(*id) == members.end()) continue;
      ++b.total;
      if (outcome.matched) ++b.matched;
    }
    return b;
  };
  std::map<std::string, double> out;
  const std::pair<const char*, const std::set<std::int64_t>*> bands[] = {
      {"top", &tiers.top}, {"middle", &tiers.middle}, {"bottom", &tiers.bottom}};
  for (const auto& [name, members] : bands) {
    Bucket b = tally(*members);
    if (b.total > 0) out[name] = coverage(b.matched, b.total);
  }
  return out;
}

}  // namespace recmem

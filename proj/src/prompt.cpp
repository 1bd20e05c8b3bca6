#include "recmem/prompt.hpp"

#include <algorithm>

#include "recmem/errors.hpp"
#include "recmem/prompt_templates.hpp"
#include "recmem/rng.hpp"
#include "recmem/strings.hpp"

namespace recmem {

const char* role_name(Role role) {
  switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "user";
}

const char* prompt_kind_name(PromptKind kind) {
  switch (kind) {
    case PromptKind::ItemProbe: return "item_probe";
    case PromptKind::UserProbe: return "user_probe";
    case PromptKind::InteractionProbe: return "interaction_probe";
    case PromptKind::Recommendation: return "recommendation";
  }
  return "item_probe";
}

namespace {

template <typename Entity>
ShotSet select_from(const std::vector<Entity>& pool, std::int64_t target_id,
                    std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ConfigError("shot count must be at least 1");
  std::vector<std::size_t> candidates;
  candidates.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (pool[i].id != target_id) candidates.push_back(i);
  }
  if (candidates.size() < n) {
    throw ConfigError("shot pool too small: need " + std::to_string(n) + ", have " +
                      std::to_string(candidates.size()));
  }
  Rng rng(seed);
  rng.shuffle(candidates);
  ShotSet set;
  for (std::size_t i = 0; i < n; ++i) {
    const Entity& e = pool[candidates[i]];
    set.shots.push_back({std::to_string(e.id), e.raw_value});
    set.source_ids.push_back(e.id);
  }
  return set;
}

}  // namespace

ShotSet select_shots(const ItemCatalog& pool, std::int64_t target_id, std::size_t n,
                     std::uint64_t seed) {
  return select_from(pool.items(), target_id, n, seed);
}

ShotSet select_shots(const UserTable& pool, std::int64_t target_id, std::size_t n,
                     std::uint64_t seed) {
  return select_from(pool.users(), target_id, n, seed);
}

ChatPrompt build_entity_probe(PromptKind kind, const ShotSet& shots,
                              std::int64_t target_id) {
  if (kind != PromptKind::ItemProbe && kind != PromptKind::UserProbe) {
    throw ConfigError("entity probe kind must be item_probe or user_probe");
  }
  if (shots.shots.empty()) throw ConfigError("entity probe requires at least one shot");
  ChatPrompt prompt;
  prompt.kind = kind;
  prompt.target_key = std::to_string(target_id);
  prompt.messages.push_back({Role::System, std::string(kEntityProbeSystem)});
  for (const Shot& shot : shots.shots) {
    prompt.messages.push_back({Role::User, "Input: " + shot.key + "::"});
    prompt.messages.push_back({Role::Assistant, shot.key + "::" + shot.value});
  }
  prompt.messages.push_back({Role::User, "Input: " + prompt.target_key + "::"});
  return prompt;
}

ChatPrompt build_interaction_probe(std::int64_t user_id,
                                   const std::vector<std::int64_t>& history_item_ids,
                                   std::size_t k) {
  if (k == 0) throw ConfigError("interaction probe requires at least one shot");
  if (history_item_ids.size() < k) {
    throw ConfigError("history shorter than requested shot count");
  }
  ChatPrompt prompt;
  prompt.kind = PromptKind::InteractionProbe;
  prompt.target_key = std::to_string(user_id);
  prompt.messages.push_back({Role::System, std::string(kInteractionProbeSystem)});
  for (std::size_t i = 0; i < k; ++i) {
    prompt.messages.push_back({Role::User, prompt.target_key + "::"});
    prompt.messages.push_back(
        {Role::Assistant, prompt.target_key + "::" + std::to_string(history_item_ids[i])});
  }
  prompt.messages.push_back({Role::User, prompt.target_key + "::"});
  return prompt;
}

ChatPrompt build_recommendation_prompt(std::int64_t user_id,
                                       const std::vector<std::string>& train_titles) {
  if (train_titles.empty()) throw ConfigError("recommendation prompt requires history");
  std::string history;
  for (std::size_t i = 0; i < train_titles.size(); ++i) {
    if (i > 0) history += ", ";
    history += train_titles[i];
  }
  ChatPrompt prompt;
  prompt.kind = PromptKind::Recommendation;
  prompt.target_key = std::to_string(user_id);
  prompt.messages.push_back({Role::System, std::string(kRecommendationSystem)});
  prompt.messages.push_back(
      {Role::User, substitute(kRecommendationUserTemplate,
                              {{"user_id", prompt.target_key},
                               {"training_history_str", history}})});
  return prompt;
}

}  // namespace recmem

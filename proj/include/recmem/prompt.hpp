#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "recmem/dataset.hpp"

namespace recmem {

enum class Role { System, User, Assistant };

const char* role_name(Role role);  // "system" / "user" / "assistant"

struct ChatMessage {
  Role role = Role::User;
  std::string content;
};

enum class PromptKind { ItemProbe, UserProbe, InteractionProbe, Recommendation };

const char* prompt_kind_name(PromptKind kind);

// An ordered chat transcript ready for a model backend. target_key is the
// queried key of the trailing user message (entity id, or user id for
// interaction/recommendation prompts) in decimal form.
struct ChatPrompt {
  std::vector<ChatMessage> messages;
  PromptKind kind = PromptKind::ItemProbe;
  std::string target_key;
};

// Worked key->value example pairs prefixed to a probe.
struct Shot {
  std::string key;
  std::string value;
};

struct ShotSet {
  std::vector<Shot> shots;
  std::vector<std::int64_t> source_ids;
};

// Draws n entities by a seeded permutation of the pool minus the target.
// Deterministic for fixed (pool order, target, n, seed); throws ConfigError
// when fewer than n candidates exist.
ShotSet select_shots(const ItemCatalog& pool, std::int64_t target_id, std::size_t n,
                     std::uint64_t seed);
ShotSet select_shots(const UserTable& pool, std::int64_t target_id, std::size_t n,
                     std::uint64_t seed);

// Few-shot item/user extraction probe. Each shot expands to the user message
// "Input: {id}::" and the assistant message "{id}::{raw_value}"; the final
// user message queries the target id. kind must be ItemProbe or UserProbe.
ChatPrompt build_entity_probe(PromptKind kind, const ShotSet& shots,
                              std::int64_t target_id);

// Next-interaction probe. The k shots come from the target user's own history
// prefix: user "{uid}::" / assistant "{uid}::{movie_id}" for history[0..k);
// the model is expected to continue with history[k]. Requires 1 <= k <=
// history size; whether a ground-truth next item exists (history size > k) is
// the caller's concern.
ChatPrompt build_interaction_probe(std::int64_t user_id,
                                   const std::vector<std::int64_t>& history_item_ids,
                                   std::size_t k);

// Zero-shot recommendation prompt; titles are joined with ", " into
// {training_history_str}.
ChatPrompt build_recommendation_prompt(std::int64_t user_id,
                                       const std::vector<std::string>& train_titles);

}  // namespace recmem

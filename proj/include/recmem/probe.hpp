#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "recmem/dataset.hpp"
#include "recmem/gateway.hpp"

namespace recmem {

enum class EntityKind { Item, User, Interaction };

const char* entity_kind_name(EntityKind kind);
EntityKind entity_kind_from_name(const std::string& name);

struct ProbeOutcome {
  EntityKind kind = EntityKind::Item;
  std::string entity_key;
  std::string expected;  // the exact string the match rule requires
  std::string response;  // raw model response
  bool matched = false;
  bool errored = false;
  std::string error;
};

struct CoverageReport {
  std::string model;
  EntityKind kind = EntityKind::Item;
  std::size_t total = 0;    // judged probes (errored ones excluded)
  std::size_t matched = 0;
  double coverage = 0.0;    // matched / total
  std::size_t errors = 0;
  bool partial = false;
  std::vector<ProbeOutcome> per_entity;
  std::map<std::string, double> tier_breakdown;  // "top"/"middle"/"bottom" when computed
};

// Trims, drops a leading "Input: " echo, truncates at the first line break,
// and collapses runs of internal spaces.
std::string normalize_response(std::string_view text);

// Exact-match verdicts. Items require "{id}::{title}" and tolerate an extra
// "::genres" tail; users require the full attribute string; interactions
// require "{user_id}::{next_item_id}".
bool match_item(const std::string& normalized_response, const Item& item);
bool match_user(const std::string& normalized_response, const User& user);
bool match_interaction(const std::string& normalized_response, std::int64_t user_id,
                       std::int64_t next_item_id);

// matched / total; throws ConfigError when total is zero.
double coverage(std::size_t matched, std::size_t total);

struct CampaignOptions {
  std::size_t shots = 2;   // few-shot pairs; also the history prefix length k
  std::optional<std::size_t> limit;
  std::size_t workers = 4;
  std::uint64_t seed = 42;
  bool sliding_window = false;  // interactions: probe every k-prefix window
  bool allow_partial = false;   // record transport errors instead of aborting
  ResponseCache* cache = nullptr;
};

// Sweeps one probe kind across the dataset: builds each probe, obtains a
// response through the gateway (cached when a cache is supplied, which also
// makes reruns resumable), judges the match, and aggregates coverage.
// Entities are processed in ascending id order; outcomes are deterministic
// regardless of worker interleaving.
CoverageReport run_campaign(EntityKind kind, const MovieLensDataset& dataset,
                            LlmGateway& gateway, const CampaignOptions& options);

// Item coverage restricted to each popularity tier; tiers with no judged
// members are absent from the result.
std::map<std::string, double> tier_coverage(const CoverageReport& report,
                                            const PopularityTiers& tiers);

}  // namespace recmem

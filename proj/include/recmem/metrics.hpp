#pragma once

#include <cstdint>
#include <set>
#include <vector>

namespace recmem {

struct RankedEntry {
  int rank = 0;  // 1-based, consecutive
  std::int64_t item_id = 0;
  double score = 0.0;  // non-increasing down the list
};

// Top-k recommendations for one user. Never contains an item from the user's
// training set, never contains duplicates.
struct RankedList {
  std::int64_t user_id = 0;
  std::vector<RankedEntry> entries;
  int k = 0;  // requested length; entries may be shorter
};

// 1 if any of the top-k items is relevant, else 0.
int hr_at_k(const RankedList& ranked, const std::set<std::int64_t>& relevant, int k);

// Binary-relevance nDCG with 1/log2(rank+1) discounts; the ideal DCG is
// truncated at min(k, |relevant|). relevant must be non-empty.
double ndcg_at_k(const RankedList& ranked, const std::set<std::int64_t>& relevant, int k);

}  // namespace recmem

#include "recmem/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "recmem/errors.hpp"

namespace recmem {

int hr_at_k(const RankedList& ranked, const std::set<std::int64_t>& relevant, int k) {
  if (k < 1) throw ConfigError("hr_at_k requires k >= 1");
  int limit = std::min<int>(k, static_cast<int>(ranked.entries.size()));
  for (int r = 0; r < limit; ++r) {
    if (relevant.count(ranked.entries[static_cast<std::size_t>(r)].item_id)) return 1;
  }
  return 0;
}

double ndcg_at_k(const RankedList& ranked, const std::set<std::int64_t>& relevant, int k) {
  if (k < 1) throw ConfigError("ndcg_at_k requires k >= 1");
  if (relevant.empty()) throw ConfigError("ndcg_at_k requires a non-empty relevant set");
  double dcg = 0.0;
  int limit = std::min<int>(k, static_cast<int>(ranked.entries.size()));
  for (int r = 1; r <= limit; ++r) {
    if (relevant.count(ranked.entries[static_cast<std::size_t>(r - 1)].item_id)) {
      dcg += 1.0 / std::log2(static_cast<double>(r) + 1.0);
    }
  }
  double idcg = 0.0;
  int ideal = std::min<int>(k, static_cast<int>(relevant.size()));
  for (int r = 1; r <= ideal; ++r) {
    idcg += 1.0 / std::log2(static_cast<double>(r) + 1.0);
  }
  return dcg / idcg;
}

}  // namespace recmem

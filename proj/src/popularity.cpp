#include <algorithm>
#include <cmath>
#include <sstream>

#include "recmem/dataset.hpp"
#include "recmem/strings.hpp"

namespace recmem {

PopularityTiers popularity_tiers(const InteractionLog& log, const ItemCatalog& catalog) {
  PopularityTiers tiers;
  for (const auto& item : catalog.items()) tiers.counts[item.id] = 0;
  for (const auto& x : log) {
    auto it = tiers.counts.find(x.item_id);
    if (it != tiers.counts.end()) ++it->second;
  }

  std::vector<std::pair<std::int64_t, std::size_t>> ranked(tiers.counts.begin(),
                                                           tiers.counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  std::size_t n = ranked.size();
  std::size_t active = 0;  // items that actually appear in the log
  for (const auto& [id, count] : ranked) {
    if (count > 0) ++active;
  }
  std::size_t band = 0;
  if (n > 0) {
    band = static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(active)));
    band = std::max<std::size_t>(band, 1);
    band = std::min(band, n);
  }

  std::size_t top_end = band;
  std::size_t bottom_begin = std::max(band, n - band);
  std::size_t mid_begin = (n > band) ? (n - band) / 2 : n;
  std::size_t mid_end = std::min(mid_begin + band, n);
  for (std::size_t r = 0; r < n; ++r) {
    if (r < top_end) {
      tiers.top.insert(ranked[r].first);
    } else if (r >= bottom_begin) {
      tiers.bottom.insert(ranked[r].first);
    } else if (r >= mid_begin && r < mid_end) {
      tiers.middle.insert(ranked[r].first);
    }
  }
  return tiers;
}

std::string dataset_summary_text(const MovieLensDataset& dataset,
                                 const PopularityTiers& tiers) {
  auto tier_stats = [&](const std::set<std::int64_t>& tier) {
    std::size_t lo = 0, hi = 0;
    bool first = true;
    for (auto id : tier) {
      std::size_t c = tiers.counts.at(id);
      if (first) {
        lo = hi = c;
        first = false;
      } else {
        lo = std::min(lo, c);
        hi = std::max(hi, c);
      }
    }
    std::ostringstream os;
    os << "size=" << tier.size();
    if (!tier.empty()) os << " count_range=[" << lo << "," << hi << "]";
    return os.str();
  };

  std::ostringstream os;
  os << "dataset summary\n";
  os << "  items:        " << dataset.items.size() << "\n";
  os << "  users:        " << dataset.users.size() << "\n";
  os << "  interactions: " << dataset.interactions.size() << "\n";
  os << "  tiers (by interaction count)\n";
  os << "    top:    " << tier_stats(tiers.top) << "\n";
  os << "    middle: " << tier_stats(tiers.middle) << "\n";
  os << "    bottom: " << tier_stats(tiers.bottom) << "\n";
  return os.str();
}

}  // namespace recmem

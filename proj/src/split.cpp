#include <algorithm>
#include <cmath>

#include "recmem/dataset.hpp"
#include "recmem/errors.hpp"
#include "recmem/rng.hpp"

namespace recmem {

std::map<std::int64_t, std::vector<Interaction>> interactions_by_user(
    const InteractionLog& log) {
  std::map<std::int64_t, std::vector<Interaction>> by_user;
  for (const auto& x : log) by_user[x.user_id].push_back(x);
  for (auto& [uid, rows] : by_user) {
    std::stable_sort(rows.begin(), rows.end(), [](const Interaction& a, const Interaction& b) {
      if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
      return a.item_id < b.item_id;
    });
  }
  return by_user;
}

SplitLog split_leave_n_out(const InteractionLog& log, double ratio, SplitOrder order,
                           std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ConfigError("split ratio must be in (0,1)");
  }
  SplitLog out;
  out.ratio = ratio;
  out.order = order;
  out.seed = seed;
  auto by_user = interactions_by_user(log);
  for (auto& [uid, rows] : by_user) {
    if (order == SplitOrder::SeededRandom) {
      Rng rng(mix_seed(seed, static_cast<std::uint64_t>(uid)));
      rng.shuffle(rows);
    }
    auto n_train = static_cast<std::size_t>(
        std::ceil(ratio * static_cast<double>(rows.size())));
    n_train = std::min(n_train, rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      (i < n_train ? out.train : out.test).push_back(rows[i]);
    }
  }
  return out;
}

}  // namespace recmem

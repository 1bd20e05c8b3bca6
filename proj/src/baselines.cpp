#include "recmem/baselines.hpp"

#include <algorithm>
#include <numeric>

#include "recmem/errors.hpp"
#include "recmem/rng.hpp"

namespace recmem {

RankedList rank_top_k(const InteractionMatrix& train, int user_index,
                      std::span<const double> scores, int k) {
  if (k < 1) throw ConfigError("rank_top_k requires k >= 1");
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[static_cast<std::size_t>(a)] != scores[static_cast<std::size_t>(b)]) {
      return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
    }
    return train.item_id(a) < train.item_id(b);
  });
  RankedList list;
  list.user_id = train.user_id(user_index);
  list.k = k;
  for (int i : order) {
    if (static_cast<int>(list.entries.size()) >= k) break;
    if (train.user_has_item(user_index, i)) continue;
    list.entries.push_back({static_cast<int>(list.entries.size()) + 1, train.item_id(i),
                            scores[static_cast<std::size_t>(i)]});
  }
  return list;
}

RandomRanker::RandomRanker(const InteractionMatrix& train, std::uint64_t seed)
    : train_(train), seed_(seed) {}

std::vector<double> RandomRanker::score(int user_index) const {
  Rng rng(mix_seed(seed_, static_cast<std::uint64_t>(train_.user_id(user_index))));
  std::vector<double> scores(static_cast<std::size_t>(train_.n_items()));
  for (double& s : scores) s = rng.uniform();
  return scores;
}

MostPopRanker::MostPopRanker(const InteractionMatrix& train) {
  if (train.nnz() == 0) throw ConfigError("mostpop requires a non-empty training set");
  auto counts = train.item_counts();
  counts_.assign(counts.begin(), counts.end());
}

std::vector<double> MostPopRanker::score(int user_index) const {
  (void)user_index;
  return counts_;
}

UserKnnRanker::UserKnnRanker(const InteractionMatrix& train, int k_neighbors)
    : train_(train), neighbors_(topk_cosine_neighbors(train, Axis::Users, k_neighbors)) {}

std::vector<double> UserKnnRanker::score(int user_index) const {
  std::vector<double> scores(static_cast<std::size_t>(train_.n_items()), 0.0);
  if (train_.user_row(user_index).empty()) return {};  // cold user
  for (const Neighbor& nb : neighbors_[static_cast<std::size_t>(user_index)]) {
    for (const auto& [i, r] : train_.user_row(nb.index)) {
      scores[static_cast<std::size_t>(i)] += nb.sim * r;
    }
  }
  return scores;
}

ItemKnnRanker::ItemKnnRanker(const InteractionMatrix& train, int k_neighbors)
    : train_(train) {
  auto topk = topk_cosine_neighbors(train, Axis::Items, k_neighbors);
  reverse_.resize(static_cast<std::size_t>(train.n_items()));
  for (int i = 0; i < train.n_items(); ++i) {
    for (const Neighbor& nb : topk[static_cast<std::size_t>(i)]) {
      reverse_[static_cast<std::size_t>(nb.index)].emplace_back(i, nb.sim);
    }
  }
}

std::vector<double> ItemKnnRanker::score(int user_index) const {
  if (train_.user_row(user_index).empty()) return {};  // cold user
  std::vector<double> scores(static_cast<std::size_t>(train_.n_items()), 0.0);
  for (const auto& [j, r] : train_.user_row(user_index)) {
    (void)r;  // similarity-sum scoring; ratings already shaped the similarities
    for (const auto& [i, sim] : reverse_[static_cast<std::size_t>(j)]) {
      scores[static_cast<std::size_t>(i)] += sim;
    }
  }
  return scores;
}

}  // namespace recmem

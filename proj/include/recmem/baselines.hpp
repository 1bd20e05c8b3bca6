#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "recmem/kernels.hpp"
#include "recmem/matrix.hpp"
#include "recmem/metrics.hpp"

namespace recmem {

// A trained recommender over a fixed training matrix. score() returns one
// value per dense item index; items the user already interacted with are
// filtered later, at ranking time.
class Ranker {
 public:
  virtual ~Ranker() = default;
  virtual std::vector<double> score(int user_index) const = 0;
  virtual std::string name() const = 0;
};

// Highest-score items first, ties by ascending external item id, training
// items excluded.
RankedList rank_top_k(const InteractionMatrix& train, int user_index,
                      std::span<const double> scores, int k);

// Seeded uniform scores, independent per (seed, user id).
class RandomRanker : public Ranker {
 public:
  RandomRanker(const InteractionMatrix& train, std::uint64_t seed);
  std::vector<double> score(int user_index) const override;
  std::string name() const override { return "random"; }

 private:
  const InteractionMatrix& train_;
  std::uint64_t seed_;
};

// score(i) = training interaction count of i; identical ranking for every
// user before seen-item filtering.
class MostPopRanker : public Ranker {
 public:
  explicit MostPopRanker(const InteractionMatrix& train);
  std::vector<double> score(int user_index) const override;
  std::string name() const override { return "mostpop"; }
  const std::vector<double>& popularity() const { return counts_; }

 private:
  std::vector<double> counts_;
};

// Cosine user-user KNN on raw ratings: score(i) = sum over the user's top-k
// positive-similarity neighbors v of sim(u,v) * r_vi. A user with no
// training interactions yields empty scores; callers fall back to MostPop.
class UserKnnRanker : public Ranker {
 public:
  UserKnnRanker(const InteractionMatrix& train, int k_neighbors);
  std::vector<double> score(int user_index) const override;
  std::string name() const override { return "userknn"; }

 private:
  const InteractionMatrix& train_;
  std::vector<std::vector<Neighbor>> neighbors_;
};

// Cosine item-item KNN on raw ratings: score(i) = sum of sim(i,j) over the
// user's rated items j that appear in i's top-k neighbor list.
class ItemKnnRanker : public Ranker {
 public:
  ItemKnnRanker(const InteractionMatrix& train, int k_neighbors);
  std::vector<double> score(int user_index) const override;
  std::string name() const override { return "itemknn"; }

 private:
  const InteractionMatrix& train_;
  // reverse adjacency: for each j, the items i whose top-k list contains j
  std::vector<std::vector<std::pair<int, double>>> reverse_;
};

}  // namespace recmem

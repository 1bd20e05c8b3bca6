#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "recmem/kernels.hpp"
#include "recmem/rng.hpp"

using namespace recmem;

namespace {

// Random sparse rating log with the given shape and density.
InteractionLog random_log(int n_users, int n_items, double density, std::uint64_t seed) {
  Rng rng(seed);
  InteractionLog log;
  for (int u = 1; u <= n_users; ++u) {
    for (int i = 1; i <= n_items; ++i) {
      if (rng.uniform() < density) {
        log.push_back({u, i, static_cast<int>(rng.bounded(5)) + 1,
                       static_cast<std::int64_t>(1000 + log.size())});
      }
    }
  }
  return log;
}

std::vector<double> dense_matrix(const InteractionMatrix& m, bool binarize) {
  std::vector<double> x(static_cast<std::size_t>(m.n_users()) * m.n_items(), 0.0);
  for (int u = 0; u < m.n_users(); ++u) {
    for (const auto& [i, r] : m.user_row(u)) {
      x[static_cast<std::size_t>(u) * m.n_items() + i] = binarize ? 1.0 : r;
    }
  }
  return x;
}

}  // namespace

TEST_CASE("gram matrix: serial and OpenMP kernels agree with a dense oracle") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    InteractionMatrix m = InteractionMatrix::from_log(random_log(40, 30, 0.25, seed));
    for (bool binarize : {false, true}) {
      auto serial = gram_matrix_serial(m, binarize);
      auto parallel = gram_matrix(m, binarize);
      REQUIRE(serial.size() == parallel.size());

      // dense oracle: G = X^T X by definition
      auto x = dense_matrix(m, binarize);
      std::size_t n = static_cast<std::size_t>(m.n_items());
      for (int i = 0; i < m.n_items(); ++i) {
        for (int j = 0; j < m.n_items(); ++j) {
          double expected = 0.0;
          for (int u = 0; u < m.n_users(); ++u) {
            expected += x[static_cast<std::size_t>(u) * n + i] *
                        x[static_cast<std::size_t>(u) * n + j];
          }
          CHECK(std::abs(serial[i * n + j] - expected) <= 1e-12);
          CHECK(std::abs(parallel[i * n + j] - expected) <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("top-k cosine: serial and OpenMP kernels agree") {
  for (std::uint64_t seed : {4ull, 5ull}) {
    InteractionMatrix m = InteractionMatrix::from_log(random_log(35, 28, 0.3, seed));
    for (Axis axis : {Axis::Users, Axis::Items}) {
      for (int k : {3, 10, 100}) {
        auto serial = topk_cosine_neighbors_serial(m, axis, k);
        auto parallel = topk_cosine_neighbors(m, axis, k);
        REQUIRE(serial.size() == parallel.size());
        for (std::size_t r = 0; r < serial.size(); ++r) {
          REQUIRE(serial[r].size() == parallel[r].size());
          for (std::size_t j = 0; j < serial[r].size(); ++j) {
            CHECK(serial[r][j].index == parallel[r][j].index);
            CHECK(std::abs(serial[r][j].sim - parallel[r][j].sim) <= 1e-12);
          }
        }
      }
    }
  }
}

TEST_CASE("top-k cosine: caps at k, keeps positives only, skips self") {
  InteractionMatrix m = InteractionMatrix::from_log(random_log(25, 20, 0.35, 9));
  auto neighbors = topk_cosine_neighbors(m, Axis::Users, 5);
  for (std::size_t r = 0; r < neighbors.size(); ++r) {
    CHECK(neighbors[r].size() <= 5);
    double prev = 2.0;
    for (const auto& nb : neighbors[r]) {
      CHECK(nb.index != static_cast<int>(r));
      CHECK(nb.sim > 0.0);
      CHECK(nb.sim <= 1.0 + 1e-12);
      CHECK(nb.sim <= prev + 1e-15);  // non-increasing
      prev = nb.sim;
    }
  }
}

TEST_CASE("cosine similarity: identical rows score 1, disjoint rows are dropped") {
  InteractionLog log{
      {1, 1, 5, 10}, {1, 2, 3, 11},  // users 1 and 2 identical
      {2, 1, 5, 12}, {2, 2, 3, 13},
      {3, 3, 4, 14},                 // user 3 orthogonal to both
  };
  InteractionMatrix m = InteractionMatrix::from_log(log);
  auto neighbors = topk_cosine_neighbors(m, Axis::Users, 10);
  REQUIRE(neighbors[0].size() == 1);
  CHECK(neighbors[0][0].index == 1);
  CHECK(neighbors[0][0].sim == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(neighbors[2].empty());
}

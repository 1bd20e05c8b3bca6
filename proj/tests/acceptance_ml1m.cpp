// Acceptance criteria that require the genuine MovieLens-1M files. Looks for
// them under $RECMEM_ML1M_DIR, then <repo>/data/ml-1m. Exits 77 (ctest SKIP)
// when the dataset is not present, since it cannot be redistributed with the
// repository or fetched in a sandbox.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "recmem/dataset.hpp"
#include "recmem/evaluate.hpp"
#include "recmem/matrix.hpp"
#include "recmem/strings.hpp"

using namespace recmem;
namespace fs = std::filesystem;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure(what);
}

std::vector<std::string> file_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

double log_choose(int n, int k) {
  return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

fs::path dataset_dir;

// Criterion 2: 3883 items, 6040 users, 1,000,209 interactions; byte-identical
// round-trip serialization.
void criterion_dataset_fidelity() {
  MovieLensDataset dataset = load_movielens(dataset_dir);
  require(dataset.items.size() == 3883,
          "expected 3883 items, got " + std::to_string(dataset.items.size()));
  require(dataset.users.size() == 6040,
          "expected 6040 users, got " + std::to_string(dataset.users.size()));
  require(dataset.interactions.size() == 1000209,
          "expected 1000209 interactions, got " +
              std::to_string(dataset.interactions.size()));

  auto movie_lines = file_lines(dataset_dir / "movies.dat");
  for (std::size_t i = 0; i < movie_lines.size(); ++i) {
    require(to_source_line(dataset.items.items()[i]) == movie_lines[i],
            "movies.dat round-trip differs at line " + std::to_string(i + 1));
  }
  auto user_lines = file_lines(dataset_dir / "users.dat");
  for (std::size_t i = 0; i < user_lines.size(); ++i) {
    require(to_source_line(dataset.users.users()[i]) == user_lines[i],
            "users.dat round-trip differs at line " + std::to_string(i + 1));
  }
  auto rating_lines = file_lines(dataset_dir / "ratings.dat");
  for (std::size_t i = 0; i < rating_lines.size(); ++i) {
    require(to_source_line(dataset.interactions[i]) == rating_lines[i],
            "ratings.dat round-trip differs at line " + std::to_string(i + 1));
  }
}

// Criterion 8: bounded reproduction of the classical-baseline rows with
// default hyperparameters; < 30 min end to end.
void criterion_baseline_reproduction() {
  auto started = std::chrono::steady_clock::now();
  MovieLensDataset dataset = load_movielens(dataset_dir);
  SplitLog split = split_leave_n_out(dataset.interactions, 0.8);
  BaselineHyperparams params;  // defaults: d=64, lr=0.05, reg=0.0025, 30 epochs

  EvalRun mostpop = evaluate_baseline(split, BaselineKind::MostPop, params);
  require(std::abs(mostpop.table.hr10 - 0.1520) <= 0.05,
          "MostPop HR@10 = " + format_fixed(mostpop.table.hr10, 4) +
              " outside 0.1520 +/- 0.05");

  EvalRun bprmf = evaluate_baseline(split, BaselineKind::Bprmf, params);
  require(std::abs(bprmf.table.hr1 - 0.0406) <= 0.02,
          "BPRMF HR@1 = " + format_fixed(bprmf.table.hr1, 4) + " outside 0.0406 +/- 0.02");

  EvalRun random = evaluate_baseline(split, BaselineKind::Random, params);
  InteractionMatrix train = InteractionMatrix::from_log(split.train);
  auto test_by_user = interactions_by_user(split.test);
  double mean = 0.0, var = 0.0;
  std::size_t n = 0;
  for (const auto& [uid, rows] : test_by_user) {
    if (rows.empty()) continue;
    auto u = train.user_index(uid);
    if (!u) continue;
    int candidates = train.n_items() - static_cast<int>(train.user_row(*u).size());
    std::set<std::int64_t> relevant;
    for (const auto& x : rows) relevant.insert(x.item_id);
    int in_universe = 0;
    for (auto id : relevant) {
      if (train.item_index(id).has_value()) ++in_universe;
    }
    double p = 0.0;
    if (in_universe > 0 && candidates >= 10) {
      p = 1.0 -
          std::exp(log_choose(candidates - in_universe, 10) - log_choose(candidates, 10));
    }
    mean += p;
    var += p * (1.0 - p);
    ++n;
  }
  require(n == random.users.size(), "user population mismatch in the analytic check");
  mean /= static_cast<double>(n);
  double sigma = std::sqrt(var) / static_cast<double>(n);
  require(std::abs(random.table.hr10 - mean) <= 3.0 * sigma,
          "Random HR@10 = " + format_fixed(random.table.hr10, 4) + " not within 3 sigma of " +
              format_fixed(mean, 4));

  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  require(elapsed < 1800.0,
          "baseline reproduction took " + std::to_string(elapsed) + " s (limit 1800)");
  std::cout << "  MostPop HR@10 = " << format_fixed(mostpop.table.hr10, 4)
            << ", BPRMF HR@1 = " << format_fixed(bprmf.table.hr1, 4)
            << ", Random HR@10 = " << format_fixed(random.table.hr10, 4) << " (analytic "
            << format_fixed(mean, 4) << "), " << format_fixed(elapsed, 1) << " s\n";
}

// Criterion 10 (MovieLens-1M half): PopularityTiers partition invariants.
void criterion_tier_invariants() {
  MovieLensDataset dataset = load_movielens(dataset_dir);
  PopularityTiers tiers = popularity_tiers(dataset.interactions, dataset.items);
  require(tiers.top.size() == tiers.bottom.size(), "top and bottom band sizes differ");
  require(!tiers.top.empty() && !tiers.middle.empty(), "bands must be non-empty");
  for (auto id : tiers.top) {
    require(tiers.middle.count(id) == 0 && tiers.bottom.count(id) == 0,
            "tiers are not pairwise disjoint");
  }
  for (auto id : tiers.middle) {
    require(tiers.bottom.count(id) == 0, "middle and bottom overlap");
  }
  std::size_t min_top = SIZE_MAX, max_bottom = 0, min_mid = SIZE_MAX, max_mid = 0;
  for (auto id : tiers.top) min_top = std::min(min_top, tiers.counts.at(id));
  for (auto id : tiers.middle) {
    min_mid = std::min(min_mid, tiers.counts.at(id));
    max_mid = std::max(max_mid, tiers.counts.at(id));
  }
  for (auto id : tiers.bottom) max_bottom = std::max(max_bottom, tiers.counts.at(id));
  require(min_top >= max_mid, "top band count below middle band count");
  require(min_mid >= max_bottom, "middle band count below bottom band count");
  for (auto id : tiers.top) require(dataset.items.find(id) != nullptr, "top id not in catalog");
}

}  // namespace

int main() {
  if (const char* env = std::getenv("RECMEM_ML1M_DIR"); env != nullptr && *env != '\0') {
    dataset_dir = env;
  } else {
    dataset_dir = fs::path(RECMEM_SOURCE_DIR) / "data" / "ml-1m";
  }
  if (!fs::exists(dataset_dir / "movies.dat")) {
    std::cout << "SKIP: MovieLens-1M not found at " << dataset_dir.string()
              << " (set RECMEM_ML1M_DIR); criteria 2, 8, and the ML-1M half of 10 "
                 "were not evaluated\n";
    return 77;
  }

  struct Criterion {
    int id;
    const char* name;
    std::function<void()> body;
  };
  const std::vector<Criterion> criteria{
      {2, "dataset fidelity", criterion_dataset_fidelity},
      {8, "baseline reproduction", criterion_baseline_reproduction},
      {10, "tier partition invariants on MovieLens-1M", criterion_tier_invariants},
  };
  int failures = 0;
  for (const auto& criterion : criteria) {
    try {
      criterion.body();
      std::cout << "PASS criterion " << criterion.id << ": " << criterion.name << "\n";
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "FAIL criterion " << criterion.id << ": " << criterion.name << " — "
                << e.what() << "\n";
    }
  }
  return failures == 0 ? 0 : 1;
}

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "recmem/baselines.hpp"
#include "recmem/dataset.hpp"
#include "recmem/gateway.hpp"
#include "recmem/metrics.hpp"
#include "recmem/title_index.hpp"

namespace recmem {

// Mean HR@k / nDCG@k at the three reporting cutoffs.
struct MetricsTable {
  double hr1 = 0.0, ndcg1 = 0.0;
  double hr5 = 0.0, ndcg5 = 0.0;
  double hr10 = 0.0, ndcg10 = 0.0;
};

struct UserEval {
  std::int64_t user_id = 0;
  RankedList list;
  double hr[3] = {0, 0, 0};      // cutoffs 1, 5, 10
  double ndcg[3] = {0, 0, 0};
  std::size_t unresolved = 0;    // LLM lists only
  bool excluded = false;
  std::string exclude_reason;
};

struct EvalRun {
  std::string model;
  MetricsTable table;
  std::vector<UserEval> users;
  std::size_t unresolved_titles = 0;
  std::size_t excluded_users = 0;
  bool partial = false;  // more than 1% of users excluded
};

struct ParsedList {
  std::vector<std::string> titles;  // ordered by parsed rank
  std::size_t skipped_lines = 0;
};

// Extracts "Rank. Title" lines; other lines are skipped (counted). Duplicate
// ranks keep the first occurrence; the list is truncated at expected_n.
// Throws ParseError when no line parses.
ParsedList parse_ranked_list(std::string_view text, std::size_t expected_n);

struct LlmEvalOptions {
  std::size_t n_rec = 50;
  std::optional<std::size_t> user_sample;  // stratified by history length
  std::uint64_t seed = 42;
  std::size_t workers = 4;
  ResponseCache* cache = nullptr;
};

// Figure-style recommendation evaluation: prompt per test user, parse the
// ranked titles, resolve them against the catalog (unresolved titles are
// dropped but counted), filter training items, truncate to n_rec, and score
// HR/nDCG at 1, 5, 10 against the user's held-out items.
EvalRun evaluate_llm_as_recommender(const MovieLensDataset& dataset, const SplitLog& split,
                                    LlmGateway& gateway, const LlmEvalOptions& options);

enum class BaselineKind { Random, MostPop, UserKnn, ItemKnn, Bprmf, Ease, LightGcn };

BaselineKind baseline_from_name(const std::string& name);
const char* baseline_name(BaselineKind kind);

struct BaselineHyperparams {
  int knn_neighbors = 50;
  double ease_lambda = 300.0;
  int factors = 64;
  double learning_rate = 0.05;
  double reg = 0.0025;
  int epochs = 30;
  int lightgcn_layers = 2;
  std::uint64_t seed = 42;
};

// Fits the named baseline on the training split and evaluates top-50 lists
// for every test user with at least one held-out item.
EvalRun evaluate_baseline(const SplitLog& split, BaselineKind kind,
                          const BaselineHyperparams& params);

// Same, but over an already-trained ranker (used for persisted models).
EvalRun evaluate_ranker(const SplitLog& split, const InteractionMatrix& train,
                        const Ranker& ranker, const Ranker* fallback, std::string model_name);

// Per-model probe coverages as fractions.
struct ModelCoverage {
  double item = 0.0;
  double user = 0.0;
  double interaction = 0.0;
};

struct PairDelta {
  std::string model_a;
  std::string model_b;
  double memorization = 0.0;  // (a - b) / a
  double ndcg = 0.0;
  double hr = 0.0;
};

struct ScaleSummary {
  std::map<std::string, double> mean_memorization;  // (item+user+interaction)/3
  std::vector<PairDelta> deltas;                    // models in name order, a < b
};

// Requires every model to carry all three coverage kinds and an eval run.
ScaleSummary scale_summary(const std::map<std::string, ModelCoverage>& coverages,
                           const std::map<std::string, MetricsTable>& tables);

double relative_delta(double a, double b);  // (a - b) / a

}  // namespace recmem

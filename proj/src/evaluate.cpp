#include "recmem/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <regex>
#include <set>
#include <thread>

#include "recmem/errors.hpp"
#include "recmem/bprmf.hpp"
#include "recmem/ease.hpp"
#include "recmem/lightgcn.hpp"
#include "recmem/prompt.hpp"
#include "recmem/rng.hpp"
#include "recmem/strings.hpp"

namespace recmem {

ParsedList parse_ranked_list(std::string_view text, std::size_t expected_n) {
  static const std::regex line_re(R"(^\s*(\d+)\.\s+(.+)$)");
  ParsedList out;
  std::vector<std::pair<long, std::string>> entries;
  for (auto raw_line : split(text, "\n")) {
    std::string line(trim(raw_line));
    if (line.empty()) continue;
    std::smatch m;
    if (!std::regex_match(line, m, line_re)) {
      ++out.skipped_lines;
      continue;
    }
    entries.emplace_back(std::stol(m[1].str()), std::string(trim(m[2].str())));
  }
  if (entries.empty()) throw ParseError("response contains no 'Rank. Title' lines");
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::set<long> seen_ranks;
  for (auto& [rank, title] : entries) {
    if (out.titles.size() >= expected_n) break;
    if (!seen_ranks.insert(rank).second) continue;  // duplicate rank, keep first
    out.titles.push_back(std::move(title));
  }
  return out;
}

namespace {

constexpr int kCutoffs[3] = {1, 5, 10};

void fill_metrics(UserEval& ue, const RankedList& list,
                  const std::set<std::int64_t>& relevant) {
  for (int c = 0; c < 3; ++c) {
    ue.hr[c] = hr_at_k(list, relevant, kCutoffs[c]);
    ue.ndcg[c] = ndcg_at_k(list, relevant, kCutoffs[c]);
  }
}

MetricsTable mean_table(const std::vector<UserEval>& users) {
  MetricsTable t;
  std::size_t n = 0;
  for (const auto& ue : users) {
    if (ue.excluded) continue;
    ++n;
    t.hr1 += ue.hr[0];
    t.ndcg1 += ue.ndcg[0];
    t.hr5 += ue.hr[1];
    t.ndcg5 += ue.ndcg[1];
    t.hr10 += ue.hr[2];
    t.ndcg10 += ue.ndcg[2];
  }
  if (n > 0) {
    double inv = 1.0 / static_cast<double>(n);
    t.hr1 *= inv;
    t.ndcg1 *= inv;
    t.hr5 *= inv;
    t.ndcg5 *= inv;
    t.hr10 *= inv;
    t.ndcg10 *= inv;
  }
  return t;
}

struct EvalTarget {
  std::int64_t user_id;
  std::vector<std::string> train_titles;         // temporal order
  std::set<std::int64_t> train_ids;
  std::set<std::int64_t> relevant;               // held-out item ids
};

// Stratified-by-history-length subsample: sort by (train length, id), cut
// into `sample` contiguous strata, draw one user per stratum.
std::vector<EvalTarget> stratified_sample(std::vector<EvalTarget> targets,
                                          std::size_t sample, std::uint64_t seed) {
  if (sample == 0 || sample >= targets.size()) return targets;
  std::stable_sort(targets.begin(), targets.end(), [](const auto& a, const auto& b) {
    if (a.train_titles.size() != b.train_titles.size()) {
      return a.train_titles.size() < b.train_titles.size();
    }
    return a.user_id < b.user_id;
  });
  Rng rng(mix_seed(seed, 0x5a4d31));
  std::vector<EvalTarget> chosen;
  chosen.reserve(sample);
  std::size_t n = targets.size();
  for (std::size_t s = 0; s < sample; ++s) {
    std::size_t begin = s * n / sample;
    std::size_t end = (s + 1) * n / sample;
    std::size_t pick = begin + static_cast<std::size_t>(rng.bounded(end - begin));
    chosen.push_back(std::move(targets[pick]));
  }
  std::sort(chosen.begin(), chosen.end(),
            [](const auto& a, const auto& b) { return a.user_id < b.user_id; });
  return chosen;
}

}  // namespace

EvalRun evaluate_llm_as_recommender(const MovieLensDataset& dataset, const SplitLog& split,
                                    LlmGateway& gateway, const LlmEvalOptions& options) {
  TitleIndex index = TitleIndex::build(dataset.items);
  auto train_by_user = interactions_by_user(split.train);
  auto test_by_user = interactions_by_user(split.test);

  std::vector<EvalTarget> targets;
  for (const auto& [uid, test_rows] : test_by_user) {
    if (test_rows.empty()) continue;
    EvalTarget t;
    t.user_id = uid;
    for (const auto& x : test_rows) t.relevant.insert(x.item_id);
    auto it = train_by_user.find(uid);
    if (it != train_by_user.end()) {
      for (const auto& x : it->second) {
        t.train_ids.insert(x.item_id);
        if (const Item* item = dataset.items.find(x.item_id)) {
          t.train_titles.push_back(item->title);
        }
      }
    }
    targets.push_back(std::move(t));
  }
  if (options.user_sample) {
    targets = stratified_sample(std::move(targets), *options.user_sample, options.seed);
  }
  if (targets.empty()) throw ConfigError("no evaluable users in the test split");

  EvalRun run;
  run.model = gateway.endpoint().model_name;
  run.users.resize(targets.size());

  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex err_mu;
  std::exception_ptr first_error;
  std::size_t first_error_index = targets.size();

  auto execute = [&](std::size_t idx) {
    const EvalTarget& target = targets[idx];
    UserEval ue;
    ue.user_id = target.user_id;
    try {
      if (target.train_titles.empty()) {
        ue.excluded = true;
        ue.exclude_reason = "no training titles";
        run.users[idx] = std::move(ue);
        return;
      }
      ChatPrompt prompt = build_recommendation_prompt(target.user_id, target.train_titles);
      std::string response = options.cache
                                 ? gateway.run_with_cache(prompt, *options.cache).first
                                 : gateway.complete(prompt);
      ParsedList parsed;
      try {
        parsed = parse_ranked_list(response, options.n_rec);
      } catch (const ParseError& e) {
        ue.excluded = true;
        ue.exclude_reason = e.what();
        run.users[idx] = std::move(ue);
        return;
      }
      RankedList list;
      list.user_id = target.user_id;
      list.k = static_cast<int>(options.n_rec);
      std::set<std::int64_t> emitted;
      for (const auto& title : parsed.titles) {
        if (list.entries.size() >= options.n_rec) break;
        auto id = index.resolve(title);
        if (!id) {
          ++ue.unresolved;
          continue;
        }
        if (target.train_ids.count(*id) || !emitted.insert(*id).second) continue;
        int rank = static_cast<int>(list.entries.size()) + 1;
        list.entries.push_back({rank, *id, 1.0 / static_cast<double>(rank)});
      }
      fill_metrics(ue, list, target.relevant);
      ue.list = std::move(list);
    } catch (const Error&) {
      std::lock_guard<std::mutex> lock(err_mu);
      if (idx < first_error_index) {
        first_error_index = idx;
        first_error = std::current_exception();
      }
      stop.store(true);
      return;
    }
    run.users[idx] = std::move(ue);
  };

  std::size_t workers = std::max<std::size_t>(1, options.workers);
  if (workers == 1) {
    for (std::size_t i = 0; i < targets.size() && !stop.load(); ++i) execute(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (!stop.load()) {
          std::size_t i = next.fetch_add(1);
          if (i >= targets.size()) break;
          execute(i);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  for (const auto& ue : run.users) {
    run.unresolved_titles += ue.unresolved;
    if (ue.excluded) ++run.excluded_users;
  }
  run.partial = run.excluded_users * 100 > run.users.size();
  run.table = mean_table(run.users);
  return run;
}

BaselineKind baseline_from_name(const std::string& name) {
  if (name == "random") return BaselineKind::Random;
  if (name == "mostpop") return BaselineKind::MostPop;
  if (name == "userknn") return BaselineKind::UserKnn;
  if (name == "itemknn") return BaselineKind::ItemKnn;
  if (name == "bprmf") return BaselineKind::Bprmf;
  if (name == "ease") return BaselineKind::Ease;
  if (name == "lightgcn") return BaselineKind::LightGcn;
  throw ConfigError("unknown baseline '" + name + "'");
}

const char* baseline_name(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::Random: return "random";
    case BaselineKind::MostPop: return "mostpop";
    case BaselineKind::UserKnn: return "userknn";
    case BaselineKind::ItemKnn: return "itemknn";
    case BaselineKind::Bprmf: return "bprmf";
    case BaselineKind::Ease: return "ease";
    case BaselineKind::LightGcn: return "lightgcn";
  }
  return "random";
}

EvalRun evaluate_ranker(const SplitLog& split, const InteractionMatrix& train,
                        const Ranker& ranker, const Ranker* fallback,
                        std::string model_name) {
  auto test_by_user = interactions_by_user(split.test);
  struct Target {
    std::int64_t uid;
    int user_index;
    std::set<std::int64_t> relevant;
  };
  std::vector<Target> targets;
  for (const auto& [uid, rows] : test_by_user) {
    if (rows.empty()) continue;
    auto u = train.user_index(uid);
    if (!u) continue;  // user absent from the training matrix
    Target t;
    t.uid = uid;
    t.user_index = *u;
    for (const auto& x : rows) t.relevant.insert(x.item_id);
    targets.push_back(std::move(t));
  }
  if (targets.empty()) throw ConfigError("no evaluable users in the test split");

  EvalRun run;
  run.model = std::move(model_name);
  run.users.resize(targets.size());

#pragma omp parallel for schedule(dynamic, 32)
  for (std::size_t idx = 0; idx < targets.size(); ++idx) {
    const Target& target = targets[idx];
    UserEval ue;
    ue.user_id = target.uid;
    std::vector<double> scores = ranker.score(target.user_index);
    if (scores.empty() && fallback != nullptr) scores = fallback->score(target.user_index);
    RankedList list = rank_top_k(train, target.user_index, scores, 50);
    fill_metrics(ue, list, target.relevant);
    ue.list = std::move(list);
    run.users[idx] = std::move(ue);
  }

  run.table = mean_table(run.users);
  return run;
}

EvalRun evaluate_baseline(const SplitLog& split, BaselineKind kind,
                          const BaselineHyperparams& params) {
  InteractionMatrix train = InteractionMatrix::from_log(split.train);
  if (train.nnz() == 0) throw ConfigError("empty training split");

  std::unique_ptr<Ranker> ranker;
  std::unique_ptr<Ranker> fallback;
  switch (kind) {
    case BaselineKind::Random:
      ranker = std::make_unique<RandomRanker>(train, params.seed);
      break;
    case BaselineKind::MostPop:
      ranker = std::make_unique<MostPopRanker>(train);
      break;
    case BaselineKind::UserKnn:
      ranker = std::make_unique<UserKnnRanker>(train, params.knn_neighbors);
      fallback = std::make_unique<MostPopRanker>(train);
      break;
    case BaselineKind::ItemKnn:
      ranker = std::make_unique<ItemKnnRanker>(train, params.knn_neighbors);
      fallback = std::make_unique<MostPopRanker>(train);
      break;
    case BaselineKind::Bprmf: {
      BprmfConfig cfg;
      cfg.factors = params.factors;
      cfg.learning_rate = params.learning_rate;
      cfg.reg = params.reg;
      cfg.bias_reg = params.reg;
      cfg.epochs = params.epochs;
      cfg.seed = params.seed;
      ranker = std::make_unique<BprmfModel>(train_bprmf(train, cfg));
      break;
    }
    case BaselineKind::Ease: {
      EaseConfig cfg;
      cfg.lambda = params.ease_lambda;
      ranker = std::make_unique<EaseModel>(solve_ease(train, cfg));
      break;
    }
    case BaselineKind::LightGcn: {
      LightGcnConfig cfg;
      cfg.factors = params.factors;
      cfg.layers = params.lightgcn_layers;
      cfg.learning_rate = params.learning_rate;
      cfg.reg = params.reg;
      cfg.epochs = params.epochs;
      cfg.seed = params.seed;
      ranker = std::make_unique<LightGcnModel>(train_lightgcn(train, cfg));
      break;
    }
  }
  return evaluate_ranker(split, train, *ranker, fallback.get(), baseline_name(kind));
}

double relative_delta(double a, double b) {
  if (a == 0.0) {
    if (b == 0.0) return 0.0;
    throw NumericError("relative delta undefined for zero base");
  }
  return (a - b) / a;
}

ScaleSummary scale_summary(const std::map<std::string, ModelCoverage>& coverages,
                           const std::map<std::string, MetricsTable>& tables) {
  if (coverages.empty()) throw ConfigError("scale summary requires at least one model");
  ScaleSummary out;
  for (const auto& [model, cov] : coverages) {
    if (tables.find(model) == tables.end()) {
      throw ConfigError("model '" + model + "' has coverage but no eval run");
    }
    out.mean_memorization[model] = (cov.item + cov.user + cov.interaction) / 3.0;
  }
  for (const auto& [model, table] : tables) {
    (void)table;
    if (coverages.find(model) == coverages.end()) {
      throw ConfigError("model '" + model + "' has an eval run but no coverage");
    }
  }
  auto mean_ndcg = [](const MetricsTable& t) { return (t.ndcg1 + t.ndcg5 + t.ndcg10) / 3.0; };
  auto mean_hr = [](const MetricsTable& t) { return (t.hr1 + t.hr5 + t.hr10) / 3.0; };
  std::vector<std::string> models;
  for (const auto& [model, cov] : coverages) {
    (void)cov;
    models.push_back(model);
  }
  for (std::size_t i = 0; i < models.size(); ++i) {
    for (std::size_t j = i + 1; j < models.size(); ++j) {
      PairDelta d;
      d.model_a = models[i];
      d.model_b = models[j];
      d.memorization = relative_delta(out.mean_memorization[models[i]],
                                      out.mean_memorization[models[j]]);
      d.ndcg = relative_delta(mean_ndcg(tables.at(models[i])), mean_ndcg(tables.at(models[j])));
      d.hr = relative_delta(mean_hr(tables.at(models[i])), mean_hr(tables.at(models[j])));
      out.deltas.push_back(std::move(d));
    }
  }
  return out;
}

}  // namespace recmem

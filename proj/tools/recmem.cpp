#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "recmem/dataset.hpp"
#include "recmem/errors.hpp"
#include "recmem/evaluate.hpp"
#include "recmem/gateway.hpp"
#include "recmem/model_io.hpp"
#include "recmem/probe.hpp"
#include "recmem/report.hpp"
#include "recmem/strings.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace recmem;

namespace {

// Exit codes; partial runs still write their outputs before exiting.
constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitParse = 3;
constexpr int kExitTransport = 4;
constexpr int kExitPartial = 5;
constexpr int kExitCacheMiss = 6;

struct CommonOpts {
  std::string config_path;
  std::string dataset_dir;
  std::string model;
  std::string backend = "oracle";
  std::string cache;
  std::string out = "out";
  std::string format = "both";
  std::size_t workers = 4;
  std::size_t shots = 2;
  std::uint64_t seed = 42;
  std::optional<std::size_t> limit;
  double oracle_fraction = 1.0;
  std::uint64_t oracle_seed = 42;
  bool sliding = false;
  bool partial = false;
  bool verbose = false;

  json config = json::object();  // parsed --config document
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_endpoint) {
  cmd->add_option("--config", o.config_path, "JSON config file; flags override its values");
  cmd->add_option("--dataset-dir", o.dataset_dir,
                  "directory with movies.dat/users.dat/ratings.dat");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--seed", o.seed, "seed for shot selection / splits / sampling");
  cmd->add_option("--format", o.format, "csv|json|both")
      ->check(CLI::IsMember({"csv", "json", "both"}));
  cmd->add_flag("-v,--verbose", o.verbose, "debug logging to stderr");
  if (needs_endpoint) {
    cmd->add_option("--model", o.model, "endpoint name (config key) or model name");
    cmd->add_option("--backend", o.backend, "http|replay|oracle")
        ->check(CLI::IsMember({"http", "replay", "oracle"}));
    cmd->add_option("--cache", o.cache, "response cache file (JSONL)");
    cmd->add_option("--workers", o.workers, "worker pool size");
    cmd->add_option("--limit", o.limit, "probe only the first N entities (id order)");
    cmd->add_option("--oracle-fraction", o.oracle_fraction,
                    "memorized fraction for the oracle backend");
    cmd->add_option("--oracle-seed", o.oracle_seed, "oracle selection seed");
  }
}

// Config-file values fill in anything the command line left untouched.
void apply_config(CLI::App* cmd, CommonOpts& o) {
  o.config = json::object();
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + o.config_path);
    o.config = json::parse(in, nullptr, false);
    if (o.config.is_discarded()) {
      throw ConfigError("config file " + o.config_path + " is not valid JSON");
    }
  }
  auto take = [&](const char* flag, const json& section, const char* key, auto& value) {
    if (cmd->get_option_no_throw(flag) != nullptr && cmd->count(flag) > 0) return;
    if (section.is_object() && section.contains(key)) {
      section.at(key).get_to(value);
    }
  };
  take("--dataset-dir", o.config, "dataset_dir", o.dataset_dir);
  take("--out", o.config, "out_dir", o.out);
  const json campaign = o.config.value("campaign", json::object());
  take("--workers", campaign, "workers", o.workers);
  take("--shots", campaign, "shots", o.shots);
  take("--seed", campaign, "seed", o.seed);
  set_debug_logging(o.verbose);
}

DecodingConfig decoding_from(const json& config) {
  DecodingConfig cfg;
  const json d = config.value("decoding", json::object());
  cfg.temperature = d.value("temperature", cfg.temperature);
  cfg.top_p = d.value("top_p", cfg.top_p);
  cfg.frequency_penalty = d.value("frequency_penalty", cfg.frequency_penalty);
  cfg.presence_penalty = d.value("presence_penalty", cfg.presence_penalty);
  cfg.seed = d.value("seed", cfg.seed);
  cfg.max_tokens = d.value("max_tokens", cfg.max_tokens);
  return cfg;
}

BaselineHyperparams baselines_from(const json& config) {
  BaselineHyperparams p;
  const json b = config.value("baselines", json::object());
  p.knn_neighbors = b.value("knn_neighbors", p.knn_neighbors);
  p.ease_lambda = b.value("ease_lambda", p.ease_lambda);
  p.factors = b.value("factors", p.factors);
  p.learning_rate = b.value("learning_rate", p.learning_rate);
  p.reg = b.value("reg", p.reg);
  p.epochs = b.value("epochs", p.epochs);
  p.lightgcn_layers = b.value("lightgcn_layers", p.lightgcn_layers);
  p.seed = b.value("seed", p.seed);
  return p;
}

ModelEndpoint endpoint_from(const CommonOpts& o, const MovieLensDataset& dataset,
                            const SplitLog* split) {
  // A --model naming a config endpoint pulls that definition; explicit flags
  // still win for the cache path and the oracle knobs.
  json def = json::object();
  if (!o.model.empty() && o.config.contains("endpoints") &&
      o.config.at("endpoints").contains(o.model)) {
    def = o.config.at("endpoints").at(o.model);
  }
  ModelEndpoint ep;
  ep.model_name = def.value("model_name", o.model.empty() ? std::string("oracle") : o.model);
  ep.backend = backend_from_name(def.value("backend", o.backend));
  ep.base_url = def.value("base_url", std::string{});
  ep.auth_token_env = def.value("auth_token_env", std::string{});
  ep.cache_path = !o.cache.empty() ? o.cache : def.value("cache", std::string{});
  ep.requests_per_second = def.value("requests_per_second", ep.requests_per_second);
  ep.max_attempts = def.value("max_attempts", ep.max_attempts);
  ep.retry_base_ms = def.value("retry_base_ms", ep.retry_base_ms);
  ep.timeout_s = def.value("timeout_s", ep.timeout_s);
  ep.oracle.memorized_fraction = def.value("memorized_fraction", o.oracle_fraction);
  ep.oracle.selection_seed = def.value("selection_seed", o.oracle_seed);
  ep.oracle.dataset = &dataset;
  ep.oracle.split = split;
  return ep;
}

MovieLensDataset load_dataset(const CommonOpts& o) {
  if (o.dataset_dir.empty()) throw ConfigError("--dataset-dir is required");
  return load_movielens(o.dataset_dir);
}

std::unique_ptr<ResponseCache> open_cache(const ModelEndpoint& ep) {
  if (ep.cache_path.empty()) return nullptr;
  return std::make_unique<ResponseCache>(ep.cache_path,
                                         /*writable=*/ep.backend != Backend::Replay);
}

void emit_coverage_files(const CoverageReport& report, const CommonOpts& o,
                         std::vector<fs::path>& written) {
  fs::create_directories(o.out);
  std::string stem = "coverage_" + sanitize_filename(report.model) + "_" +
                     entity_kind_name(report.kind);
  ReportFormat format = report_format_from_name(o.format);
  const CoverageReport reports[] = {report};
  if (format != ReportFormat::Json) {
    fs::path p = fs::path(o.out) / (stem + ".csv");
    write_text_file(p, coverage_csv(reports));
    written.push_back(p);
  }
  if (format != ReportFormat::Csv) {
    fs::path p = fs::path(o.out) / (stem + ".json");
    write_text_file(p, coverage_to_json(report).dump(2) + "\n");
    written.push_back(p);
  }
}

void emit_eval_files(const EvalRun& run, const CommonOpts& o,
                     std::vector<fs::path>& written) {
  fs::create_directories(o.out);
  std::string stem = "metrics_" + sanitize_filename(run.model);
  ReportFormat format = report_format_from_name(o.format);
  const EvalRun runs[] = {run};
  if (format != ReportFormat::Json) {
    fs::path p = fs::path(o.out) / (stem + ".csv");
    write_text_file(p, metrics_csv(runs));
    written.push_back(p);
  }
  if (format != ReportFormat::Csv) {
    fs::path p = fs::path(o.out) / (stem + ".json");
    write_text_file(p, eval_to_json(run).dump(2) + "\n");
    written.push_back(p);
  }
}

int finish(bool partial, const std::vector<fs::path>& written) {
  for (const auto& p : written) std::cout << "wrote " << p.string() << "\n";
  if (partial) {
    std::cerr << "warning: run is partial\n";
    return kExitPartial;
  }
  return kExitOk;
}

struct SplitOpts {
  double ratio = 0.8;
  std::string order = "temporal";
};

void add_split_opts(CLI::App* cmd, SplitOpts& s) {
  cmd->add_option("--ratio", s.ratio, "train fraction for the leave-n-out split");
  cmd->add_option("--split", s.order, "temporal|random per-user holdout")
      ->check(CLI::IsMember({"temporal", "random"}));
}

SplitLog make_split(const MovieLensDataset& dataset, const SplitOpts& s,
                    std::uint64_t seed) {
  SplitOrder order = s.order == "random" ? SplitOrder::SeededRandom : SplitOrder::Temporal;
  return split_leave_n_out(dataset.interactions, s.ratio, order, seed);
}

CampaignOptions campaign_options(const CommonOpts& o, ResponseCache* cache) {
  CampaignOptions opts;
  opts.shots = o.shots;
  opts.limit = o.limit;
  opts.workers = o.workers;
  opts.seed = o.seed;
  opts.sliding_window = o.sliding;
  opts.allow_partial = o.partial;
  opts.cache = cache;
  return opts;
}

int run_probe(const CommonOpts& o, const std::string& kind_name) {
  MovieLensDataset dataset = load_dataset(o);
  ModelEndpoint ep = endpoint_from(o, dataset, nullptr);
  LlmGateway gateway(ep, decoding_from(o.config));
  auto cache = open_cache(ep);
  EntityKind kind = entity_kind_from_name(kind_name);
  CoverageReport report = run_campaign(kind, dataset, gateway, campaign_options(o, cache.get()));
  std::vector<fs::path> written;
  emit_coverage_files(report, o, written);
  std::cout << entity_kind_name(kind) << " coverage: " << format_pct(report.coverage)
            << "% (" << report.matched << "/" << report.total << ")\n";
  return finish(report.partial, written);
}

int run_tiers(const CommonOpts& o) {
  MovieLensDataset dataset = load_dataset(o);
  ModelEndpoint ep = endpoint_from(o, dataset, nullptr);
  LlmGateway gateway(ep, decoding_from(o.config));
  auto cache = open_cache(ep);
  CoverageReport report =
      run_campaign(EntityKind::Item, dataset, gateway, campaign_options(o, cache.get()));
  PopularityTiers tiers = popularity_tiers(dataset.interactions, dataset.items);
  report.tier_breakdown = tier_coverage(report, tiers);

  fs::create_directories(o.out);
  std::vector<fs::path> written;
  const CoverageReport reports[] = {report};
  fs::path tier_path =
      fs::path(o.out) / ("tiers_" + sanitize_filename(report.model) + ".csv");
  write_text_file(tier_path, tier_csv(reports));
  written.push_back(tier_path);
  fs::path json_path =
      fs::path(o.out) / ("coverage_" + sanitize_filename(report.model) + "_item.json");
  write_text_file(json_path, coverage_to_json(report).dump(2) + "\n");
  written.push_back(json_path);
  fs::path summary_path = fs::path(o.out) / "dataset_summary.txt";
  write_text_file(summary_path, dataset_summary_text(dataset, tiers));
  written.push_back(summary_path);
  for (const auto& [tier, fraction] : report.tier_breakdown) {
    std::cout << tier << " coverage: " << format_pct(fraction) << "%\n";
  }
  return finish(report.partial, written);
}

int run_baseline(const CommonOpts& o, const std::string& name, const SplitOpts& split_opts,
                 const std::string& save_model, const std::string& load_model) {
  MovieLensDataset dataset = load_dataset(o);
  BaselineHyperparams params = baselines_from(o.config);
  params.seed = o.seed;
  SplitLog split = make_split(dataset, split_opts, o.seed);
  BaselineKind kind = baseline_from_name(name);

  EvalRun run;
  if (!load_model.empty() || !save_model.empty()) {
    if (kind != BaselineKind::Bprmf && kind != BaselineKind::Ease) {
      throw ConfigError("model persistence supports bprmf and ease");
    }
    InteractionMatrix train = InteractionMatrix::from_log(split.train);
    if (kind == BaselineKind::Bprmf) {
      BprmfConfig cfg;
      cfg.factors = params.factors;
      cfg.learning_rate = params.learning_rate;
      cfg.reg = params.reg;
      cfg.bias_reg = params.reg;
      cfg.epochs = params.epochs;
      cfg.seed = params.seed;
      BprmfModel model = !load_model.empty() ? load_bprmf(load_model)
                                             : train_bprmf(train, cfg);
      if (!save_model.empty()) save_bprmf(save_model, model);
      run = evaluate_ranker(split, train, model, nullptr, name);
    } else {
      EaseConfig cfg;
      cfg.lambda = params.ease_lambda;
      EaseModel model = !load_model.empty() ? load_ease(load_model, train)
                                            : solve_ease(train, cfg);
      if (!save_model.empty()) save_ease(save_model, model);
      run = evaluate_ranker(split, train, model, nullptr, name);
    }
  } else {
    run = evaluate_baseline(split, kind, params);
  }

  std::vector<fs::path> written;
  emit_eval_files(run, o, written);
  std::cout << run.model << ": HR@10=" << format_fixed(run.table.hr10, 4)
            << " nDCG@10=" << format_fixed(run.table.ndcg10, 4) << "\n";
  return finish(run.partial, written);
}

int run_llm_rec(const CommonOpts& o, const SplitOpts& split_opts,
                std::optional<std::size_t> sample) {
  MovieLensDataset dataset = load_dataset(o);
  SplitLog split = make_split(dataset, split_opts, o.seed);
  ModelEndpoint ep = endpoint_from(o, dataset, &split);
  LlmGateway gateway(ep, decoding_from(o.config));
  auto cache = open_cache(ep);

  LlmEvalOptions opts;
  opts.user_sample = sample;
  opts.seed = o.seed;
  opts.workers = o.workers;
  opts.cache = cache.get();

  EvalRun run = evaluate_llm_as_recommender(dataset, split, gateway, opts);
  std::vector<fs::path> written;
  emit_eval_files(run, o, written);
  std::cout << run.model << ": HR@10=" << format_fixed(run.table.hr10, 4)
            << " nDCG@10=" << format_fixed(run.table.ndcg10, 4)
            << " unresolved_titles=" << run.unresolved_titles << "\n";
  return finish(run.partial, written);
}

int run_scale_summary(const std::vector<std::string>& files, const std::string& out_dir) {
  std::map<std::string, ModelCoverage> coverages;
  std::map<std::string, int> kinds_seen;
  std::map<std::string, MetricsTable> tables;
  for (const auto& file : files) {
    LoadedDoc doc = load_report_doc(file);
    if (doc.type == LoadedDoc::Type::Coverage) {
      CoverageReport r = coverage_from_json(doc.doc);
      auto& c = coverages[r.model];
      switch (r.kind) {
        case EntityKind::Item: c.item = r.coverage; break;
        case EntityKind::User: c.user = r.coverage; break;
        case EntityKind::Interaction: c.interaction = r.coverage; break;
      }
      kinds_seen[r.model] |= 1 << static_cast<int>(r.kind);
    } else if (doc.type == LoadedDoc::Type::Eval) {
      EvalRun run = eval_from_json(doc.doc);
      tables[run.model] = run.table;
    } else {
      throw ConfigError("scale-summary accepts coverage and metrics documents only");
    }
  }
  for (const auto& [model, mask] : kinds_seen) {
    if (mask != 0b111) throw ConfigError("model '" + model + "' is missing a coverage kind");
  }
  ScaleSummary summary = scale_summary(coverages, tables);
  fs::create_directories(out_dir);
  std::vector<fs::path> written;
  fs::path means = fs::path(out_dir) / "scale_means.csv";
  write_text_file(means, scale_means_csv(summary));
  written.push_back(means);
  fs::path deltas = fs::path(out_dir) / "scale_deltas.csv";
  write_text_file(deltas, scale_deltas_csv(summary));
  written.push_back(deltas);
  fs::path doc_path = fs::path(out_dir) / "scale_summary.json";
  write_text_file(doc_path, scale_to_json(summary).dump(2) + "\n");
  written.push_back(doc_path);
  for (const auto& [model, mean] : summary.mean_memorization) {
    std::cout << model << " mean memorization: " << format_pct(mean) << "%\n";
  }
  return finish(false, written);
}

int run_report(const std::vector<std::string>& files, const std::string& format,
               const std::string& out_dir) {
  std::vector<LoadedDoc> docs;
  docs.reserve(files.size());
  for (const auto& file : files) docs.push_back(load_report_doc(file));
  auto written = emit_report(docs, report_format_from_name(format), out_dir);
  for (const auto& p : written) std::cout << "wrote " << p.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"recmem: audits LLM memorization of MovieLens-1M and evaluates recommenders"};
  app.require_subcommand(1);

  CommonOpts probe_opts, tiers_opts, baseline_opts, llmrec_opts;
  SplitOpts baseline_split, llmrec_split;
  std::string probe_kind, baseline_kind;
  std::string save_model, load_model;
  std::optional<std::size_t> llm_sample;
  std::vector<std::string> summary_files, report_files;
  std::string report_format = "csv";
  std::string summary_out = "out";
  std::string report_out = "out";

  CLI::App* probe = app.add_subcommand("probe", "run a memorization probe campaign");
  probe->add_option("kind", probe_kind, "items|users|interactions")
      ->required()
      ->check(CLI::IsMember({"items", "users", "interactions"}));
  add_common(probe, probe_opts, true);
  probe->add_option("--shots", probe_opts.shots,
                    "few-shot example count (also the interaction prefix length)");
  probe->add_flag("--sliding", probe_opts.sliding, "interactions: probe every prefix window");
  probe->add_flag("--partial", probe_opts.partial,
                  "record transport errors instead of aborting");

  CLI::App* tiers = app.add_subcommand("tiers", "item coverage by popularity tier");
  add_common(tiers, tiers_opts, true);

  CLI::App* baseline =
      app.add_subcommand("baseline", "train and evaluate a classical baseline");
  baseline->add_option("name", baseline_kind,
                       "random|mostpop|userknn|itemknn|bprmf|ease|lightgcn")
      ->required()
      ->check(CLI::IsMember(
          {"random", "mostpop", "userknn", "itemknn", "bprmf", "ease", "lightgcn"}));
  add_common(baseline, baseline_opts, false);
  add_split_opts(baseline, baseline_split);
  baseline->add_option("--save-model", save_model, "persist the trained model (bprmf/ease)");
  baseline->add_option("--load-model", load_model, "evaluate a persisted model (bprmf/ease)");

  CLI::App* llmrec = app.add_subcommand("llm-rec", "evaluate an LLM as a recommender");
  add_common(llmrec, llmrec_opts, true);
  add_split_opts(llmrec, llmrec_split);
  llmrec->add_option("--sample", llm_sample, "evaluate a stratified sample of N users");

  CLI::App* summary =
      app.add_subcommand("scale-summary", "mean memorization and pairwise deltas");
  summary->add_option("files", summary_files, "coverage and metrics JSON documents")
      ->required();
  summary->add_option("--out", summary_out, "output directory");

  CLI::App* report = app.add_subcommand("report", "re-emit stored run documents");
  report->add_option("files", report_files, "run JSON documents")->required();
  report->add_option("--format", report_format, "csv|json|both")
      ->check(CLI::IsMember({"csv", "json", "both"}));
  report->add_option("--out", report_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (probe->parsed()) {
      apply_config(probe, probe_opts);
      return run_probe(probe_opts, probe_kind);
    }
    if (tiers->parsed()) {
      apply_config(tiers, tiers_opts);
      return run_tiers(tiers_opts);
    }
    if (baseline->parsed()) {
      apply_config(baseline, baseline_opts);
      return run_baseline(baseline_opts, baseline_kind, baseline_split, save_model,
                          load_model);
    }
    if (llmrec->parsed()) {
      apply_config(llmrec, llmrec_opts);
      return run_llm_rec(llmrec_opts, llmrec_split, llm_sample);
    }
    if (summary->parsed()) return run_scale_summary(summary_files, summary_out);
    if (report->parsed()) return run_report(report_files, report_format, report_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const CacheMissError& e) {
    std::cerr << "cache miss: " << e.what() << "\n";
    return kExitCacheMiss;
  } catch (const TransportError& e) {
    std::cerr << "transport error: " << e.what() << "\n";
    return kExitTransport;
  } catch (const ProtocolError& e) {
    std::cerr << "protocol error: " << e.what() << "\n";
    return kExitTransport;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}

#include "recmem/report.hpp"

#include <fstream>

#include "recmem/errors.hpp"
#include "recmem/strings.hpp"

namespace recmem {

using nlohmann::json;

json coverage_to_json(const CoverageReport& report) {
  json per_entity = json::array();
  for (const auto& o : report.per_entity) {
    json row{{"entity_key", o.entity_key},
             {"expected", o.expected},
             {"response", o.response},
             {"matched", o.matched}};
    if (o.errored) {
      row["errored"] = true;
      row["error"] = o.error;
    }
    per_entity.push_back(std::move(row));
  }
  json doc{{"kind", "coverage_report"},
           {"model", report.model},
           {"entity_kind", entity_kind_name(report.kind)},
           {"total", report.total},
           {"matched", report.matched},
           {"coverage", report.coverage},
           {"coverage_pct", format_pct(report.coverage)},
           {"errors", report.errors},
           {"partial", report.partial},
           {"per_entity", std::move(per_entity)}};
  if (!report.tier_breakdown.empty()) {
    json tiers;
    for (const auto& [tier, fraction] : report.tier_breakdown) {
      tiers[tier] = json{{"coverage", fraction}, {"coverage_pct", format_pct(fraction)}};
    }
    doc["tier_breakdown"] = std::move(tiers);
  }
  return doc;
}

CoverageReport coverage_from_json(const json& doc) {
  CoverageReport report;
  try {
    report.model = doc.at("model").get<std::string>();
    report.kind = entity_kind_from_name(doc.at("entity_kind").get<std::string>());
    report.total = doc.at("total").get<std::size_t>();
    report.matched = doc.at("matched").get<std::size_t>();
    report.coverage = doc.at("coverage").get<double>();
    report.errors = doc.value("errors", std::size_t{0});
    report.partial = doc.value("partial", false);
    for (const auto& row : doc.at("per_entity")) {
      ProbeOutcome o;
      o.kind = report.kind;
      o.entity_key = row.at("entity_key").get<std::string>();
      o.expected = row.at("expected").get<std::string>();
      o.response = row.at("response").get<std::string>();
      o.matched = row.at("matched").get<bool>();
      o.errored = row.value("errored", false);
      o.error = row.value("error", std::string{});
      report.per_entity.push_back(std::move(o));
    }
    if (doc.contains("tier_breakdown")) {
      for (const auto& [tier, entry] : doc.at("tier_breakdown").items()) {
        report.tier_breakdown[tier] = entry.at("coverage").get<double>();
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed coverage document: ") + e.what());
  }
  return report;
}

json eval_to_json(const EvalRun& run) {
  json users = json::array();
  for (const auto& ue : run.users) {
    json row{{"user_id", ue.user_id},
             {"excluded", ue.excluded},
             {"unresolved", ue.unresolved},
             {"hr", {ue.hr[0], ue.hr[1], ue.hr[2]}},
             {"ndcg", {ue.ndcg[0], ue.ndcg[1], ue.ndcg[2]}}};
    if (ue.excluded) row["exclude_reason"] = ue.exclude_reason;
    json items = json::array();
    for (const auto& entry : ue.list.entries) items.push_back(entry.item_id);
    row["items"] = std::move(items);
    users.push_back(std::move(row));
  }
  return json{{"kind", "eval_run"},
              {"model", run.model},
              {"metrics",
               {{"HR@1", run.table.hr1},
                {"nDCG@1", run.table.ndcg1},
                {"HR@5", run.table.hr5},
                {"nDCG@5", run.table.ndcg5},
                {"HR@10", run.table.hr10},
                {"nDCG@10", run.table.ndcg10}}},
              {"unresolved_titles", run.unresolved_titles},
              {"excluded_users", run.excluded_users},
              {"partial", run.partial},
              {"users", std::move(users)}};
}

EvalRun eval_from_json(const json& doc) {
  EvalRun run;
  try {
    run.model = doc.at("model").get<std::string>();
    const auto& m = doc.at("metrics");
    run.table.hr1 = m.at("HR@1").get<double>();
    run.table.ndcg1 = m.at("nDCG@1").get<double>();
    run.table.hr5 = m.at("HR@5").get<double>();
    run.table.ndcg5 = m.at("nDCG@5").get<double>();
    run.table.hr10 = m.at("HR@10").get<double>();
    run.table.ndcg10 = m.at("nDCG@10").get<double>();
    run.unresolved_titles = doc.value("unresolved_titles", std::size_t{0});
    run.excluded_users = doc.value("excluded_users", std::size_t{0});
    run.partial = doc.value("partial", false);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed eval document: ") + e.what());
  }
  return run;
}

json scale_to_json(const ScaleSummary& summary) {
  json means;
  for (const auto& [model, mean] : summary.mean_memorization) {
    means[model] = json{{"mean", mean}, {"mean_pct", format_pct(mean)}};
  }
  json deltas = json::array();
  for (const auto& d : summary.deltas) {
    deltas.push_back(json{{"model_a", d.model_a},
                          {"model_b", d.model_b},
                          {"memorization", d.memorization},
                          {"memorization_pct", format_pct(d.memorization)},
                          {"ndcg", d.ndcg},
                          {"ndcg_pct", format_pct(d.ndcg)},
                          {"hr", d.hr},
                          {"hr_pct", format_pct(d.hr)}});
  }
  return json{{"kind", "scale_summary"},
              {"mean_memorization", std::move(means)},
              {"deltas", std::move(deltas)}};
}

std::string coverage_csv(std::span<const CoverageReport> reports) {
  std::string out = "model,kind,total,matched,coverage_pct\n";
  for (const auto& r : reports) {
    out += r.model;
    out += ',';
    out += entity_kind_name(r.kind);
    out += ',';
    out += std::to_string(r.total);
    out += ',';
    out += std::to_string(r.matched);
    out += ',';
    out += format_pct(r.coverage);
    out += '\n';
  }
  return out;
}

std::string tier_csv(std::span<const CoverageReport> reports) {
  std::string out = "model,tier,coverage_pct\n";
  const char* order[] = {"top", "middle", "bottom"};
  for (const auto& r : reports) {
    for (const char* tier : order) {
      auto it = r.tier_breakdown.find(tier);
      if (it == r.tier_breakdown.end()) continue;
      out += r.model;
      out += ',';
      out += tier;
      out += ',';
      out += format_pct(it->second);
      out += '\n';
    }
  }
  return out;
}

std::string metrics_csv(std::span<const EvalRun> runs) {
  std::string out = "model,HR@1,nDCG@1,HR@5,nDCG@5,HR@10,nDCG@10\n";
  for (const auto& r : runs) {
    out += r.model;
    for (double v : {r.table.hr1, r.table.ndcg1, r.table.hr5, r.table.ndcg5, r.table.hr10,
                     r.table.ndcg10}) {
      out += ',';
      out += format_fixed(v, 4);
    }
    out += '\n';
  }
  return out;
}

std::string scale_means_csv(const ScaleSummary& summary) {
  std::string out = "model,mean_memorization_pct\n";
  for (const auto& [model, mean] : summary.mean_memorization) {
    out += model;
    out += ',';
    out += format_pct(mean);
    out += '\n';
  }
  return out;
}

std::string scale_deltas_csv(const ScaleSummary& summary) {
  std::string out = "model_a,model_b,memorization_delta_pct,ndcg_delta_pct,hr_delta_pct\n";
  for (const auto& d : summary.deltas) {
    out += d.model_a;
    out += ',';
    out += d.model_b;
    out += ',';
    out += format_pct(d.memorization);
    out += ',';
    out += format_pct(d.ndcg);
    out += ',';
    out += format_pct(d.hr);
    out += '\n';
  }
  return out;
}

ReportFormat report_format_from_name(const std::string& name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  if (name == "both") return ReportFormat::Both;
  throw ConfigError("unknown report format '" + name + "'");
}

LoadedDoc load_report_doc(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open report document " + path.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ParseError(path.string() + ": not valid JSON");
  std::string kind = doc.value("kind", std::string{});
  LoadedDoc loaded;
  loaded.source = path;
  loaded.doc = std::move(doc);
  if (kind == "coverage_report") {
    loaded.type = LoadedDoc::Type::Coverage;
  } else if (kind == "eval_run") {
    loaded.type = LoadedDoc::Type::Eval;
  } else if (kind == "scale_summary") {
    loaded.type = LoadedDoc::Type::Scale;
  } else {
    throw ParseError(path.string() + ": unknown document kind '" + kind + "'");
  }
  return loaded;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StorageError("cannot write " + path.string());
  out << content;
  if (!out) throw StorageError("short write to " + path.string());
}

std::vector<std::filesystem::path> emit_report(const std::vector<LoadedDoc>& docs,
                                               ReportFormat format,
                                               const std::filesystem::path& out_dir) {
  if (docs.empty()) throw ConfigError("emit_report requires at least one document");
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;

  if (format == ReportFormat::Csv || format == ReportFormat::Both) {
    std::vector<CoverageReport> coverages;
    std::vector<CoverageReport> tiered;
    std::vector<EvalRun> evals;
    for (const auto& d : docs) {
      if (d.type == LoadedDoc::Type::Coverage) {
        CoverageReport r = coverage_from_json(d.doc);
        if (!r.tier_breakdown.empty()) tiered.push_back(r);
        coverages.push_back(std::move(r));
      } else if (d.type == LoadedDoc::Type::Eval) {
        evals.push_back(eval_from_json(d.doc));
      }
    }
    if (!coverages.empty()) {
      auto path = out_dir / "coverage.csv";
      write_text_file(path, coverage_csv(coverages));
      written.push_back(path);
    }
    if (!tiered.empty()) {
      auto path = out_dir / "tiers.csv";
      write_text_file(path, tier_csv(tiered));
      written.push_back(path);
    }
    if (!evals.empty()) {
      auto path = out_dir / "metrics.csv";
      write_text_file(path, metrics_csv(evals));
      written.push_back(path);
    }
  }
  if (format == ReportFormat::Json || format == ReportFormat::Both) {
    for (const auto& d : docs) {
      auto path = out_dir / (sanitize_filename(d.source.stem().string()) + ".json");
      write_text_file(path, d.doc.dump(2) + "\n");
      written.push_back(path);
    }
  }
  return written;
}

}  // namespace recmem

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "recmem/evaluate.hpp"
#include "recmem/probe.hpp"

namespace recmem {

// All emitters are deterministic: stable row order, fixed float formatting
// (percentages half-up to 2 decimals, metrics to 4), LF line endings.

nlohmann::json coverage_to_json(const CoverageReport& report);
CoverageReport coverage_from_json(const nlohmann::json& doc);

nlohmann::json eval_to_json(const EvalRun& run);
// Restores the aggregate view (model, metrics table, counters); per-user
// ranked lists are not reconstructed.
EvalRun eval_from_json(const nlohmann::json& doc);

nlohmann::json scale_to_json(const ScaleSummary& summary);

// Table-1-shaped coverage rows: model,kind,total,matched,coverage_pct.
std::string coverage_csv(std::span<const CoverageReport> reports);
// model,tier,coverage_pct; three rows per model holding a tier breakdown.
std::string tier_csv(std::span<const CoverageReport> reports);
// Table-2-shaped rows: model,HR@1,nDCG@1,HR@5,nDCG@5,HR@10,nDCG@10.
std::string metrics_csv(std::span<const EvalRun> runs);
std::string scale_means_csv(const ScaleSummary& summary);
std::string scale_deltas_csv(const ScaleSummary& summary);

enum class ReportFormat { Csv, Json, Both };
ReportFormat report_format_from_name(const std::string& name);

struct LoadedDoc {
  enum class Type { Coverage, Eval, Scale };
  Type type;
  std::filesystem::path source;
  nlohmann::json doc;
};

LoadedDoc load_report_doc(const std::filesystem::path& path);

// Re-emits previously stored run documents under out_dir: CSV aggregates
// (coverage.csv / tiers.csv / metrics.csv) and/or verbatim JSON copies.
// Returns the files written; throws ConfigError when docs is empty.
std::vector<std::filesystem::path> emit_report(const std::vector<LoadedDoc>& docs,
                                               ReportFormat format,
                                               const std::filesystem::path& out_dir);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace recmem

#pragma once

#include "warpq/pipeline.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace warpq::eval {

enum class Scale { kMos, kMushra };

struct ManifestEntry {
  std::filesystem::path ref_path;
  std::filesystem::path deg_path;
  std::optional<double> subjective_score;
  std::optional<std::string> condition;
  std::optional<Scale> scale;

  /// Subjective score mapped onto the MOS range (MUSHRA rescaled).
  std::optional<double> subjective_mos() const;
};

struct ManifestIssue {
  std::size_t line = 0;
  std::string message;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  std::vector<ManifestIssue> skipped;  // malformed rows
};

/// Reads a `ref,deg,score,condition,scale` CSV. `#` lines and blank lines
/// are ignored; relative paths resolve against the manifest directory.
Manifest parse_manifest(const std::filesystem::path& path);
Manifest parse_manifest_text(const std::string& text, const std::filesystem::path& base_dir);

double rescale_linear(double score, std::pair<double, double> src, std::pair<double, double> dst);
double mushra_to_mos(double score);

/// Sample Pearson correlation.
double pearson(std::span<const double> x, std::span<const double> y);
/// Pearson correlation of average ranks.
double spearman(std::span<const double> x, std::span<const double> y);
/// 1-based ranks; tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

struct FileResult {
  ManifestEntry entry;
  double qs = 0.0;
  std::vector<double> per_patch;
  std::vector<PatchAlignment> diagnostics;
};

struct Failure {
  ManifestEntry entry;
  std::string kind;
  std::string message;
};

struct ConditionSummary {
  std::string condition;
  std::size_t count = 0;
  double mean_qs = 0.0;
  std::optional<double> mean_subjective;  // MOS range
};

enum class CorrelationLevel { kPerCondition, kPerSample };

struct EvalReport {
  std::vector<FileResult> per_file;  // manifest order
  std::vector<ConditionSummary> per_condition;  // first-appearance order
  std::vector<Failure> failures;
  CorrelationLevel level = CorrelationLevel::kPerCondition;
  std::optional<double> pearson;
  std::optional<double> spearman;
  std::size_t correlation_points = 0;

  bool all_failed() const { return per_file.empty() && !failures.empty(); }
  bool operator==(const EvalReport&) const = default;
};

bool operator==(const ManifestEntry& a, const ManifestEntry& b);
bool operator==(const FileResult& a, const FileResult& b);
bool operator==(const Failure& a, const Failure& b);
bool operator==(const ConditionSummary& a, const ConditionSummary& b);

/// Parallelism used when none is given: $WARPQ_JOBS, else hardware threads.
unsigned default_parallelism();

/// Scores every entry; per-entry failures are recorded, never thrown.
/// Results do not depend on the parallelism degree. Throws
/// Error(kInvalidArgument) for an empty list; a report whose every entry
/// failed is returned as-is and flagged by all_failed().
EvalReport batch_score(std::span<const ManifestEntry> entries, const WarpQConfig& config,
                       unsigned parallelism);

/// Per-condition means over successful entries.
std::vector<ConditionSummary> summarize_conditions(std::span<const FileResult> results);

/// Fills pearson/spearman (signed, lower qs = better) at the requested
/// level. Left empty when fewer than three usable points or a constant
/// series.
void compute_correlations(EvalReport& report, CorrelationLevel level);

enum class ReportFormat { kCsv, kJson };

nlohmann::json report_to_json(const EvalReport& report, bool include_diagnostics = false);
EvalReport report_from_json(const nlohmann::json& j);
std::string report_to_csv(const EvalReport& report);

/// Throws Error(kIo) when the destination cannot be written.
void emit_report(const EvalReport& report, ReportFormat format, const std::filesystem::path& path,
                 bool include_diagnostics = false);

}  // namespace warpq::eval

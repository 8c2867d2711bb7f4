// warpq: score speech pairs or whole manifests.
//
//   warpq score --ref clean.wav --deg coded.wav [--json] [--diagnostics]
//   warpq batch --manifest list.csv --out report.csv --format csv|json
//               [--per-sample] [--jobs N] [--diagnostics]
//
// Exit codes: 0 success, 1 usage error, 2 scoring failed (every entry in
// batch mode), 3 I/O error.

#include "warpq/config.hpp"
#include "warpq/eval.hpp"
#include "warpq/pipeline.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <iomanip>
#include <iostream>
#include <optional>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitScoringFailed = 2;
constexpr int kExitIo = 3;

struct ConfigFlags {
  std::string config_file;
  std::optional<Eigen::Index> patch_frames;
  std::optional<double> patch_overlap;
  std::optional<int> n_mfcc;
  std::optional<double> f_max;
  std::optional<int> window_ms;
  std::optional<int> hop_ms;
  std::optional<int> lifter;
  std::optional<int> vad_frame_ms;
  std::optional<int> vad_aggressiveness;
  std::optional<std::string> steps;

  void add_to(CLI::App& app) {
    app.add_option("--config", config_file, "key=value configuration file");
    app.add_option("--patch-frames", patch_frames, "frames per degraded patch (default 100)");
    app.add_option("--patch-overlap", patch_overlap, "patch overlap fraction (default 0.5)");
    app.add_option("--n-mfcc", n_mfcc, "cepstral coefficients / mel bands (default 12)");
    app.add_option("--f-max", f_max, "upper mel frequency in Hz (default 5000)");
    app.add_option("--window-ms", window_ms, "analysis window in ms (default 32)");
    app.add_option("--hop-ms", hop_ms, "frame hop in ms (default 4)");
    app.add_option("--lifter", lifter, "lifter parameter (default 3)");
    app.add_option("--vad-frame-ms", vad_frame_ms, "VAD frame size: 10, 20 or 30 (default 10)");
    app.add_option("--vad-aggressiveness", vad_aggressiveness, "VAD aggressiveness 0..3 (default 1)");
    app.add_option("--steps", steps, "DTW step set, e.g. \"1,1;3,2;1,3\"");
  }

  warpq::WarpQConfig build() const {
    warpq::WarpQConfig c;
    if (!config_file.empty()) warpq::apply_config_file(c, config_file);
    if (patch_frames) c.patch_frames = *patch_frames;
    if (patch_overlap) c.patch_overlap = *patch_overlap;
    if (n_mfcc) c.n_mfcc = *n_mfcc;
    if (f_max) c.f_max_hz = *f_max;
    if (window_ms) c.window_ms = *window_ms;
    if (hop_ms) c.hop_ms = *hop_ms;
    if (lifter) c.lifter = *lifter;
    if (vad_frame_ms) c.vad.frame_ms = *vad_frame_ms;
    if (vad_aggressiveness) c.vad.aggressiveness = *vad_aggressiveness;
    if (steps) c.steps = warpq::parse_step_set(*steps);
    c.validate();
    return c;
  }
};


int run_score(const std::string& ref, const std::string& deg, bool json, bool diagnostics,
              const warpq::WarpQConfig& config) {
  const auto score =
      warpq::warpq_score(warpq::load_waveform(ref), warpq::load_waveform(deg), config);
  if (json) {
    nlohmann::json j{{"ref", ref}, {"deg", deg}, {"qs", score.qs}, {"num_patches", score.num_patches()}};
    if (diagnostics) {
      j["per_patch"] = score.per_patch;
      const double hop = config.hop_ms / 1000.0;
      for (const auto& d : score.diagnostics)
        j["diagnostics"].push_back({{"start_frame", d.start_frame},
                                    {"frames", d.frames},
                                    {"a_star", d.a_star},
                                    {"b_star", d.b_star},
                                    {"a_star_s", warpq::frame_to_seconds(d.a_star, hop)},
                                    {"b_star_s", warpq::frame_to_seconds(d.b_star, hop)}});
    }
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << std::setprecision(17) << score.qs << '\n';
    if (diagnostics)
      for (std::size_t i = 0; i < score.per_patch.size(); ++i)
        std::cout << "patch " << i << " start=" << score.diagnostics[i].start_frame
                  << " cost=" << score.per_patch[i] << " a*=" << score.diagnostics[i].a_star
                  << " b*=" << score.diagnostics[i].b_star << '\n';
  }
  return kExitOk;
}

int run_batch(const std::string& manifest_path, const std::string& out, const std::string& format,
              bool per_sample, unsigned jobs, bool diagnostics, const warpq::WarpQConfig& config) {
  namespace ev = warpq::eval;
  const ev::Manifest manifest = ev::parse_manifest(manifest_path);
  for (const auto& issue : manifest.skipped)
    std::cerr << manifest_path << ":" << issue.line << ": skipped row: " << issue.message << '\n';
  if (manifest.entries.empty()) {
    std::cerr << "error: manifest has no usable entries\n";
    return kExitScoringFailed;
  }

  ev::EvalReport report = ev::batch_score(manifest.entries, config, jobs);
  ev::compute_correlations(report, per_sample ? ev::CorrelationLevel::kPerSample
                                              : ev::CorrelationLevel::kPerCondition);
  for (const auto& f : report.failures)
    std::cerr << "failed: " << f.entry.deg_path.string() << " (" << f.kind << "): " << f.message << '\n';
  ev::emit_report(report, format == "json" ? ev::ReportFormat::kJson : ev::ReportFormat::kCsv, out,
                  diagnostics);
  std::cerr << "scored " << report.per_file.size() << "/" << manifest.entries.size() << " entries";
  if (report.pearson)
    std::cerr << "; pearson " << *report.pearson << ", spearman " << *report.spearman << " over "
              << report.correlation_points << " points";
  std::cerr << '\n';
  return report.all_failed() ? kExitScoringFailed : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"warpq: full-reference speech quality metric"};
  app.require_subcommand(1);

  ConfigFlags score_flags, batch_flags;

  auto* score = app.add_subcommand("score", "score one reference/degraded pair");
  std::string ref, deg;
  bool json = false, score_diag = false;
  score->add_option("--ref", ref, "reference WAV")->required();
  score->add_option("--deg", deg, "degraded WAV")->required();
  score->add_flag("--json", json, "print a JSON object");
  score->add_flag("--diagnostics", score_diag, "include per-patch costs and alignment indices");
  score_flags.add_to(*score);

  auto* batch = app.add_subcommand("batch", "score every row of a manifest");
  std::string manifest, out, format = "csv";
  bool per_sample = false, batch_diag = false;
  unsigned jobs = warpq::eval::default_parallelism();
  batch->add_option("--manifest", manifest, "CSV with header ref,deg,score,condition,scale")->required();
  batch->add_option("--out", out, "report destination")->required();
  batch->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  batch->add_flag("--per-sample", per_sample, "correlate per file instead of per condition");
  batch->add_option("--jobs", jobs, "worker threads (default $WARPQ_JOBS or CPU count)")
      ->check(CLI::PositiveNumber);
  batch->add_flag("--diagnostics", batch_diag, "include per-patch data in JSON reports");
  batch_flags.add_to(*batch);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  warpq::WarpQConfig config;
  try {
    config = *score ? score_flags.build() : batch_flags.build();
  } catch (const warpq::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == warpq::ErrorKind::kIo ? kExitIo : kExitUsage;
  }

  try {
    if (*score) return run_score(ref, deg, json, score_diag, config);
    return run_batch(manifest, out, format, per_sample, jobs, batch_diag, config);
  } catch (const warpq::Error& e) {
    std::cerr << "error (" << warpq::to_string(e.kind()) << "): " << e.what() << '\n';
    if (e.kind() == warpq::ErrorKind::kIo) return kExitIo;
    // Malformed manifest header is a usage problem; anything else is scoring.
    if (*batch && e.kind() == warpq::ErrorKind::kInvalidArgument) return kExitUsage;
    return kExitScoringFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitScoringFailed;
  }
}

#include "warpq/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace warpq {

void WarpQConfig::validate() const {
  if (sample_rate_hz <= 0) throw Error(ErrorKind::kInvalidArgument, "sample rate must be positive");
  if (patch_frames < 4)
    throw Error(ErrorKind::kInvalidArgument, "patch length must be at least 4 frames");
  if (!(patch_overlap >= 0.0 && patch_overlap < 1.0))
    throw Error(ErrorKind::kInvalidArgument, "patch overlap must be in [0, 1)");
  if (n_mfcc < 1) throw Error(ErrorKind::kInvalidArgument, "n_mfcc must be positive");
  if (window_ms <= 0 || hop_ms <= 0 || hop_ms > window_ms)
    throw Error(ErrorKind::kInvalidArgument, "need 0 < hop_ms <= window_ms");
  if (!(f_max_hz > 0.0) || f_max_hz > sample_rate_hz / 2.0)
    throw Error(ErrorKind::kInvalidArgument, "f_max must be in (0, Nyquist]");
  steps.validate();
}

MfccOptions WarpQConfig::mfcc_options() const {
  MfccOptions o;
  o.frames.window_len_samples = static_cast<Eigen::Index>(sample_rate_hz) * window_ms / 1000;
  o.frames.hop_samples = static_cast<Eigen::Index>(sample_rate_hz) * hop_ms / 1000;
  o.n_mfcc = n_mfcc;
  o.f_max_hz = f_max_hz;
  o.lifter = lifter;
  return o;
}

Eigen::Index WarpQConfig::patch_stride() const {
  const auto stride = static_cast<Eigen::Index>(
      std::lround(static_cast<double>(patch_frames) * (1.0 - patch_overlap)));
  return std::max<Eigen::Index>(stride, 1);
}

MfccMatrix preprocess(const Waveform& w, const WarpQConfig& config) {
  const Waveform resampled = resample(w, config.sample_rate_hz, config.resampler);
  const Waveform speech = remove_silence(resampled, detect_speech(resampled, config.vad));
  const MfccOptions options = config.mfcc_options();
  if (frame_count(speech.samples.size(), options.frames) < 2)
    throw Error(ErrorKind::kNoSpeech, "too little speech after silence removal (" +
                                          std::to_string(speech.samples.size()) + " samples)");
  return cmvn(mfcc(speech, options));
}

std::vector<Patch> extract_patches(const MfccMatrix& degraded, const WarpQConfig& config) {
  const Eigen::Index total = degraded.num_frames();
  if (total < 1 || degraded.num_coeffs() < 1)
    throw Error(ErrorKind::kInvalidArgument, "extract_patches: empty feature matrix");
  const Eigen::Index n = config.patch_frames;
  if (total < n) return {Patch{0, degraded.coeffs}};

  std::vector<Patch> patches;
  const Eigen::Index stride = config.patch_stride();
  for (Eigen::Index start = 0; start + n <= total; start += stride)
    patches.push_back(Patch{start, degraded.coeffs.middleCols(start, n)});
  return patches;
}

PatchCost patch_cost(const Patch& patch, const MfccMatrix& reference, const StepSet& steps) {
  if (patch.matrix.cols() < 1) throw Error(ErrorKind::kInvalidArgument, "patch_cost: empty patch");
  auto result = sdtw(patch.matrix, reference.coeffs, steps);
  return {result.cost / static_cast<double>(patch.matrix.cols()), std::move(result.path)};
}

double median(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::kInvalidArgument, "median of an empty list");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  return sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
}

QualityScore score_features(const MfccMatrix& reference, const MfccMatrix& degraded,
                            const WarpQConfig& config) {
  config.validate();
  if (reference.num_coeffs() != degraded.num_coeffs())
    throw Error(ErrorKind::kDimensionMismatch, "reference and degraded feature sizes differ");

  QualityScore score;
  for (const Patch& patch : extract_patches(degraded, config)) {
    const PatchCost c = patch_cost(patch, reference, config.steps);
    score.per_patch.push_back(c.cost);
    score.diagnostics.push_back(
        {patch.start_frame, patch.matrix.cols(), c.path.a_star, c.path.b_star});
  }
  score.qs = median(score.per_patch);
  return score;
}

QualityScore warpq_score(const Waveform& reference, const Waveform& degraded,
                         const WarpQConfig& config) {
  config.validate();
  return score_features(preprocess(reference, config), preprocess(degraded, config), config);
}

}  // namespace warpq

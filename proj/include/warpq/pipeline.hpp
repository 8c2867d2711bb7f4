#pragma once

#include "warpq/audio.hpp"
#include "warpq/features.hpp"
#include "warpq/resample.hpp"
#include "warpq/sdtw.hpp"
#include "warpq/vad.hpp"

#include <span>
#include <vector>

namespace warpq {

struct WarpQConfig {
  int sample_rate_hz = kWorkingRateHz;
  Eigen::Index patch_frames = 100;  // 400 ms at a 4 ms hop
  double patch_overlap = 0.5;
  int n_mfcc = 12;
  double f_max_hz = 5000.0;
  int window_ms = 32;
  int hop_ms = 4;
  int lifter = 3;
  VadOptions vad;
  StepSet steps = StepSet::standard();
  ResamplerOptions resampler;

  void validate() const;
  MfccOptions mfcc_options() const;
  Eigen::Index patch_stride() const;
};

struct Patch {
  Eigen::Index start_frame = 0;  // 0-based column in the degraded matrix
  Eigen::MatrixXd matrix;        // K x N
};

struct PatchAlignment {
  Eigen::Index start_frame = 0;
  Eigen::Index frames = 0;
  Eigen::Index a_star = 0;  // 1-based columns of the reference
  Eigen::Index b_star = 0;
};

struct QualityScore {
  double qs = 0.0;  // lower is better
  std::vector<double> per_patch;
  std::vector<PatchAlignment> diagnostics;

  std::size_t num_patches() const { return per_patch.size(); }
};

/// Resample, strip silence, extract MFCCs and normalise them.
MfccMatrix preprocess(const Waveform& w, const WarpQConfig& config = {});

/// Patches at starts 0, S, 2S, ... with S = round(N (1 - overlap)); a
/// matrix shorter than N yields a single whole-matrix patch.
std::vector<Patch> extract_patches(const MfccMatrix& degraded, const WarpQConfig& config = {});

struct PatchCost {
  double cost = 0.0;
  WarpPath path;
};

/// SDTW cost of the patch against the full reference, divided by the number
/// of frames in the patch.
PatchCost patch_cost(const Patch& patch, const MfccMatrix& reference,
                     const StepSet& steps = StepSet::standard());

/// Median; even counts average the two middle values.
double median(std::span<const double> values);

/// Scores already-normalised feature matrices.
QualityScore score_features(const MfccMatrix& reference, const MfccMatrix& degraded,
                            const WarpQConfig& config = {});

/// Full metric: median of per-patch normalised SDTW costs.
QualityScore warpq_score(const Waveform& reference, const Waveform& degraded,
                         const WarpQConfig& config = {});

inline double frame_to_seconds(Eigen::Index index, double hop_seconds) {
  return static_cast<double>(index) * hop_seconds;
}

}  // namespace warpq

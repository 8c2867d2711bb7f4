#pragma once

#include "warpq/audio.hpp"

#include <array>
#include <vector>

namespace warpq {

struct VadOptions {
  int frame_ms = 10;
  int aggressiveness = 1;
  // Ratio applied to the noise floor, indexed by aggressiveness.
  std::array<double, 4> threshold_ratio = {2.0, 3.0, 4.5, 6.0};
  double absolute_floor = 1e-4;
  // Noise floor is the 10th percentile of frame RMS in a centred window of
  // this many frames, capped at noise_floor_cap.
  int noise_window_frames = 100;
  double noise_percentile = 0.10;
  double noise_floor_cap = 0.01;
  int hangover_frames = 3;
};

struct VadDecision {
  int frame_ms = 10;
  std::vector<bool> flags;  // one per full frame, true = speech

  std::size_t speech_frames() const;
};

/// Energy detector with hangover. Requires a 16 kHz waveform.
VadDecision detect_speech(const Waveform& w, const VadOptions& options = {});

/// Concatenates speech frames in order. The trailing partial frame is kept
/// iff the last full frame is speech. Throws kNoSpeech on empty output.
Waveform remove_silence(const Waveform& w, const VadDecision& decision);

/// Per-frame RMS over non-overlapping frames of frame_len samples.
Eigen::VectorXd frame_rms(const Eigen::VectorXd& samples, Eigen::Index frame_len);

}  // namespace warpq

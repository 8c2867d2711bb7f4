#pragma once

#include "warpq/audio.hpp"

namespace warpq {

struct ResamplerOptions {
  // Zero crossings of the sinc on each side of the centre tap.
  int zero_crossings = 32;
  double kaiser_beta = 8.6;
  // Cutoff as a fraction of the lower of the two Nyquist frequencies.
  double cutoff_fraction = 0.9;
};

/// Band-limited rational-ratio resampler (Kaiser-windowed sinc, polyphase).
/// Output length is round(len * target / source). Matching rates return the
/// input unchanged.
Waveform resample(const Waveform& w, int target_rate_hz,
                  const ResamplerOptions& options = {});

}  // namespace warpq

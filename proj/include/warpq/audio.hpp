#pragma once

#include <Eigen/Core>

#include <filesystem>

namespace warpq {

/// Mono PCM signal, amplitudes in [-1, 1].
struct Waveform {
  Eigen::VectorXd samples;
  int sample_rate_hz = 0;

  Eigen::Index size() const { return samples.size(); }
  double duration_seconds() const {
    return sample_rate_hz > 0 ? static_cast<double>(samples.size()) / sample_rate_hz : 0.0;
  }
};

/// Working rate of the metric.
inline constexpr int kWorkingRateHz = 16000;

/// Decodes a RIFF/WAVE file (PCM16, PCM24, float32; 1 or 2 channels).
/// Stereo is averaged to mono. Throws Error with kIo, kUnsupportedFormat or
/// kEmptyAudio.
Waveform load_waveform(const std::filesystem::path& path);

/// Writes a mono 16-bit PCM WAV. Samples are clipped to [-1, 1].
void save_waveform_pcm16(const std::filesystem::path& path, const Waveform& w);

}  // namespace warpq

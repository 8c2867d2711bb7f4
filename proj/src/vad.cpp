#include "warpq/vad.hpp"

#include "warpq/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace warpq {
namespace {

Eigen::Index frame_length(int sample_rate_hz, int frame_ms) {
  return static_cast<Eigen::Index>(sample_rate_hz) * frame_ms / 1000;
}

void check_frame_ms(int frame_ms) {
  if (frame_ms != 10 && frame_ms != 20 && frame_ms != 30)
    throw Error(ErrorKind::kInvalidArgument,
                "VAD frame size must be 10, 20 or 30 ms (got " + std::to_string(frame_ms) + ")");
}

double percentile(std::vector<double>& values, double q) {
  const auto k = static_cast<std::ptrdiff_t>(q * static_cast<double>(values.size() - 1));
  std::nth_element(values.begin(), values.begin() + k, values.end());
  return values[static_cast<std::size_t>(k)];
}

}  // namespace

std::size_t VadDecision::speech_frames() const {
  return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
}

Eigen::VectorXd frame_rms(const Eigen::VectorXd& samples, Eigen::Index frame_len) {
  const Eigen::Index frames = frame_len > 0 ? samples.size() / frame_len : 0;
  Eigen::VectorXd rms(frames);
  for (Eigen::Index t = 0; t < frames; ++t)
    rms(t) = std::sqrt(samples.segment(t * frame_len, frame_len).squaredNorm() /
                       static_cast<double>(frame_len));
  return rms;
}

VadDecision detect_speech(const Waveform& w, const VadOptions& options) {
  check_frame_ms(options.frame_ms);
  if (options.aggressiveness < 0 || options.aggressiveness > 3)
    throw Error(ErrorKind::kInvalidArgument, "VAD aggressiveness must be in 0..3");
  if (w.sample_rate_hz != kWorkingRateHz)
    throw Error(ErrorKind::kInvalidArgument,
                "VAD expects 16 kHz input (got " + std::to_string(w.sample_rate_hz) + " Hz)");
  if (w.samples.size() == 0) throw Error(ErrorKind::kEmptyAudio, "VAD: empty waveform");

  const Eigen::VectorXd rms = frame_rms(w.samples, frame_length(w.sample_rate_hz, options.frame_ms));
  const Eigen::Index frames = rms.size();
  const double ratio = options.threshold_ratio[static_cast<std::size_t>(options.aggressiveness)];
  const Eigen::Index half = std::max(options.noise_window_frames / 2, 1);

  std::vector<bool> raw(static_cast<std::size_t>(frames));
  std::vector<double> window;
  for (Eigen::Index t = 0; t < frames; ++t) {
    const Eigen::Index lo = std::max<Eigen::Index>(t - half, 0);
    const Eigen::Index hi = std::min<Eigen::Index>(t + half, frames);
    window.assign(rms.data() + lo, rms.data() + hi);
    const double noise = std::min(percentile(window, options.noise_percentile), options.noise_floor_cap);
    const double threshold = std::max(noise * ratio, options.absolute_floor);
    raw[static_cast<std::size_t>(t)] = rms(t) > threshold;
  }

  VadDecision decision;
  decision.frame_ms = options.frame_ms;
  decision.flags.assign(raw.size(), false);
  int hang = 0;
  for (std::size_t t = 0; t < raw.size(); ++t) {
    if (raw[t]) {
      decision.flags[t] = true;
      hang = options.hangover_frames;
    } else if (hang > 0) {
      decision.flags[t] = true;
      --hang;
    }
  }
  return decision;
}

Waveform remove_silence(const Waveform& w, const VadDecision& decision) {
  check_frame_ms(decision.frame_ms);
  const Eigen::Index frame_len = frame_length(w.sample_rate_hz, decision.frame_ms);
  const auto frames = static_cast<Eigen::Index>(decision.flags.size());
  if (frame_len <= 0 || frames != w.samples.size() / frame_len)
    throw Error(ErrorKind::kInvalidArgument, "VAD decision does not match the waveform");

  const bool keep_tail = frames > 0 && decision.flags.back();
  const Eigen::Index tail = keep_tail ? w.samples.size() - frames * frame_len : 0;
  Waveform out;
  out.sample_rate_hz = w.sample_rate_hz;
  out.samples.resize(static_cast<Eigen::Index>(decision.speech_frames()) * frame_len + tail);
  Eigen::Index pos = 0;
  for (Eigen::Index t = 0; t < frames; ++t) {
    if (!decision.flags[static_cast<std::size_t>(t)]) continue;
    out.samples.segment(pos, frame_len) = w.samples.segment(t * frame_len, frame_len);
    pos += frame_len;
  }
  if (tail > 0) out.samples.tail(tail) = w.samples.tail(tail);
  if (out.samples.size() == 0) throw Error(ErrorKind::kNoSpeech, "no speech detected");
  return out;
}

}  // namespace warpq

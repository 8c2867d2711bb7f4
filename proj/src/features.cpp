#include "warpq/features.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

namespace warpq {

Eigen::VectorXd hann_window(Eigen::Index length) {
  Eigen::VectorXd w(length);
  for (Eigen::Index i = 0; i < length; ++i)
    w(i) = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / length);
  return w;
}

Eigen::MatrixXd power_spectrogram(const Eigen::VectorXd& samples, const FrameParams& params) {
  if (params.window_len_samples <= 0 || params.hop_samples <= 0 ||
      params.hop_samples > params.window_len_samples)
    throw Error(ErrorKind::kInvalidArgument, "frame parameters: need 0 < hop <= window");
  const Eigen::Index frames = frame_count(samples.size(), params);
  if (frames == 0)
    throw Error(ErrorKind::kInvalidArgument,
                "signal shorter than one analysis window (" + std::to_string(samples.size()) +
                    " < " + std::to_string(params.window_len_samples) + " samples)");

  const Eigen::Index n_fft = params.window_len_samples;
  const Eigen::Index n_bins = n_fft / 2 + 1;
  const Eigen::VectorXd window = hann_window(n_fft);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> frame(static_cast<std::size_t>(n_fft));
  std::vector<std::complex<double>> spectrum;

  Eigen::MatrixXd power(n_bins, frames);
  for (Eigen::Index t = 0; t < frames; ++t) {
    const Eigen::Index start = t * params.hop_samples;
    for (Eigen::Index i = 0; i < n_fft; ++i)
      frame[static_cast<std::size_t>(i)] = samples(start + i) * window(i);
    fft.fwd(spectrum, frame);
    for (Eigen::Index k = 0; k < n_bins; ++k) power(k, t) = std::norm(spectrum[static_cast<std::size_t>(k)]);
  }
  return power;
}

MfccMatrix cepstra(const Waveform& w, const MfccOptions& options) {
  if (options.n_mfcc < 1) throw Error(ErrorKind::kInvalidArgument, "n_mfcc must be positive");
  if (w.sample_rate_hz <= 0) throw Error(ErrorKind::kInvalidArgument, "invalid sample rate");
  const Eigen::MatrixXd power = power_spectrogram(w.samples, options.frames);
  const Eigen::MatrixXd fb =
      mel_filterbank<double>(options.n_mfcc, options.f_min_hz, options.f_max_hz,
                             static_cast<int>(options.frames.window_len_samples), w.sample_rate_hz);
  const Eigen::MatrixXd log_mel =
      (10.0 * (fb * power).array().max(options.power_floor).log10()).matrix();

  MfccMatrix out;
  out.coeffs = dct2_matrix<double>(options.n_mfcc, options.n_mfcc) * log_mel;
  out.hop_seconds = static_cast<double>(options.frames.hop_samples) / w.sample_rate_hz;
  return out;
}

MfccMatrix mfcc(const Waveform& w, const MfccOptions& options) {
  MfccMatrix out = cepstra(w, options);
  out.coeffs = lifter_weights<double>(options.n_mfcc, options.lifter).asDiagonal() * out.coeffs;
  return out;
}

}  // namespace warpq

#pragma once

#include "warpq/audio.hpp"
#include "warpq/error.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace warpq {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct FrameParams {
  Eigen::Index window_len_samples = 512;  // 32 ms at 16 kHz
  Eigen::Index hop_samples = 64;          // 4 ms at 16 kHz
};

struct MfccOptions {
  FrameParams frames;
  int n_mfcc = 12;
  double f_min_hz = 0.0;
  double f_max_hz = 5000.0;
  int lifter = 3;
  double power_floor = 1e-10;
};

/// K x T cepstral matrix: one column per frame.
template <typename Scalar>
struct BasicMfccMatrix {
  Matrix<Scalar> coeffs;
  double hop_seconds = 0.0;

  Eigen::Index num_coeffs() const { return coeffs.rows(); }
  Eigen::Index num_frames() const { return coeffs.cols(); }
};

using MfccMatrix = BasicMfccMatrix<double>;

// HTK mel scale.
inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// Triangular filters with centres equally spaced in mel between f_min and
/// f_max. Each filter integrates to one over Hz. Returns n_mels x (n_fft/2+1).
template <typename Scalar = double>
Matrix<Scalar> mel_filterbank(int n_mels, double f_min, double f_max, int n_fft,
                              double rate) {
  if (n_mels < 1) throw Error(ErrorKind::kInvalidArgument, "mel_filterbank: n_mels < 1");
  if (n_fft < 2) throw Error(ErrorKind::kInvalidArgument, "mel_filterbank: n_fft < 2");
  if (f_max > rate / 2.0)
    throw Error(ErrorKind::kInvalidArgument, "mel_filterbank: f_max above Nyquist");
  if (!(f_min >= 0.0 && f_min < f_max))
    throw Error(ErrorKind::kInvalidArgument, "mel_filterbank: need 0 <= f_min < f_max");

  const Eigen::Index n_bins = n_fft / 2 + 1;
  const double mel_lo = hz_to_mel(f_min);
  const double mel_hi = hz_to_mel(f_max);
  Eigen::VectorXd edges(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i)
    edges(i) = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (n_mels + 1));

  Matrix<Scalar> fb = Matrix<Scalar>::Zero(n_mels, n_bins);
  for (int m = 0; m < n_mels; ++m) {
    const double lo = edges(m), centre = edges(m + 1), hi = edges(m + 2);
    const double height = 2.0 / (hi - lo);
    for (Eigen::Index k = 0; k < n_bins; ++k) {
      const double f = k * rate / n_fft;
      double w = 0.0;
      if (f > lo && f <= centre)
        w = (f - lo) / (centre - lo);
      else if (f > centre && f < hi)
        w = (hi - f) / (hi - centre);
      fb(m, k) = static_cast<Scalar>(height * w);
    }
  }
  return fb;
}

/// Orthonormal DCT-II basis (n_out x n_in); rows are basis vectors.
template <typename Scalar = double>
Matrix<Scalar> dct2_matrix(int n_out, int n_in) {
  Matrix<Scalar> basis(n_out, n_in);
  for (int k = 0; k < n_out; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / n_in) : std::sqrt(2.0 / n_in);
    for (int n = 0; n < n_in; ++n)
      basis(k, n) = static_cast<Scalar>(
          scale * std::cos(std::numbers::pi * k * (2.0 * n + 1.0) / (2.0 * n_in)));
  }
  return basis;
}

/// Sinusoidal lifter weights 1 + (L/2) sin(pi n / L) for n = 1..count.
template <typename Scalar = double>
Vector<Scalar> lifter_weights(int count, int lifter) {
  Vector<Scalar> w = Vector<Scalar>::Ones(count);
  if (lifter <= 0) return w;
  for (int i = 0; i < count; ++i) {
    const int n = i + 1;
    // sin(pi n / L) vanishes at multiples of L; avoid the rounding residue.
    const double s = n % lifter == 0 ? 0.0 : std::sin(std::numbers::pi * n / lifter);
    w(i) = static_cast<Scalar>(1.0 + 0.5 * lifter * s);
  }
  return w;
}

/// Per-row standardisation: subtract the row mean and divide by
/// max(population std, std_floor).
template <typename Scalar>
BasicMfccMatrix<Scalar> cmvn(const BasicMfccMatrix<Scalar>& m, Scalar std_floor = Scalar(1e-8)) {
  const Eigen::Index t = m.num_frames();
  if (t < 2) throw Error(ErrorKind::kInvalidArgument, "cmvn: need at least two frames");
  BasicMfccMatrix<Scalar> out{m.coeffs, m.hop_seconds};
  for (Eigen::Index r = 0; r < out.coeffs.rows(); ++r) {
    auto row = out.coeffs.row(r);
    if (row.minCoeff() == row.maxCoeff()) {
      row.setZero();
      continue;
    }
    const Scalar mean = row.mean();
    row.array() -= mean;
    const Scalar sd = std::sqrt(row.squaredNorm() / static_cast<Scalar>(t));
    row /= std::max(sd, std_floor);
  }
  return out;
}

/// Number of frames produced without centre padding (0 if too short).
inline Eigen::Index frame_count(Eigen::Index n_samples, const FrameParams& p) {
  if (n_samples < p.window_len_samples) return 0;
  return (n_samples - p.window_len_samples) / p.hop_samples + 1;
}

/// Periodic Hann window.
Eigen::VectorXd hann_window(Eigen::Index length);

/// Power spectrogram, (n_fft/2+1) x T, frame t covering
/// [t*hop, t*hop + window_len).
Eigen::MatrixXd power_spectrogram(const Eigen::VectorXd& samples, const FrameParams& params);

/// Unliftered cepstra: DCT-II of the dB log-mel energies.
MfccMatrix cepstra(const Waveform& w, const MfccOptions& options = {});

/// Lifted MFCCs (not yet normalised). Requires 16 kHz input at least one
/// window long.
MfccMatrix mfcc(const Waveform& w, const MfccOptions& options = {});

}  // namespace warpq

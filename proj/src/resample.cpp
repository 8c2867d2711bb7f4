#include "warpq/resample.hpp"

#include "warpq/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <vector>

namespace warpq {
namespace {

// Above this many phases the kernel is evaluated per output sample instead
// of from a table.
constexpr std::int64_t kMaxTablePhases = 4096;

class SincKernel {
 public:
  SincKernel(double cutoff, double half_width, double beta)
      : cutoff_(cutoff), half_width_(half_width), beta_(beta),
        norm_(1.0 / std::cyl_bessel_i(0.0, beta)) {}

  // Impulse response at tau input samples from the centre.
  double operator()(double tau) const {
    if (std::abs(tau) > half_width_) return 0.0;
    const double x = 2.0 * cutoff_ * tau;
    const double sinc = x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    const double r = tau / half_width_;
    const double window = std::cyl_bessel_i(0.0, beta_ * std::sqrt(std::max(0.0, 1.0 - r * r))) * norm_;
    return 2.0 * cutoff_ * sinc * window;
  }

 private:
  double cutoff_;      // cycles per input sample
  double half_width_;  // input samples
  double beta_;
  double norm_;
};

// Taps for one fractional phase, normalised to unit DC gain. Index i holds
// the weight of input sample n0 - reach + i.
std::vector<double> phase_taps(const SincKernel& kernel, double frac, int reach) {
  std::vector<double> taps(2 * reach + 2);
  double sum = 0.0;
  for (int i = 0; i < static_cast<int>(taps.size()); ++i) {
    const int offset = i - reach;  // n - n0
    taps[i] = kernel(frac - offset);
    sum += taps[i];
  }
  if (sum != 0.0)
    for (double& t : taps) t /= sum;
  return taps;
}

}  // namespace

Waveform resample(const Waveform& w, int target_rate_hz, const ResamplerOptions& options) {
  if (target_rate_hz <= 0) throw Error(ErrorKind::kInvalidArgument, "resample: target rate must be positive");
  if (w.sample_rate_hz <= 0) throw Error(ErrorKind::kInvalidArgument, "resample: source rate must be positive");
  if (w.samples.size() == 0) throw Error(ErrorKind::kEmptyAudio, "resample: empty waveform");
  if (target_rate_hz == w.sample_rate_hz) return w;

  const std::int64_t src = w.sample_rate_hz;
  const std::int64_t dst = target_rate_hz;
  const std::int64_t g = std::gcd(src, dst);
  const std::int64_t up = dst / g;
  const std::int64_t down = src / g;

  const double cutoff = options.cutoff_fraction * 0.5 * static_cast<double>(std::min(src, dst)) /
                        static_cast<double>(src);
  const double half_width = options.zero_crossings / (2.0 * cutoff);
  const int reach = static_cast<int>(std::ceil(half_width));
  const SincKernel kernel(cutoff, half_width, options.kaiser_beta);

  std::vector<std::vector<double>> table;
  if (up <= kMaxTablePhases) {
    table.reserve(static_cast<std::size_t>(up));
    for (std::int64_t p = 0; p < up; ++p)
      table.push_back(phase_taps(kernel, static_cast<double>(p) / up, reach));
  }

  const std::int64_t in_len = w.samples.size();
  const std::int64_t out_len = (in_len * dst + src / 2) / src;
  Waveform out;
  out.sample_rate_hz = target_rate_hz;
  out.samples.resize(out_len);

  std::vector<double> scratch;
  for (std::int64_t k = 0; k < out_len; ++k) {
    const std::int64_t pos = k * down;
    const std::int64_t n0 = pos / up;
    const std::int64_t phase = pos % up;
    const std::vector<double>* taps;
    if (!table.empty()) {
      taps = &table[static_cast<std::size_t>(phase)];
    } else {
      scratch = phase_taps(kernel, static_cast<double>(phase) / up, reach);
      taps = &scratch;
    }
    const std::int64_t first = n0 - reach;
    const std::int64_t lo = std::max<std::int64_t>(first, 0);
    const std::int64_t hi = std::min<std::int64_t>(first + static_cast<std::int64_t>(taps->size()), in_len);
    double acc = 0.0;
    for (std::int64_t n = lo; n < hi; ++n) acc += (*taps)[static_cast<std::size_t>(n - first)] * w.samples(n);
    out.samples(k) = std::clamp(acc, -1.0, 1.0);
  }
  return out;
}

}  // namespace warpq

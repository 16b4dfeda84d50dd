#include "rirkit/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "rirkit/error.hpp"

namespace rirkit {
namespace {

constexpr int kZeroCrossings = 24;
constexpr int kTableOversample = 512;
constexpr double kKaiserBeta = 8.6;
constexpr double kRolloff = 0.95;

double bessel_i0(double x) {
  double sum = 1.0;
  double term = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 64; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

// Windowed sinc sampled at kTableOversample points per zero crossing, one side.
std::vector<double> build_kernel_table() {
  const int n = kZeroCrossings * kTableOversample + 2;
  std::vector<double> table(n);
  const double norm = bessel_i0(kKaiserBeta);
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / kTableOversample;
    const double r = x / kZeroCrossings;
    const double window = r >= 1.0 ? 0.0 : bessel_i0(kKaiserBeta * std::sqrt(1.0 - r * r)) / norm;
    const double sinc = i == 0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    table[i] = sinc * window;
  }
  return table;
}

const std::vector<double>& kernel_table() {
  static const std::vector<double> table = build_kernel_table();
  return table;
}

double kernel(double x) {
  const auto& table = kernel_table();
  const double pos = std::abs(x) * kTableOversample;
  const auto idx = static_cast<std::size_t>(pos);
  if (idx + 1 >= table.size()) return 0.0;
  const double frac = pos - static_cast<double>(idx);
  return table[idx] + frac * (table[idx + 1] - table[idx]);
}

}  // namespace

Waveform resample(const Waveform& w, int target_rate_hz) {
  if (target_rate_hz <= 0 || w.sample_rate_hz <= 0) {
    throw Error(ErrorCode::kConfiguration, "sample rates must be positive");
  }
  if (target_rate_hz == w.sample_rate_hz) return w;

  const double ratio = static_cast<double>(target_rate_hz) / w.sample_rate_hz;
  // Cutoff in units of the input Nyquist; downsampling narrows it.
  const double cutoff = kRolloff * std::min(1.0, ratio);
  const double half_width = kZeroCrossings / cutoff;

  const auto n_in = static_cast<std::ptrdiff_t>(w.samples.size());
  const auto n_out = static_cast<std::size_t>(std::llround(static_cast<double>(n_in) * ratio));
  Waveform out;
  out.sample_rate_hz = target_rate_hz;
  out.samples.resize(n_out);

  for (std::size_t j = 0; j < n_out; ++j) {
    const double t = static_cast<double>(j) / ratio;  // position in input samples
    const auto first = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(std::ceil(t - half_width)));
    const auto last = std::min<std::ptrdiff_t>(n_in - 1, static_cast<std::ptrdiff_t>(std::floor(t + half_width)));
    double acc = 0.0;
    for (std::ptrdiff_t i = first; i <= last; ++i) {
      acc += w.samples[static_cast<std::size_t>(i)] * kernel((t - static_cast<double>(i)) * cutoff);
    }
    out.samples[j] = acc * cutoff;
  }
  return out;
}

}  // namespace rirkit

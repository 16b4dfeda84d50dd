#include <algorithm>
#include <cmath>
#include <complex>

#include "rirkit/error.hpp"
#include "rirkit/fft.hpp"
#include "rirkit/synth.hpp"

namespace rirkit {
namespace {

constexpr double kMinGain = 0.01;
constexpr double kMaxGain = 100.0;
constexpr int kMaxRefinements = 30;
constexpr double kSettledDb = 0.01;

// Sum of unit-peak triangles centered on the band peaks, taken over the
// gains in dB: geometric interpolation between centers keeps a floored band
// from leaking its neighbours' level. Held flat beyond the outermost centers.
double filterbank_gain(const std::array<double, kNumMelBands>& gains,
                       const std::array<double, kNumMelBands + 2>& edges, double f) {
  if (f <= edges[1]) return gains.front();
  if (f >= edges[kNumMelBands]) return gains.back();
  for (std::size_t k = 0; k + 1 < kNumMelBands; ++k) {
    const double lo = edges[k + 1];
    const double hi = edges[k + 2];
    if (f <= hi) {
      const double x = (f - lo) / (hi - lo);
      return std::exp((1.0 - x) * std::log(gains[k]) + x * std::log(gains[k + 1]));
    }
  }
  return gains.back();
}

Waveform filter_with(const Waveform& w, const std::array<double, kNumMelBands>& gains) {
  const std::size_t n = next_fast_fft_size(2 * w.size());
  auto spectrum = rfft(w.samples, n);
  const auto edges = mel_band_edges_hz();
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const double f = static_cast<double>(k) * w.sample_rate_hz / static_cast<double>(n);
    spectrum[k] *= filterbank_gain(gains, edges, f);
  }
  Waveform out;
  out.sample_rate_hz = w.sample_rate_hz;
  out.samples = irfft(spectrum, n);
  out.samples.resize(w.size());
  return out;
}

}  // namespace

Waveform apply_mel_eq(const Waveform& w, const MelEnergyProfile& target) {
  validate(w);
  double target_sum = 0.0;
  for (double e : target.energies) {
    if (!(e >= 0.0) || !std::isfinite(e)) {
      throw Error(ErrorCode::kInvalidValue, "EQ profile energies must be finite and non-negative");
    }
    target_sum += e;
  }
  if (!(target_sum > 0.0)) throw Error(ErrorCode::kInvalidValue, "EQ profile is all zero");

  std::array<double, kNumMelBands> gains;
  gains.fill(1.0);
  Waveform current = w;
  for (int round = 0; round < kMaxRefinements; ++round) {
    const MelEnergyProfile measured = mel_energy_profile(current);
    double worst_db = 0.0;
    std::array<double, kNumMelBands> next = gains;
    for (std::size_t k = 0; k < kNumMelBands; ++k) {
      const double m = measured.energies[k];
      const double t = target.energies[k] / target_sum;
      if (t <= 0.0) {
        next[k] = kMinGain;
        continue;
      }
      if (m <= 0.0) continue;
      const double step = std::sqrt(t / m);
      next[k] = std::clamp(gains[k] * step, kMinGain, kMaxGain);
      if (next[k] > kMinGain && next[k] < kMaxGain) {
        worst_db = std::max(worst_db, std::abs(10.0 * std::log10(t / m)));
      }
    }
    if (worst_db < kSettledDb) break;
    gains = next;
    current = filter_with(w, gains);
  }
  return current;
}

}  // namespace rirkit

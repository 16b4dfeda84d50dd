#include "rirkit/spectrum.hpp"

#include <cmath>
#include <numeric>

#include "rirkit/error.hpp"
#include "rirkit/fft.hpp"

namespace rirkit {

double hz_to_mel(double hz) noexcept { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) noexcept { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::array<double, kNumMelBands + 2> mel_band_edges_hz() noexcept {
  std::array<double, kNumMelBands + 2> edges{};
  const double lo = hz_to_mel(kMelLowHz);
  const double hi = hz_to_mel(kMelHighHz);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(lo + (hi - lo) * static_cast<double>(i) / (edges.size() - 1));
  }
  edges.front() = kMelLowHz;
  edges.back() = kMelHighHz;
  return edges;
}

double mel_band_weight(std::size_t band, double f_hz) noexcept {
  static const auto edges = mel_band_edges_hz();
  const double l = edges[band];
  const double c = edges[band + 1];
  const double r = edges[band + 2];
  if (f_hz <= l || f_hz >= r) return 0.0;
  const double tri = f_hz <= c ? (f_hz - l) / (c - l) : (r - f_hz) / (r - c);
  return tri * 2.0 / (r - l);
}

PowerSpectrum power_spectrum(const Waveform& w) {
  PowerSpectrum ps;
  ps.sample_rate_hz = w.sample_rate_hz;
  ps.fft_size = next_fast_fft_size(w.size());
  const auto spec = rfft(w.samples, ps.fft_size);
  ps.power.resize(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k) ps.power[k] = std::norm(spec[k]);
  return ps;
}

std::array<double, kNumMelBands> mel_band_energies(const PowerSpectrum& spectrum) {
  static const auto edges = mel_band_edges_hz();
  std::array<double, kNumMelBands> e{};
  for (std::size_t b = 0; b < kNumMelBands; ++b) {
    const double df = static_cast<double>(spectrum.sample_rate_hz) / spectrum.fft_size;
    const auto k_lo = static_cast<std::size_t>(std::floor(edges[b] / df));
    const auto k_hi = std::min(spectrum.power.size() - 1,
                               static_cast<std::size_t>(std::ceil(edges[b + 2] / df)));
    double acc = 0.0;
    for (std::size_t k = k_lo; k <= k_hi; ++k) {
      acc += spectrum.power[k] * mel_band_weight(b, spectrum.bin_hz(k));
    }
    e[b] = acc;
  }
  return e;
}

MelEnergyProfile mel_energy_profile(const Waveform& w) {
  if (!(peak_abs(w.samples) > 0.0)) {
    throw Error(ErrorCode::kDegenerateSignal, "mel profile of a silent signal");
  }
  const auto e = mel_band_energies(power_spectrum(w));
  const double total = std::accumulate(e.begin(), e.end(), 0.0);
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kDegenerateSignal, "no energy between 20 Hz and 20 kHz");
  }
  MelEnergyProfile profile;
  for (std::size_t b = 0; b < kNumMelBands; ++b) profile.energies[b] = e[b] / total;
  return profile;
}

}  // namespace rirkit

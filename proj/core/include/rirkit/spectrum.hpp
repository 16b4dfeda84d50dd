#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "rirkit/waveform.hpp"

namespace rirkit {

inline constexpr std::size_t kNumMelBands = 20;
inline constexpr double kMelLowHz = 20.0;
inline constexpr double kMelHighHz = 20000.0;

double hz_to_mel(double hz) noexcept;
double mel_to_hz(double mel) noexcept;

/// The 22 mel-spaced break points (Hz) of the 20 triangular bands; band k
/// rises from edge k, peaks at edge k+1 and falls to edge k+2.
std::array<double, kNumMelBands + 2> mel_band_edges_hz() noexcept;

/// Area-normalized triangular weight of band k at frequency f (1/Hz), so a
/// flat spectrum yields equal band energies.
double mel_band_weight(std::size_t band, double f_hz) noexcept;

/// Relative RIR energy per mel band, summing to 1.
struct MelEnergyProfile {
  std::array<double, kNumMelBands> energies{};
};

/// One-sided power spectrum of `w` zero-padded to an FFT-friendly length.
/// bin k corresponds to k * sample_rate / fft_size Hz.
struct PowerSpectrum {
  std::vector<double> power;
  std::size_t fft_size = 0;
  int sample_rate_hz = kDefaultSessionRateHz;
  double bin_hz(std::size_t k) const noexcept {
    return static_cast<double>(k) * sample_rate_hz / static_cast<double>(fft_size);
  }
};
PowerSpectrum power_spectrum(const Waveform& w);

/// Unnormalized mel band energies of a power spectrum.
std::array<double, kNumMelBands> mel_band_energies(const PowerSpectrum& spectrum);

/// Throws kDegenerateSignal for silence.
MelEnergyProfile mel_energy_profile(const Waveform& w);

}  // namespace rirkit

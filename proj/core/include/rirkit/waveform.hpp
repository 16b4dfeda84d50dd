#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rirkit {

inline constexpr int kMinSampleRateHz = 8000;
inline constexpr int kDefaultSessionRateHz = 44100;

/// Mono sample buffer plus its rate. Samples are nominally in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate_hz = kDefaultSessionRateHz;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  double duration_s() const noexcept {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
  std::span<const double> view() const noexcept { return samples; }
};

/// Throws kConfiguration / kInvalidValue unless the waveform is non-empty,
/// finite, and sampled at >= 8 kHz.
void validate(const Waveform& w);

double peak_abs(std::span<const double> x) noexcept;

/// Sum of squared samples over [begin, end), clipped to the buffer.
double energy(std::span<const double> x, std::size_t begin, std::size_t end) noexcept;
double energy(std::span<const double> x) noexcept;

std::size_t seconds_to_samples(double seconds, int sample_rate_hz) noexcept;

/// Returns a copy truncated or zero-padded to exactly `num_samples`.
Waveform fit_length(const Waveform& w, std::size_t num_samples);

Waveform scaled(const Waveform& w, double gain);

/// Full linear convolution, length a + b - 1 (FFT based).
Waveform convolve(const Waveform& a, const Waveform& b);

}  // namespace rirkit

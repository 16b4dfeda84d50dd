#include "rirkit/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rirkit/error.hpp"
#include "rirkit/fft.hpp"

namespace rirkit {

void validate(const Waveform& w) {
  if (w.sample_rate_hz < kMinSampleRateHz) {
    throw Error(ErrorCode::kConfiguration,
                "sample rate " + std::to_string(w.sample_rate_hz) + " Hz is below 8000 Hz");
  }
  if (w.samples.empty()) throw Error(ErrorCode::kInvalidValue, "waveform is empty");
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    if (!std::isfinite(w.samples[i])) {
      throw Error(ErrorCode::kInvalidValue, "non-finite sample at index " + std::to_string(i));
    }
  }
}

double peak_abs(std::span<const double> x) noexcept {
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  return peak;
}

double energy(std::span<const double> x, std::size_t begin, std::size_t end) noexcept {
  end = std::min(end, x.size());
  double acc = 0.0;
  for (std::size_t i = begin; i < end; ++i) acc += x[i] * x[i];
  return acc;
}

double energy(std::span<const double> x) noexcept { return energy(x, 0, x.size()); }

std::size_t seconds_to_samples(double seconds, int sample_rate_hz) noexcept {
  return static_cast<std::size_t>(std::llround(seconds * sample_rate_hz));
}

Waveform fit_length(const Waveform& w, std::size_t num_samples) {
  Waveform out{w.samples, w.sample_rate_hz};
  out.samples.resize(num_samples, 0.0);
  return out;
}

Waveform scaled(const Waveform& w, double gain) {
  Waveform out{w.samples, w.sample_rate_hz};
  for (double& v : out.samples) v *= gain;
  return out;
}

Waveform convolve(const Waveform& a, const Waveform& b) {
  if (a.sample_rate_hz != b.sample_rate_hz) {
    throw Error(ErrorCode::kConfiguration, "cannot convolve signals with different sample rates");
  }
  return Waveform{fft_convolve(a.samples, b.samples), a.sample_rate_hz};
}

}  // namespace rirkit

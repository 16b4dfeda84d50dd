#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rirkit/waveform.hpp"

namespace rirkit {

/// Direct-form II transposed second-order section, a0 normalized to 1.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

/// Cascade of second-order sections.
class SosFilter {
 public:
  SosFilter() = default;
  explicit SosFilter(std::vector<Biquad> sections) : sections_(std::move(sections)) {}

  /// Filters in place starting from a zero state.
  void process(std::span<double> x) const;
  std::span<const Biquad> sections() const noexcept { return sections_; }
  /// Gain applied to the first section's numerator.
  void scale(double gain);

 private:
  std::vector<Biquad> sections_;
};

/// Butterworth band-pass of order 2 * prototype_order between the -3 dB
/// edges f_lo and f_hi (Hz), normalized to unit gain at the geometric center.
SosFilter butterworth_bandpass(int prototype_order, double f_lo_hz, double f_hi_hz,
                               double sample_rate_hz);

/// Butterworth low-pass of the given order with unit DC gain.
SosFilter butterworth_lowpass(int order, double cutoff_hz, double sample_rate_hz);

/// Forward-backward (zero-phase) filtering with `pad` zeros on each side so
/// start-up and ring-out transients are not clipped.
std::vector<double> filtfilt(const SosFilter& filter, std::span<const double> x, std::size_t pad);

/// Octave band centers. Default: 63 Hz ... 8 kHz.
struct BandSet {
  std::vector<double> centers_hz{63.0, 125.0, 250.0, 500.0, 1000.0, 2000.0, 4000.0, 8000.0};
};

/// The 4th-order octave band-pass used for band-wise analysis and synthesis,
/// passband center/sqrt(2) .. center*sqrt(2).
SosFilter octave_band_filter(double center_hz, int sample_rate_hz);

/// Zero-padding length that lets the octave filter at `center_hz` ring out.
std::size_t octave_band_padding(double center_hz, int sample_rate_hz);

/// One zero-phase band-limited copy of `w` per band center. Throws
/// kConfiguration naming the band when a center is at or above Nyquist, or
/// when the centers are not strictly increasing.
std::vector<Waveform> bandpass_filterbank(const Waveform& w, const BandSet& bands = {});

}  // namespace rirkit

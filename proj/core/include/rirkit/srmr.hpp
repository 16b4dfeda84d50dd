#pragma once

#include <array>
#include <cstddef>

#include "rirkit/waveform.hpp"

namespace rirkit {

inline constexpr std::size_t kSrmrAcousticBands = 23;
inline constexpr std::size_t kSrmrModulationBands = 8;

struct SrmrDetail {
  double score = 0.0;
  /// Modulation energy per modulation band, summed over acoustic bands.
  std::array<double, kSrmrModulationBands> modulation_energy{};
};

/// Simplified speech-to-reverberation modulation energy ratio.
///
/// 23 ERB-wide band-pass channels log-spaced from 125 Hz to a quarter of the
/// sample rate; per channel a rectified, 30 Hz low-passed envelope; 8
/// modulation band-passes (Q = 2) log-spaced over 4-128 Hz. The score is the
/// energy in modulation bands 1-4 over bands 5-8. Only meaningful as a
/// relative measure. Throws kConfiguration for inputs shorter than 1 s.
SrmrDetail srmr_lite_detail(const Waveform& w);
double srmr_lite(const Waveform& w);

}  // namespace rirkit

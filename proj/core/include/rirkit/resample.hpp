#pragma once

#include "rirkit/waveform.hpp"

namespace rirkit {

/// Band-limited rate conversion with a Kaiser-windowed sinc kernel.
/// Output length is round(n * target / source). Same-rate input is copied.
Waveform resample(const Waveform& w, int target_rate_hz);

}  // namespace rirkit

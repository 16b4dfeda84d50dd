#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rirkit/acoustic_params.hpp"
#include "rirkit/params.hpp"
#include "rirkit/spectrum.hpp"
#include "rirkit/waveform.hpp"

namespace rirkit {

/// What a synthesized RIR should measure like.
struct SynthTarget {
  AcousticParams params;
  std::optional<MelEnergyProfile> eq_profile;
  double duration_s = 2.0;
  int sample_rate_hz = kDefaultSessionRateHz;
  std::uint64_t seed = 0;
};

struct SynthOptions {
  int max_iterations = 10;
  double reverb_time_tolerance = 0.10;  // relative, T30 and T15
  double d50_tolerance_pct = 5.0;       // absolute percentage points
  double c80_tolerance_db = 1.0;
};

struct SynthReport {
  AcousticParams achieved;
  int iterations = 0;
  bool converged = false;
  /// |achieved - target| / target per slot (C80 compared in linear energy);
  /// NaN where the achieved slot is invalid.
  std::array<double, kNumSlots> relative_errors{};
  /// Human-readable notes on unreachable or clamped targets.
  std::vector<std::string> flags;
};

/// Statistical RIR synthesis by noise shaping.
///
/// A direct impulse is placed at SRD / 343 s. Each octave band adds seeded
/// band-limited noise under a two-slope envelope (EDT slope for the first
/// 10 dB, T30 slope afterwards); direct energy and the 0-50 ms / 50-80 ms
/// segment gains are solved for the D50 and C80 targets. The candidate is
/// then re-analyzed and the per-band controls corrected for up to
/// `max_iterations` rounds. Deterministic given the seed. Unreachable
/// targets yield a best-effort result with report flags; only an invalid
/// target (too short for its T30, bad rate) throws.
std::pair<Waveform, SynthReport> synth_rir(const SynthTarget& target,
                                           const SynthOptions& options = {});

/// Whether the synthesis model can realize `params` within the options'
/// tolerances (checked on the noise-free expected envelope). Targets whose
/// T30 exceeds duration / 1.2 are never realizable.
bool is_realizable(const AcousticParams& params, const SynthOptions& options = {},
                   int sample_rate_hz = kDefaultSessionRateHz, double duration_s = 2.0);

/// Draws broadband T30, EDT, C80, D50 and SRD classes uniformly from the grid
/// and rejects combinations the synthesis model cannot realize. T15 shares
/// the T30 class and every band copies the broadband classes. Values are bin
/// centers.
SynthTarget random_grid_target(std::uint64_t seed, const GridSet& grids = default_grids(),
                               const SynthOptions& options = {},
                               int sample_rate_hz = kDefaultSessionRateHz, double duration_s = 2.0);

/// Re-equalizes `w` so its mel energy profile matches `target`. Band gains
/// are floored at -40 dB. Zero-phase; output length equals input length.
/// Throws kDegenerateSignal for silence.
Waveform apply_mel_eq(const Waveform& w, const MelEnergyProfile& target);

/// 500 ms of seeded uniform white noise, peak-normalized to 1.
Waveform anchor_rir(int sample_rate_hz, std::uint64_t seed = 0);

/// Seeded speech-like test signal: voiced syllables at a roughly 4 Hz rate
/// separated by pauses, peak 0.9. Stand-in for anechoic speech recordings.
Waveform synthetic_speech(std::uint64_t seed, double duration_s = 2.0,
                          int sample_rate_hz = kDefaultSessionRateHz);

}  // namespace rirkit

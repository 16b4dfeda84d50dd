#pragma once

#include <cstddef>
#include <vector>

#include "rirkit/waveform.hpp"

namespace rirkit {

inline constexpr double kSpeedOfSoundMps = 343.0;
inline constexpr double kMinSrdM = 0.3;
inline constexpr double kMaxSrdM = 30.0;
/// Level that stands in for -inf in decay curves.
inline constexpr double kEdcFloorDb = -200.0;

/// Schroeder backward integral in dB, 0 dB at index 0.
struct EnergyDecayCurve {
  std::vector<double> values_db;
  int sample_rate_hz = kDefaultSessionRateHz;
  /// Last sample included in the integration; later entries sit at kEdcFloorDb.
  std::size_t truncation_index = 0;
  /// Estimated noise floor power relative to peak power (dB).
  double noise_floor_db = kEdcFloorDb;
};

/// Noise-floor handling for the backward integration.
struct EdcOptions {
  double tail_fraction = 0.10;    // final part of the signal used as noise estimate
  double local_window_s = 0.005;  // RMS window for the crossing search
  double margin_db = 6.0;         // truncate where local power stops exceeding floor + margin
};

/// Truncated Schroeder integration. Throws kDegenerateSignal on silence.
EnergyDecayCurve energy_decay_curve(const Waveform& w, const EdcOptions& options = {});

enum class ReverbTimeKind { kT30, kT15, kEdt };

/// Least-squares slope over the kind's EDC interval ([-5,-35], [-5,-20] or
/// [0,-10] dB) extrapolated to -60 dB. Throws kInsufficientDecay when the
/// curve does not reach the interval's lower bound before truncation.
double reverb_time(const EnergyDecayCurve& edc, ReverbTimeKind kind);

/// 10 log10(E[onset, onset+80ms) / E[onset+80ms, end)). Returns +inf when the
/// late energy is zero (see is_degenerate_clarity).
double clarity_c80(const Waveform& w, std::size_t onset);
bool is_degenerate_clarity(double c80_db) noexcept;

/// 100 * E[onset, onset+50ms) / E[onset, end).
double definition_d50(const Waveform& w, std::size_t onset);

/// First sample whose magnitude reaches 20 dB below the global peak.
std::size_t detect_onset(const Waveform& w);

/// Direct-path delay times the speed of sound, clamped to [0.3, 30] m.
double srd_from_onset(std::size_t onset, int sample_rate_hz) noexcept;
double estimate_srd(const Waveform& w);

}  // namespace rirkit

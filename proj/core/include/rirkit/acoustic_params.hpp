#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <string>

namespace rirkit {

enum class Measure { kT30, kT15, kEdt, kC80, kD50, kSrd };

inline constexpr std::size_t kNumBands = 8;
inline constexpr std::size_t kNumBandMeasures = 5;  // T30, T15, EDT, C80, D50
inline constexpr std::size_t kNumBroadbandSlots = 6;
inline constexpr std::size_t kNumSlots = kNumBroadbandSlots + kNumBands * kNumBandMeasures;
inline constexpr std::array<double, kNumBands> kBandCentersHz{63,   125,  250,  500,
                                                              1000, 2000, 4000, 8000};

/// A conditioning slot. band < 0 means broadband.
///
/// Slot order is fixed: broadband T30, T15, EDT, C80, D50, SRD; then for each
/// band from 63 Hz to 8 kHz the five measures T30, T15, EDT, C80, D50.
struct Slot {
  Measure measure = Measure::kT30;
  int band = -1;
};

Slot slot_at(std::size_t index);
std::size_t slot_index(Measure measure, int band = -1);
/// JSON-style field name of a measure, e.g. "t30_s" or "srd_m".
std::string measure_field(Measure measure);
/// e.g. "t30_s" for broadband, "t30_s@1000" for the 1 kHz band.
std::string slot_name(std::size_t index);

/// The five per-band measures.
struct Measures {
  double t30_s = 0.0;
  double t15_s = 0.0;
  double edt_s = 0.0;
  double c80_db = 0.0;
  double d50_pct = 0.0;

  double get(Measure m) const;
  void set(Measure m, double value);
};

/// 6 broadband and 8x5 band-wise acoustic parameters. Slots that could not be
/// measured carry the `invalid` bit; their numeric value is unspecified.
struct AcousticParams {
  Measures broadband;
  std::array<Measures, kNumBands> per_band{};
  double srd_m = 1.0;
  std::bitset<kNumSlots> invalid;

  double value(std::size_t slot) const;
  void set_value(std::size_t slot, double v);
  bool valid(std::size_t slot) const { return !invalid.test(slot); }
  bool all_valid() const { return invalid.none(); }
};

}  // namespace rirkit

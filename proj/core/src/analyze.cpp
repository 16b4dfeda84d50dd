#include "rirkit/analyze.hpp"

#include <cmath>

#include "rirkit/error.hpp"

namespace rirkit {
namespace {

// Fills the five measures of one signal; returns a 5-bit invalid mask in
// measure order.
unsigned measure_all(const Waveform& w, std::size_t onset, const EdcOptions& edc_options,
                     Measures& out) {
  unsigned invalid = 0;
  const auto try_set = [&](Measure m, auto&& fn) {
    try {
      const double v = fn();
      out.set(m, v);
      if (!std::isfinite(v)) invalid |= 1u << static_cast<unsigned>(m);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kConfiguration) throw;
      out.set(m, std::nan(""));
      invalid |= 1u << static_cast<unsigned>(m);
    }
  };

  bool have_edc = true;
  EnergyDecayCurve edc;
  try {
    edc = energy_decay_curve(w, edc_options);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerateSignal) throw;
    have_edc = false;
  }
  for (auto [m, kind] : {std::pair{Measure::kT30, ReverbTimeKind::kT30},
                         std::pair{Measure::kT15, ReverbTimeKind::kT15},
                         std::pair{Measure::kEdt, ReverbTimeKind::kEdt}}) {
    if (!have_edc) {
      out.set(m, std::nan(""));
      invalid |= 1u << static_cast<unsigned>(m);
      continue;
    }
    try_set(m, [&] { return reverb_time(edc, kind); });
  }
  try_set(Measure::kC80, [&] { return clarity_c80(w, onset); });
  try_set(Measure::kD50, [&] { return definition_d50(w, onset); });
  return invalid;
}

}  // namespace

AnalysisResult analyze_detailed(const Waveform& w, const AnalysisOptions& options) {
  validate(w);
  AnalysisResult result;
  result.onset = detect_onset(w);  // throws on silence
  result.params.srd_m = srd_from_onset(result.onset, w.sample_rate_hz);
  result.noise_floor_db = energy_decay_curve(w, options.edc).noise_floor_db;

  auto& p = result.params;
  const unsigned bb = measure_all(w, result.onset, options.edc, p.broadband);
  for (std::size_t m = 0; m < kNumBandMeasures; ++m) {
    if (bb & (1u << m)) p.invalid.set(m);
  }

  if (!options.band_wise) {
    for (std::size_t s = kNumBroadbandSlots; s < kNumSlots; ++s) p.invalid.set(s);
    return result;
  }
  BandSet bands;
  bands.centers_hz.assign(kBandCentersHz.begin(), kBandCentersHz.end());
  const auto filtered = bandpass_filterbank(w, bands);
  for (std::size_t b = 0; b < kNumBands; ++b) {
    const unsigned mask = measure_all(filtered[b], result.onset, options.edc, p.per_band[b]);
    for (std::size_t m = 0; m < kNumBandMeasures; ++m) {
      if (mask & (1u << m)) p.invalid.set(kNumBroadbandSlots + b * kNumBandMeasures + m);
    }
  }
  return result;
}

AcousticParams analyze(const Waveform& w, const AnalysisOptions& options) {
  return analyze_detailed(w, options).params;
}

}  // namespace rirkit

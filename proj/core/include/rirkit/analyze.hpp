#pragma once

#include <cstddef>

#include "rirkit/acoustic_params.hpp"
#include "rirkit/decay.hpp"
#include "rirkit/filters.hpp"
#include "rirkit/waveform.hpp"

namespace rirkit {

struct AnalysisOptions {
  EdcOptions edc;
  bool band_wise = true;  // skip the filterbank when only broadband values are needed
};

/// Parameters plus the intermediate quantities batch drivers use for
/// validity decisions.
struct AnalysisResult {
  AcousticParams params;
  std::size_t onset = 0;
  double noise_floor_db = kEdcFloorDb;  // broadband, relative to peak power
};

/// Extracts all 46 acoustic parameters. Broadband measures use the full
/// signal, band-wise ones each octave band; C80 and D50 windows start at the
/// broadband onset in every band. Slots whose measurement fails (insufficient
/// decay, degenerate clarity, too-short signal) are flagged invalid. Throws
/// kDegenerateSignal for silence.
AnalysisResult analyze_detailed(const Waveform& w, const AnalysisOptions& options = {});

AcousticParams analyze(const Waveform& w, const AnalysisOptions& options = {});

}  // namespace rirkit

#pragma once

#include <nlohmann/json.hpp>

#include "rirkit/acoustic_params.hpp"
#include "rirkit/eval.hpp"
#include "rirkit/params.hpp"
#include "rirkit/spectrum.hpp"
#include "rirkit/synth.hpp"

namespace rirkit {

// JSON forms of the domain types. Invalid or non-finite values are written
// as null. Readers throw kInvalidValue on malformed input.

/// {"broadband": {"t30_s": .., ..., "srd_m": ..}, "bands": {"63": {...}, ...}}
nlohmann::json to_json(const AcousticParams& p);
AcousticParams acoustic_params_from_json(const nlohmann::json& j);

/// {"indices": [46 class indices in slot order]}
nlohmann::json to_json(const QuantizedParams& q);
QuantizedParams quantized_params_from_json(const nlohmann::json& j,
                                           const GridSet& grids = default_grids());

nlohmann::json to_json(const ConditioningVector& v);
ConditioningVector conditioning_vector_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MelEnergyProfile& p);
MelEnergyProfile mel_profile_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SynthReport& r);
nlohmann::json to_json(const EvalReport& r);

}  // namespace rirkit

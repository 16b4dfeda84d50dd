#include "rirkit/serialize.hpp"

#include <cmath>
#include <string>

#include "rirkit/error.hpp"

namespace rirkit {
namespace {

constexpr std::array<Measure, 5> kBandMeasures{Measure::kT30, Measure::kT15, Measure::kEdt,
                                               Measure::kC80, Measure::kD50};

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

std::string band_key(std::size_t b) {
  return std::to_string(static_cast<int>(kBandCentersHz[b]));
}

template <typename F>
auto parse(const char* what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidValue, std::string(what) + ": " + e.what());
  }
}

}  // namespace

nlohmann::json to_json(const AcousticParams& p) {
  nlohmann::json j;
  const auto put = [&](nlohmann::json& obj, Measure m, int band) {
    const std::size_t slot = slot_index(m, band);
    obj[measure_field(m)] = p.valid(slot) ? number_or_null(p.value(slot)) : nlohmann::json();
  };
  nlohmann::json broadband = nlohmann::json::object();
  for (Measure m : kBandMeasures) put(broadband, m, -1);
  put(broadband, Measure::kSrd, -1);
  nlohmann::json bands = nlohmann::json::object();
  for (std::size_t b = 0; b < kNumBands; ++b) {
    nlohmann::json band = nlohmann::json::object();
    for (Measure m : kBandMeasures) put(band, m, static_cast<int>(b));
    bands[band_key(b)] = std::move(band);
  }
  j["broadband"] = std::move(broadband);
  j["bands"] = std::move(bands);
  return j;
}

AcousticParams acoustic_params_from_json(const nlohmann::json& j) {
  return parse("acoustic params", [&] {
    AcousticParams p;
    const auto get = [&](const nlohmann::json& obj, Measure m, int band) {
      const std::size_t slot = slot_index(m, band);
      const auto it = obj.find(measure_field(m));
      if (it == obj.end() || it->is_null()) {
        p.invalid.set(slot);
        p.set_value(slot, std::nan(""));
      } else {
        p.set_value(slot, it->get<double>());
      }
    };
    const auto& broadband = j.at("broadband");
    for (Measure m : kBandMeasures) get(broadband, m, -1);
    get(broadband, Measure::kSrd, -1);
    const auto& bands = j.at("bands");
    for (std::size_t b = 0; b < kNumBands; ++b) {
      const auto& band = bands.at(band_key(b));
      for (Measure m : kBandMeasures) get(band, m, static_cast<int>(b));
    }
    return p;
  });
}

nlohmann::json to_json(const QuantizedParams& q) {
  return nlohmann::json{{"indices", q.indices}};
}

QuantizedParams quantized_params_from_json(const nlohmann::json& j, const GridSet& grids) {
  QuantizedParams q = parse("quantized params", [&] {
    QuantizedParams out;
    out.grids = grids;
    const auto& indices = j.at("indices");
    if (indices.size() != kNumSlots) {
      throw Error(ErrorCode::kInvalidValue, "quantized params need 46 indices, got " +
                                                std::to_string(indices.size()));
    }
    for (std::size_t i = 0; i < kNumSlots; ++i) out.indices[i] = indices[i].get<int>();
    return out;
  });
  validate(q);
  return q;
}

nlohmann::json to_json(const ConditioningVector& v) {
  return nlohmann::json{{"mode", v.mode == ConditioningMode::kRaw ? "raw" : "one_hot"},
                        {"values", v.values}};
}

ConditioningVector conditioning_vector_from_json(const nlohmann::json& j) {
  return parse("conditioning vector", [&] {
    ConditioningVector v;
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "raw") {
      v.mode = ConditioningMode::kRaw;
    } else if (mode == "one_hot") {
      v.mode = ConditioningMode::kOneHot;
    } else {
      throw Error(ErrorCode::kInvalidValue, "unknown conditioning mode '" + mode + "'");
    }
    v.values = j.at("values").get<std::vector<double>>();
    return v;
  });
}

nlohmann::json to_json(const MelEnergyProfile& p) {
  return nlohmann::json{{"energies", p.energies}};
}

MelEnergyProfile mel_profile_from_json(const nlohmann::json& j) {
  return parse("mel profile", [&] {
    MelEnergyProfile p;
    const auto& e = j.at("energies");
    if (e.size() != kNumMelBands) {
      throw Error(ErrorCode::kInvalidValue, "mel profile needs 20 energies");
    }
    for (std::size_t i = 0; i < kNumMelBands; ++i) p.energies[i] = e[i].get<double>();
    return p;
  });
}

nlohmann::json to_json(const SynthReport& r) {
  nlohmann::json errors = nlohmann::json::object();
  for (std::size_t slot = 0; slot < kNumSlots; ++slot) {
    errors[slot_name(slot)] = number_or_null(r.relative_errors[slot]);
  }
  return nlohmann::json{{"achieved", to_json(r.achieved)},
                        {"iterations", r.iterations},
                        {"converged", r.converged},
                        {"relative_errors", std::move(errors)},
                        {"flags", r.flags}};
}

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json metrics = nlohmann::json::object();
  for (const MetricSummary& m : r.metrics) {
    metrics[m.name] = {{"mean", number_or_null(m.ci.mean)},
                       {"lower", number_or_null(m.ci.lower)},
                       {"upper", number_or_null(m.ci.upper)},
                       {"count", m.count},
                       {"excluded", m.excluded}};
  }
  return nlohmann::json{
      {"method", r.method}, {"num_samples", r.num_samples}, {"metrics", std::move(metrics)}};
}

}  // namespace rirkit

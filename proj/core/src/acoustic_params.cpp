#include "rirkit/acoustic_params.hpp"

#include "rirkit/error.hpp"

namespace rirkit {
namespace {

constexpr std::array<Measure, kNumBandMeasures> kBandMeasureOrder{
    Measure::kT30, Measure::kT15, Measure::kEdt, Measure::kC80, Measure::kD50};

}  // namespace

Slot slot_at(std::size_t index) {
  if (index >= kNumSlots) throw Error(ErrorCode::kInvalidValue, "slot index out of range");
  if (index < kNumBandMeasures) return {kBandMeasureOrder[index], -1};
  if (index == kNumBandMeasures) return {Measure::kSrd, -1};
  const std::size_t rel = index - kNumBroadbandSlots;
  return {kBandMeasureOrder[rel % kNumBandMeasures], static_cast<int>(rel / kNumBandMeasures)};
}

std::size_t slot_index(Measure measure, int band) {
  if (measure == Measure::kSrd) {
    if (band >= 0) throw Error(ErrorCode::kInvalidValue, "SRD has no band-wise slot");
    return kNumBandMeasures;
  }
  const auto m = static_cast<std::size_t>(measure);
  if (band < 0) return m;
  if (band >= static_cast<int>(kNumBands)) {
    throw Error(ErrorCode::kInvalidValue, "band index out of range");
  }
  return kNumBroadbandSlots + static_cast<std::size_t>(band) * kNumBandMeasures + m;
}

std::string measure_field(Measure measure) {
  switch (measure) {
    case Measure::kT30: return "t30_s";
    case Measure::kT15: return "t15_s";
    case Measure::kEdt: return "edt_s";
    case Measure::kC80: return "c80_db";
    case Measure::kD50: return "d50_pct";
    case Measure::kSrd: return "srd_m";
  }
  return "?";
}

std::string slot_name(std::size_t index) {
  const Slot s = slot_at(index);
  std::string name = measure_field(s.measure);
  if (s.band >= 0) {
    name += "@" + std::to_string(static_cast<int>(kBandCentersHz[static_cast<std::size_t>(s.band)]));
  }
  return name;
}

double Measures::get(Measure m) const {
  switch (m) {
    case Measure::kT30: return t30_s;
    case Measure::kT15: return t15_s;
    case Measure::kEdt: return edt_s;
    case Measure::kC80: return c80_db;
    case Measure::kD50: return d50_pct;
    case Measure::kSrd: break;
  }
  throw Error(ErrorCode::kInvalidValue, "SRD is not a per-band measure");
}

void Measures::set(Measure m, double value) {
  switch (m) {
    case Measure::kT30: t30_s = value; return;
    case Measure::kT15: t15_s = value; return;
    case Measure::kEdt: edt_s = value; return;
    case Measure::kC80: c80_db = value; return;
    case Measure::kD50: d50_pct = value; return;
    case Measure::kSrd: break;
  }
  throw Error(ErrorCode::kInvalidValue, "SRD is not a per-band measure");
}

double AcousticParams::value(std::size_t slot) const {
  const Slot s = slot_at(slot);
  if (s.measure == Measure::kSrd) return srd_m;
  if (s.band < 0) return broadband.get(s.measure);
  return per_band[static_cast<std::size_t>(s.band)].get(s.measure);
}

void AcousticParams::set_value(std::size_t slot, double v) {
  const Slot s = slot_at(slot);
  if (s.measure == Measure::kSrd) {
    srd_m = v;
  } else if (s.band < 0) {
    broadband.set(s.measure, v);
  } else {
    per_band[static_cast<std::size_t>(s.band)].set(s.measure, v);
  }
}

}  // namespace rirkit

#include "rirkit/params.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rirkit/error.hpp"

namespace rirkit {
namespace {

// Positions within this many class widths below a boundary count as on it,
// so bin edges computed through log10 land in the upper class.
constexpr double kBoundarySnap = 1e-9;

double to_axis(double v, const ClassGrid& g) {
  return g.spacing == GridSpacing::kLog ? std::log10(v / g.min) : v - g.min;
}

}  // namespace

double ClassGrid::width() const {
  const double span = spacing == GridSpacing::kLog ? std::log10(max / min) : max - min;
  return span / num_classes;
}

void validate(const ClassGrid& g) {
  if (!(g.min < g.max) || g.num_classes < 2) {
    throw Error(ErrorCode::kConfiguration, "class grid needs min < max and >= 2 classes");
  }
  const bool want_log = g.kind == Measure::kSrd;
  if (want_log != (g.spacing == GridSpacing::kLog)) {
    throw Error(ErrorCode::kConfiguration, "SRD grids are log-spaced, all others linear");
  }
  if (g.spacing == GridSpacing::kLog && !(g.min > 0.0)) {
    throw Error(ErrorCode::kConfiguration, "log grid needs a positive minimum");
  }
}

std::size_t GridSet::one_hot_length() const {
  std::size_t n = 0;
  for (std::size_t s = 0; s < kNumSlots; ++s) n += static_cast<std::size_t>(for_slot(s).num_classes);
  return n;
}

GridSet default_grids() {
  GridSet g;
  g.by_measure[static_cast<std::size_t>(Measure::kT30)] = {Measure::kT30, 0.1, 1.5, 15, GridSpacing::kLinear};
  g.by_measure[static_cast<std::size_t>(Measure::kT15)] = {Measure::kT15, 0.1, 1.5, 15, GridSpacing::kLinear};
  g.by_measure[static_cast<std::size_t>(Measure::kEdt)] = {Measure::kEdt, 0.1, 1.5, 15, GridSpacing::kLinear};
  g.by_measure[static_cast<std::size_t>(Measure::kC80)] = {Measure::kC80, 0.0, 20.0, 11, GridSpacing::kLinear};
  g.by_measure[static_cast<std::size_t>(Measure::kD50)] = {Measure::kD50, 40.0, 100.0, 13, GridSpacing::kLinear};
  g.by_measure[static_cast<std::size_t>(Measure::kSrd)] = {Measure::kSrd, 0.3, 30.0, 10, GridSpacing::kLog};
  return g;
}

int quantize(double value, const ClassGrid& grid) {
  if (std::isnan(value)) throw Error(ErrorCode::kInvalidValue, "cannot quantize NaN");
  const double v = std::clamp(value, grid.min, grid.max);
  const double pos = to_axis(v, grid) / grid.width();
  const auto idx = static_cast<int>(std::floor(pos + kBoundarySnap));
  return std::clamp(idx, 0, grid.num_classes - 1);
}

double dequantize(int index, const ClassGrid& grid) {
  if (index < 0 || index >= grid.num_classes) {
    throw Error(ErrorCode::kInvalidValue, "class index " + std::to_string(index) +
                                              " outside [0, " +
                                              std::to_string(grid.num_classes - 1) + "]");
  }
  const double center = (index + 0.5) * grid.width();
  return grid.spacing == GridSpacing::kLog ? grid.min * std::pow(10.0, center) : grid.min + center;
}

void validate(const QuantizedParams& q) {
  for (std::size_t s = 0; s < kNumSlots; ++s) {
    const int n = q.grids.for_slot(s).num_classes;
    if (q.indices[s] < 0 || q.indices[s] >= n) {
      throw Error(ErrorCode::kInvalidValue, "slot " + slot_name(s) + " index " +
                                                std::to_string(q.indices[s]) + " out of range");
    }
  }
}

QuantizedParams quantize_params(const AcousticParams& p, const GridSet& grids) {
  QuantizedParams q;
  q.grids = grids;
  for (std::size_t s = 0; s < kNumSlots; ++s) {
    double v = p.value(s);
    if (!p.valid(s) && std::isnan(v)) {
      const Slot slot = slot_at(s);
      const std::size_t fallback = slot.band >= 0 ? slot_index(slot.measure) : s;
      if (fallback == s || !p.valid(fallback) || std::isnan(p.value(fallback))) {
        throw Error(ErrorCode::kInvalidValue, "no usable value for slot " + slot_name(s));
      }
      v = p.value(fallback);
    }
    q.indices[s] = quantize(v, grids.for_slot(s));
  }
  return q;
}

AcousticParams dequantize_params(const QuantizedParams& q) {
  AcousticParams p;
  for (std::size_t s = 0; s < kNumSlots; ++s) p.set_value(s, dequantize(q.indices[s], q.grids.for_slot(s)));
  return p;
}

ConditioningVector to_conditioning_vector(const QuantizedParams& q, ConditioningMode mode) {
  validate(q);
  ConditioningVector v;
  v.mode = mode;
  if (mode == ConditioningMode::kRaw) {
    v.values.reserve(kNumSlots);
    for (int idx : q.indices) v.values.push_back(static_cast<double>(idx));
    return v;
  }
  v.values.reserve(q.grids.one_hot_length());
  for (std::size_t s = 0; s < kNumSlots; ++s) {
    const int n = q.grids.for_slot(s).num_classes;
    for (int k = 0; k < n; ++k) v.values.push_back(k == q.indices[s] ? 1.0 : 0.0);
  }
  return v;
}

QuantizedParams from_conditioning_vector(const ConditioningVector& v, const GridSet& grids) {
  QuantizedParams q;
  q.grids = grids;
  if (v.mode == ConditioningMode::kRaw) {
    if (v.values.size() != kNumSlots) {
      throw Error(ErrorCode::kShape, "raw conditioning vector needs 46 entries");
    }
    for (std::size_t s = 0; s < kNumSlots; ++s) {
      const double x = v.values[s];
      if (x != std::floor(x)) throw Error(ErrorCode::kInvalidValue, "non-integral class index");
      q.indices[s] = static_cast<int>(x);
    }
    validate(q);
    return q;
  }
  if (v.values.size() != grids.one_hot_length()) {
    throw Error(ErrorCode::kShape, "one-hot conditioning vector has wrong length");
  }
  std::size_t offset = 0;
  for (std::size_t s = 0; s < kNumSlots; ++s) {
    const int n = grids.for_slot(s).num_classes;
    int hot = -1;
    for (int k = 0; k < n; ++k) {
      const double x = v.values[offset + static_cast<std::size_t>(k)];
      if (x == 1.0 && hot < 0) {
        hot = k;
      } else if (x != 0.0) {
        throw Error(ErrorCode::kInvalidValue, "slot " + slot_name(s) + " block is not one-hot");
      }
    }
    if (hot < 0) throw Error(ErrorCode::kInvalidValue, "slot " + slot_name(s) + " block is empty");
    q.indices[s] = hot;
    offset += static_cast<std::size_t>(n);
  }
  return q;
}

}  // namespace rirkit

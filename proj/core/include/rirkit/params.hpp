#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "rirkit/acoustic_params.hpp"

namespace rirkit {

enum class GridSpacing { kLinear, kLog };

/// Discretization of one measure into equal-width classes (equal width in
/// log10 for log grids).
struct ClassGrid {
  Measure kind = Measure::kT30;
  double min = 0.0;
  double max = 1.0;
  int num_classes = 2;
  GridSpacing spacing = GridSpacing::kLinear;

  /// Class width in physical units (decades for log grids).
  double width() const;
};

/// Throws kConfiguration unless min < max, num_classes >= 2, and the spacing
/// matches the kind (log for SRD, linear otherwise).
void validate(const ClassGrid& grid);

/// One grid per measure, shared by broadband and band-wise slots.
struct GridSet {
  std::array<ClassGrid, 6> by_measure{};

  const ClassGrid& for_measure(Measure m) const {
    return by_measure[static_cast<std::size_t>(m)];
  }
  const ClassGrid& for_slot(std::size_t slot) const { return for_measure(slot_at(slot).measure); }
  /// Sum of class counts over all 46 slots.
  std::size_t one_hot_length() const;
};

/// T30/T15/EDT: 0.1-1.5 s, 15 classes; C80: 0-20 dB, 11; D50: 40-100 %, 13
/// (all linear); SRD: 0.3-30 m, 10 log-spaced classes.
GridSet default_grids();

/// Class index of a physical value. Values are clamped into [min, max] and
/// max maps to the last class. Throws kInvalidValue for NaN.
int quantize(double value, const ClassGrid& grid);

/// Bin center (geometric center for log grids). Throws kInvalidValue for an
/// out-of-range index.
double dequantize(int index, const ClassGrid& grid);

struct QuantizedParams {
  std::array<int, kNumSlots> indices{};
  GridSet grids = default_grids();
};

/// Throws kInvalidValue if any index is outside its grid.
void validate(const QuantizedParams& q);

/// Quantizes every slot. Invalid slots holding +/-inf (degenerate clarity)
/// clamp to the grid ends; other invalid band slots fall back to the
/// broadband value of the same measure. Throws kInvalidValue when no usable
/// value exists.
QuantizedParams quantize_params(const AcousticParams& p, const GridSet& grids = default_grids());

/// Bin centers for every slot; all slots valid.
AcousticParams dequantize_params(const QuantizedParams& q);

enum class ConditioningMode { kRaw, kOneHot };

/// Model-facing layout of a QuantizedParams, in slot order. Raw mode holds
/// the 46 class indices as reals; one-hot mode concatenates one block of
/// num_classes entries per slot.
struct ConditioningVector {
  ConditioningMode mode = ConditioningMode::kRaw;
  std::vector<double> values;
};

ConditioningVector to_conditioning_vector(const QuantizedParams& q, ConditioningMode mode);

/// Inverse of to_conditioning_vector. Throws kShape / kInvalidValue on a
/// malformed vector (wrong length, block not one-hot, non-integral index).
QuantizedParams from_conditioning_vector(const ConditioningVector& v,
                                         const GridSet& grids = default_grids());

}  // namespace rirkit

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "rirkit/acoustic_params.hpp"
#include "rirkit/codec.hpp"
#include "rirkit/guidance.hpp"
#include "rirkit/params.hpp"
#include "rirkit/waveform.hpp"

namespace rirkit {

// Model contracts consumed by the samplers. Implementations must be
// deterministic and safe to share read-only across threads; a null
// condition asks for the unconditional estimate.

class ArModel {
 public:
  virtual ~ArModel() = default;
  virtual int vocab_size() const = 0;
  virtual ScoreVector next_scores(std::span<const int> prefix,
                                  const QuantizedParams* condition) const = 0;
};

/// Per-slot class log-probabilities; entry k has one score per class of
/// slot k's grid.
using ClassLogProbs = std::array<ScoreVector, kNumSlots>;

class ClassifierModel {
 public:
  virtual ~ClassifierModel() = default;
  virtual ClassLogProbs classify(const Waveform& partial) const = 0;
};

/// Code value marking a masked position in MaskedModel inputs.
inline constexpr int kMaskToken = -1;

class MaskedModel {
 public:
  virtual ~MaskedModel() = default;
  virtual int vocab_size() const = 0;
  /// One score vector per (stage, frame), stage-major like Codegram::codes.
  /// Entries for unmasked positions may be empty.
  virtual std::vector<ScoreVector> predict(const Codegram& masked,
                                           const QuantizedParams* condition) const = 0;
};

class VelocityModel {
 public:
  virtual ~VelocityModel() = default;
  virtual LatentSequence velocity(const LatentSequence& x, double t,
                                  const QuantizedParams* condition) const = 0;
};

/// Always prefers the next token of a fixed sequence (score 0 against
/// -1e9 elsewhere). Past the end it is uniform.
class OracleArModel final : public ArModel {
 public:
  OracleArModel(TokenSequence truth, int vocab_size);
  int vocab_size() const override { return vocab_size_; }
  ScoreVector next_scores(std::span<const int> prefix, const QuantizedParams*) const override;

 private:
  TokenSequence truth_;
  int vocab_size_;
};

/// Predicts a fixed codegram with maximal confidence.
class OracleMaskedModel final : public MaskedModel {
 public:
  OracleMaskedModel(Codegram truth, int vocab_size);
  int vocab_size() const override { return vocab_size_; }
  std::vector<ScoreVector> predict(const Codegram& masked, const QuantizedParams*) const override;

 private:
  Codegram truth_;
  int vocab_size_;
};

/// Classifier built on the analyzer: the partial waveform's measured value
/// for each slot is quantized and class log-probabilities fall off as a
/// Gaussian in class distance. Slots that cannot be measured (too short,
/// silent) get a uniform distribution.
class AnalyzerClassifier final : public ClassifierModel {
 public:
  explicit AnalyzerClassifier(GridSet grids = default_grids(), double sigma_classes = 1.0,
                              bool band_wise = false);
  ClassLogProbs classify(const Waveform& partial) const override;

 private:
  GridSet grids_;
  double sigma_;
  bool band_wise_;
};

/// Mean absolute class distance over the 46 slots.
double condition_distance(const QuantizedParams& a, const QuantizedParams& b);

/// Per-position token frequencies of a codegram corpus (additively
/// smoothed). A condition reweights the corpus items by exp(-d / scale),
/// d being condition_distance to each item's parameters.
class PositionalFrequencyModel final : public MaskedModel {
 public:
  PositionalFrequencyModel(std::vector<Codegram> corpus, std::vector<QuantizedParams> labels,
                           int vocab_size, double smoothing = 0.5, double scale = 0.5);
  int vocab_size() const override { return vocab_size_; }
  std::vector<ScoreVector> predict(const Codegram& masked,
                                   const QuantizedParams* condition) const override;

 private:
  std::vector<Codegram> corpus_;
  std::vector<QuantizedParams> labels_;
  int vocab_size_;
  double smoothing_;
  double scale_;
};

/// Exact rectified-flow velocity for the empirical distribution of a latent
/// corpus: v = (E[x1 | x_t] - x) / (1 - t) under x_t = (1 - t) x0 + t x1
/// with standard-normal x0. A condition sets the prior over corpus items
/// to exp(-d / scale) as for PositionalFrequencyModel.
class EmpiricalFlowModel final : public VelocityModel {
 public:
  EmpiricalFlowModel(std::vector<LatentSequence> corpus, std::vector<QuantizedParams> labels,
                     double scale = 0.5);
  LatentSequence velocity(const LatentSequence& x, double t,
                          const QuantizedParams* condition) const override;

 private:
  std::vector<LatentSequence> corpus_;
  std::vector<QuantizedParams> labels_;
  double scale_;
};

}  // namespace rirkit

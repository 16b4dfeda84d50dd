#pragma once

#include <map>
#include <span>
#include <vector>

#include "rirkit/codec.hpp"
#include "rirkit/models.hpp"

namespace rirkit {

/// Additively smoothed n-gram over flattened code sequences. The context is
/// the previous order-1 tokens, shortened at the start of a sequence and
/// backed off to the longest suffix seen in training. Conditioning is
/// ignored, so this is the unconditional AR term for guidance.
class NgramModel final : public ArModel {
 public:
  NgramModel(const std::vector<TokenSequence>& corpus, int order, int vocab_size,
             double smoothing = 0.1);

  int vocab_size() const override { return vocab_size_; }
  int order() const { return order_; }
  /// Log-probabilities (they softmax to exactly the smoothed distribution).
  ScoreVector next_scores(std::span<const int> prefix, const QuantizedParams*) const override;

 private:
  struct Counts {
    std::map<int, double> by_token;
    double total = 0.0;
  };
  int order_;
  int vocab_size_;
  double smoothing_;
  std::map<std::vector<int>, Counts> table_;
};

/// exp of the mean negative log-likelihood per token.
double perplexity(const ArModel& model, const std::vector<TokenSequence>& corpus);

}  // namespace rirkit

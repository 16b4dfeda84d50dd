#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "rirkit/acoustic_params.hpp"

namespace rirkit {

/// Unnormalized log-probabilities over the token vocabulary. -inf marks an
/// impossible token; NaN is rejected.
using ScoreVector = std::vector<double>;

/// Deterministic random source shared by all samplers.
using Rng = std::mt19937_64;

/// Uniform draw in [0, 1) from the top 53 bits, identical on every platform.
double uniform01(Rng& rng) noexcept;

enum class GuidanceMode { kCfg, kCg };

/// Default classifier weight 1 / sqrt(3 N_b) for reverberation times and
/// 1 / sqrt(2 N_b) for C80 / D50, with N_b = 9 (8 bands plus broadband);
/// SRD gets 1.
double default_classifier_weight(Measure m, int num_band_groups = 9);
std::array<double, kNumSlots> default_classifier_weights();

struct GuidanceConfig {
  GuidanceMode mode = GuidanceMode::kCfg;
  double lambda = 1.0;
  std::array<double, kNumSlots> classifier_weights = default_classifier_weights();
  double cfg_weight = 0.0;
  int top_k = 64;
  double temperature = 1.0;
};

/// Throws kConfiguration unless temperature > 0, top_k in [1, vocab_size],
/// cfg_weight >= 0 and all weights finite.
void validate(const GuidanceConfig& cfg, int vocab_size);

/// (1 + w) * cond - w * uncond.
ScoreVector cfg_combine(std::span<const double> cond, std::span<const double> uncond, double w);

struct ClassifierTerm {
  ScoreVector scores;
  double weight = 0.0;
};

/// lambda * ar + sum_k w_k * classifier_k. Terms with zero weight are
/// skipped, so -inf in an unused classifier never leaks into the result.
ScoreVector cg_combine(std::span<const double> ar, std::span<const ClassifierTerm> terms,
                       double lambda);

/// Keeps the top_k highest scores (ties to the lower index), divides by the
/// temperature, and draws from the softmax. Throws kDegenerateDistribution
/// when every score is -inf.
int topk_sample(std::span<const double> scores, int top_k, double temperature, Rng& rng);

/// Same draw, also reporting the post-temperature probability of the chosen
/// token.
struct TokenDraw {
  int token = 0;
  double probability = 0.0;
};
TokenDraw topk_draw(std::span<const double> scores, int top_k, double temperature, Rng& rng);

}  // namespace rirkit

#include "rirkit/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "rirkit/error.hpp"

namespace rirkit {

double uniform01(Rng& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double default_classifier_weight(Measure m, int num_band_groups) {
  switch (m) {
    case Measure::kT30:
    case Measure::kT15:
    case Measure::kEdt: return 1.0 / std::sqrt(3.0 * num_band_groups);
    case Measure::kC80:
    case Measure::kD50: return 1.0 / std::sqrt(2.0 * num_band_groups);
    case Measure::kSrd: return 1.0;
  }
  return 0.0;
}

std::array<double, kNumSlots> default_classifier_weights() {
  std::array<double, kNumSlots> w{};
  for (std::size_t slot = 0; slot < kNumSlots; ++slot) {
    w[slot] = default_classifier_weight(slot_at(slot).measure);
  }
  return w;
}

void validate(const GuidanceConfig& cfg, int vocab_size) {
  if (!(cfg.temperature > 0.0) || !std::isfinite(cfg.temperature)) {
    throw Error(ErrorCode::kConfiguration, "temperature must be positive");
  }
  if (cfg.top_k < 1 || cfg.top_k > vocab_size) {
    throw Error(ErrorCode::kConfiguration, "top_k " + std::to_string(cfg.top_k) +
                                               " outside [1, " + std::to_string(vocab_size) + "]");
  }
  if (!(cfg.cfg_weight >= 0.0) || !std::isfinite(cfg.cfg_weight)) {
    throw Error(ErrorCode::kConfiguration, "CFG weight must be finite and non-negative");
  }
  if (!std::isfinite(cfg.lambda)) throw Error(ErrorCode::kConfiguration, "lambda must be finite");
  for (double w : cfg.classifier_weights) {
    if (!std::isfinite(w)) throw Error(ErrorCode::kConfiguration, "classifier weights must be finite");
  }
}

ScoreVector cfg_combine(std::span<const double> cond, std::span<const double> uncond, double w) {
  if (cond.size() != uncond.size()) {
    throw Error(ErrorCode::kShape, "cfg_combine: " + std::to_string(cond.size()) + " vs " +
                                       std::to_string(uncond.size()) + " scores");
  }
  ScoreVector out(cond.size());
  for (std::size_t i = 0; i < cond.size(); ++i) {
    // Written as cond + w (cond - uncond) so equal inputs pass through exactly.
    out[i] = (w == 0.0 || cond[i] == uncond[i]) ? cond[i] : cond[i] + w * (cond[i] - uncond[i]);
  }
  return out;
}

ScoreVector cg_combine(std::span<const double> ar, std::span<const ClassifierTerm> terms,
                       double lambda) {
  ScoreVector out(ar.size());
  for (std::size_t i = 0; i < ar.size(); ++i) out[i] = lambda == 1.0 ? ar[i] : lambda * ar[i];
  for (const ClassifierTerm& term : terms) {
    if (term.scores.size() != ar.size()) {
      throw Error(ErrorCode::kShape, "cg_combine: classifier term has " +
                                         std::to_string(term.scores.size()) + " scores, AR has " +
                                         std::to_string(ar.size()));
    }
    if (term.weight == 0.0) continue;
    for (std::size_t i = 0; i < ar.size(); ++i) out[i] += term.weight * term.scores[i];
  }
  return out;
}

TokenDraw topk_draw(std::span<const double> scores, int top_k, double temperature, Rng& rng) {
  if (scores.empty()) throw Error(ErrorCode::kShape, "empty score vector");
  if (top_k < 1) throw Error(ErrorCode::kConfiguration, "top_k must be at least 1");
  if (!(temperature > 0.0)) throw Error(ErrorCode::kConfiguration, "temperature must be positive");
  for (double s : scores) {
    if (std::isnan(s)) throw Error(ErrorCode::kInvalidValue, "NaN score");
  }

  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t keep = std::min(order.size(), static_cast<std::size_t>(top_k));
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    [&](int a, int b) {
                      return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
                    });
  order.resize(keep);

  const double best = scores[order.front()];
  if (best == -std::numeric_limits<double>::infinity()) {
    throw Error(ErrorCode::kDegenerateDistribution, "every token has probability zero");
  }
  if (best == std::numeric_limits<double>::infinity()) {
    return {order.front(), 1.0};
  }
  std::vector<double> weights(keep);
  double total = 0.0;
  for (std::size_t i = 0; i < keep; ++i) {
    weights[i] = std::exp((scores[order[i]] - best) / temperature);
    total += weights[i];
  }
  const double target = uniform01(rng) * total;
  double acc = 0.0;
  std::size_t pick = 0;
  for (; pick + 1 < keep; ++pick) {
    acc += weights[pick];
    if (target < acc) break;
  }
  // Never land on a zero-weight entry through rounding at the top end.
  while (pick > 0 && weights[pick] == 0.0) --pick;
  return {order[pick], weights[pick] / total};
}

int topk_sample(std::span<const double> scores, int top_k, double temperature, Rng& rng) {
  return topk_draw(scores, top_k, temperature, rng).token;
}

}  // namespace rirkit

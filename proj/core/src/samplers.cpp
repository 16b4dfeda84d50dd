#include "rirkit/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "rirkit/error.hpp"

namespace rirkit {
namespace {

template <typename F>
auto at_step(std::size_t step, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), "step " + std::to_string(step) + ": " + e.what());
  }
}

void check_scores(const ScoreVector& s, int vocab_size) {
  if (s.size() != static_cast<std::size_t>(vocab_size)) {
    throw Error(ErrorCode::kShape, "model returned " + std::to_string(s.size()) +
                                       " scores for a vocabulary of " +
                                       std::to_string(vocab_size));
  }
}

// Classifier guidance for one AR step: lambda * ar plus the weighted
// log-probability of each slot's target class given the partial RIR with
// the candidate appended.
ScoreVector guided_scores(const ScoreVector& ar, std::vector<int>& tokens,
                          const QuantizedParams& condition, const GuidanceConfig& cfg,
                          const CgContext& cg) {
  const RvqCodebooks& cb = *cg.codebooks;
  const int vocab = static_cast<int>(ar.size());
  std::vector<int> candidates(static_cast<std::size_t>(vocab));
  std::iota(candidates.begin(), candidates.end(), 0);
  if (cg.cg_candidates > 0 && cg.cg_candidates < vocab) {
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](int a, int b) { return ar[a] > ar[b]; });
    candidates.resize(static_cast<std::size_t>(cg.cg_candidates));
    std::sort(candidates.begin(), candidates.end());
  }

  std::vector<ClassifierTerm> terms;
  std::vector<std::size_t> term_slots;
  for (std::size_t slot = 0; slot < kNumSlots; ++slot) {
    if (cfg.classifier_weights[slot] == 0.0) continue;
    terms.push_back({ScoreVector(ar.size(), 0.0), cfg.classifier_weights[slot]});
    term_slots.push_back(slot);
  }

  const std::size_t stages = static_cast<std::size_t>(cb.num_stages);
  tokens.push_back(0);
  const std::size_t padded = (tokens.size() + stages - 1) / stages * stages;
  std::vector<int> frame_tokens(padded, 0);
  std::copy(tokens.begin(), tokens.end(), frame_tokens.begin());
  for (int v : candidates) {
    frame_tokens[tokens.size() - 1] = v;
    const Waveform partial = decode(unflatten(frame_tokens, cb.num_stages), cb);
    const ClassLogProbs lp = cg.classifier->classify(partial);
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::size_t slot = term_slots[i];
      terms[i].scores[static_cast<std::size_t>(v)] =
          lp[slot][static_cast<std::size_t>(condition.indices[slot])];
    }
  }
  tokens.pop_back();

  ScoreVector out = cg_combine(ar, terms, cfg.lambda);
  if (candidates.size() < ar.size()) {
    std::vector<char> keep(ar.size(), 0);
    for (int v : candidates) keep[static_cast<std::size_t>(v)] = 1;
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (!keep[i]) out[i] = -std::numeric_limits<double>::infinity();
    }
  }
  return out;
}

}  // namespace

TokenSequence ar_generate(const ArModel& model, const QuantizedParams* condition,
                          const GuidanceConfig& cfg, std::size_t length, Rng& rng,
                          const CgContext* cg) {
  const int vocab = model.vocab_size();
  validate(cfg, vocab);
  if (cfg.mode == GuidanceMode::kCg) {
    if (condition == nullptr) {
      throw Error(ErrorCode::kConfiguration, "classifier guidance needs a target condition");
    }
    if (cg == nullptr || cg->codebooks == nullptr || cg->classifier == nullptr) {
      throw Error(ErrorCode::kConfiguration, "classifier guidance needs codebooks and a classifier");
    }
    if (cg->codebooks->codebook_size != vocab) {
      throw Error(ErrorCode::kConfiguration, "AR vocabulary differs from the codebook size");
    }
  }

  TokenSequence tokens;
  tokens.reserve(length);
  for (std::size_t step = 0; step < length; ++step) {
    const ScoreVector scores = at_step(step, [&] {
      if (cfg.mode == GuidanceMode::kCg) {
        ScoreVector ar = model.next_scores(tokens, nullptr);
        check_scores(ar, vocab);
        return guided_scores(ar, tokens, *condition, cfg, *cg);
      }
      ScoreVector cond = model.next_scores(tokens, condition);
      check_scores(cond, vocab);
      if (condition == nullptr || cfg.cfg_weight == 0.0) return cond;
      const ScoreVector uncond = model.next_scores(tokens, nullptr);
      check_scores(uncond, vocab);
      return cfg_combine(cond, uncond, cfg.cfg_weight);
    });
    tokens.push_back(
        at_step(step, [&] { return topk_sample(scores, cfg.top_k, cfg.temperature, rng); }));
  }
  return tokens;
}

std::vector<std::size_t> masked_counts(std::size_t num_frames, const MaskSchedule& schedule) {
  const int s_total = schedule.total_steps;
  if (s_total < 1) throw Error(ErrorCode::kConfiguration, "MaskGIT needs at least one step");
  if (static_cast<std::size_t>(s_total) > num_frames) {
    throw Error(ErrorCode::kConfiguration,
                std::to_string(s_total) + " steps cannot unmask " + std::to_string(num_frames) +
                    " frames with a strictly decreasing mask count");
  }
  std::vector<std::size_t> m(static_cast<std::size_t>(s_total) + 1);
  m[0] = num_frames;
  for (int s = 1; s <= s_total; ++s) {
    const double c = std::cos(std::numbers::pi / 2.0 * s / s_total);
    auto target = static_cast<std::size_t>(std::ceil(static_cast<double>(num_frames) * c - 1e-9));
    m[static_cast<std::size_t>(s)] = std::min(target, m[static_cast<std::size_t>(s) - 1] - 1);
  }
  m.back() = 0;
  return m;
}

Codegram maskgit_generate(const MaskedModel& model, const QuantizedParams* condition,
                          int num_stages, std::size_t num_frames, const MaskgitOptions& options,
                          Rng& rng) {
  if (num_stages < 1) throw Error(ErrorCode::kConfiguration, "MaskGIT needs L >= 1");
  if (!(options.temperature > 0.0)) {
    throw Error(ErrorCode::kConfiguration, "temperature must be positive");
  }
  if (!(options.cfg_weight >= 0.0)) {
    throw Error(ErrorCode::kConfiguration, "CFG weight must be non-negative");
  }
  const std::vector<std::size_t> counts = masked_counts(num_frames, options.schedule);
  const int vocab = model.vocab_size();

  Codegram c;
  c.num_stages = num_stages;
  c.num_frames = num_frames;
  c.codes.assign(static_cast<std::size_t>(num_stages) * num_frames, kMaskToken);
  std::vector<char> masked(num_frames, 1);

  for (std::size_t step = 1; step < counts.size(); ++step) {
    const std::vector<ScoreVector> scores = at_step(step, [&] {
      std::vector<ScoreVector> cond = model.predict(c, condition);
      if (condition != nullptr && options.cfg_weight > 0.0) {
        const std::vector<ScoreVector> uncond = model.predict(c, nullptr);
        for (std::size_t i = 0; i < cond.size(); ++i) {
          if (!cond[i].empty()) cond[i] = cfg_combine(cond[i], uncond[i], options.cfg_weight);
        }
      }
      if (cond.size() != c.codes.size()) {
        throw Error(ErrorCode::kShape, "masked model returned the wrong number of positions");
      }
      return cond;
    });

    struct Candidate {
      std::size_t frame;
      double confidence;
      std::vector<int> tokens;
    };
    std::vector<Candidate> drawn;
    for (std::size_t t = 0; t < num_frames; ++t) {
      if (!masked[t]) continue;
      Candidate cand{t, 1.0, std::vector<int>(static_cast<std::size_t>(num_stages))};
      for (int stage = 0; stage < num_stages; ++stage) {
        const ScoreVector& s = scores[static_cast<std::size_t>(stage) * num_frames + t];
        at_step(step, [&] {
          check_scores(s, vocab);
          return 0;
        });
        const TokenDraw d =
            at_step(step, [&] { return topk_draw(s, vocab, options.temperature, rng); });
        cand.tokens[static_cast<std::size_t>(stage)] = d.token;
        cand.confidence *= d.probability;
      }
      drawn.push_back(std::move(cand));
    }
    std::stable_sort(drawn.begin(), drawn.end(), [](const Candidate& a, const Candidate& b) {
      return a.confidence > b.confidence;
    });
    const std::size_t commit = drawn.size() - counts[step];
    for (std::size_t i = 0; i < commit; ++i) {
      const Candidate& cand = drawn[i];
      masked[cand.frame] = 0;
      for (int stage = 0; stage < num_stages; ++stage) {
        c.at(stage, cand.frame) = cand.tokens[static_cast<std::size_t>(stage)];
      }
    }
  }
  return c;
}

double standard_normal(Rng& rng) noexcept {
  const double u1 = 1.0 - uniform01(rng);  // (0, 1]
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

LatentSequence gaussian_latent(std::size_t num_frames, int frame_len, Rng& rng) {
  LatentSequence z;
  z.num_frames = num_frames;
  z.frame_len = frame_len;
  z.values.resize(num_frames * static_cast<std::size_t>(frame_len));
  for (double& v : z.values) v = standard_normal(rng);
  return z;
}

LatentSequence euler_sample(const VelocityModel& model, LatentSequence x0,
                            const QuantizedParams* condition, int steps, double cfg_weight) {
  if (steps < 1) throw Error(ErrorCode::kConfiguration, "Euler sampler needs at least one step");
  if (!(cfg_weight >= 0.0)) throw Error(ErrorCode::kConfiguration, "CFG weight must be non-negative");
  LatentSequence x = std::move(x0);
  const double dt = 1.0 / steps;
  for (int i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    LatentSequence v = model.velocity(x, t, condition);
    if (condition != nullptr && cfg_weight > 0.0) {
      const LatentSequence u = model.velocity(x, t, nullptr);
      v.values = cfg_combine(v.values, u.values, cfg_weight);
    }
    if (v.values.size() != x.values.size()) {
      throw Error(ErrorCode::kShape, "velocity shape differs from the latent");
    }
    for (std::size_t k = 0; k < x.values.size(); ++k) {
      if (!std::isfinite(v.values[k])) {
        throw Error(ErrorCode::kDivergence,
                    "non-finite velocity at step " + std::to_string(i) + ", index " +
                        std::to_string(k));
      }
      x.values[k] += dt * v.values[k];
    }
  }
  return x;
}

}  // namespace rirkit

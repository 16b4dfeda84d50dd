#include <cmath>
#include <numbers>
#include <set>

#include "doctest.h"
#include "rirkit/analyze.hpp"
#include "rirkit/error.hpp"
#include "rirkit/models.hpp"
#include "rirkit/samplers.hpp"

using namespace rirkit;

namespace {

Codegram random_codegram(int stages, std::size_t frames, int vocab, std::uint64_t seed) {
  Rng rng(seed);
  Codegram c;
  c.num_stages = stages;
  c.num_frames = frames;
  c.codes.resize(static_cast<std::size_t>(stages) * frames);
  for (int& v : c.codes) v = static_cast<int>(rng() % static_cast<std::uint64_t>(vocab));
  return c;
}

class UniformAr final : public ArModel {
 public:
  explicit UniformAr(int k) : k_(k) {}
  int vocab_size() const override { return k_; }
  ScoreVector next_scores(std::span<const int>, const QuantizedParams*) const override {
    return ScoreVector(static_cast<std::size_t>(k_), 0.0);
  }

 private:
  int k_;
};

// Records the masked frame count of every query.
class SpyMasked final : public MaskedModel {
 public:
  explicit SpyMasked(Codegram truth) : inner_(truth, 16) {}
  int vocab_size() const override { return 16; }
  std::vector<ScoreVector> predict(const Codegram& masked, const QuantizedParams* c) const override {
    std::set<std::size_t> frames;
    for (std::size_t t = 0; t < masked.num_frames; ++t) {
      if (masked.at(0, t) == kMaskToken) frames.insert(t);
      for (int s = 1; s < masked.num_stages; ++s) {
        REQUIRE((masked.at(s, t) == kMaskToken) == (masked.at(0, t) == kMaskToken));
      }
    }
    calls.push_back(frames);
    return inner_.predict(masked, c);
  }
  mutable std::vector<std::set<std::size_t>> calls;

 private:
  OracleMaskedModel inner_;
};

class ConstantVelocity final : public VelocityModel {
 public:
  LatentSequence velocity(const LatentSequence& x, double, const QuantizedParams* c) const override {
    LatentSequence v = x;
    for (double& e : v.values) e = c != nullptr ? 0.5 : 0.125;
    return v;
  }
};

class Decay final : public VelocityModel {
 public:
  LatentSequence velocity(const LatentSequence& x, double, const QuantizedParams*) const override {
    LatentSequence v = x;
    for (double& e : v.values) e = -e;
    return v;
  }
};

class Exploding final : public VelocityModel {
 public:
  LatentSequence velocity(const LatentSequence& x, double t, const QuantizedParams*) const override {
    LatentSequence v = x;
    for (double& e : v.values) e = t > 0.35 ? std::nan("") : 1.0;
    return v;
  }
};

double euler_endpoint(int steps) {
  LatentSequence x0;
  x0.num_frames = 1;
  x0.frame_len = 1;
  x0.values = {1.0};
  return euler_sample(Decay(), x0, nullptr, steps).values[0];
}

}  // namespace

TEST_CASE("AR decoding with an oracle model reproduces the truth") {
  const Codegram truth = random_codegram(4, 12, 32, 1);
  const OracleArModel model(flatten(truth), 32);
  GuidanceConfig cfg;
  cfg.top_k = 32;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Rng rng(seed);
    const TokenSequence out = ar_generate(model, nullptr, cfg, flatten(truth).size(), rng);
    CHECK(out == flatten(truth));
    CHECK(unflatten(out, 4).codes == truth.codes);
  }
}

TEST_CASE("AR decoding reports the failing step") {
  class Broken final : public ArModel {
   public:
    int vocab_size() const override { return 4; }
    ScoreVector next_scores(std::span<const int> prefix, const QuantizedParams*) const override {
      if (prefix.size() == 3) return ScoreVector(4, std::nan(""));
      return ScoreVector(4, 0.0);
    }
  };
  GuidanceConfig cfg;
  cfg.top_k = 4;
  Rng rng(1);
  try {
    (void)ar_generate(Broken(), nullptr, cfg, 8, rng);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("step 3") != std::string::npos);
  }
}

TEST_CASE("classifier guidance steers toward the target class") {
  // Two-token toy codec: code 0 silent, code 1 an impulse at the frame start.
  // The first impulse fixes the onset, about 0.34 m of SRD per frame. With a
  // sharp classifier a one-class miss scores below "not measurable", so the
  // greedy choice waits for frame 6, the first one in class 4.
  RvqCodebooks cb;
  cb.num_stages = 1;
  cb.codebook_size = 2;
  cb.frame_len = 44;
  cb.sample_rate_hz = 44100;
  cb.vectors.assign(2 * 44, 0.0);
  cb.vectors[44] = 1.0;

  QuantizedParams target;
  target.indices[slot_index(Measure::kSrd)] = 4;  // 1.89-3 m
  GuidanceConfig cfg;
  cfg.mode = GuidanceMode::kCg;
  cfg.top_k = 2;
  cfg.classifier_weights.fill(0.0);
  cfg.classifier_weights[slot_index(Measure::kSrd)] = 20.0;
  const AnalyzerClassifier classifier(default_grids(), 0.4);
  const CgContext ctx{&cb, &classifier, 0};
  const UniformAr ar(2);

  // Oracle: enumerate both candidates on an explicitly built waveform.
  const auto preference = [&](const TokenSequence& prefix) {
    double score[2];
    for (int cand = 0; cand < 2; ++cand) {
      Waveform w;
      w.samples.assign((prefix.size() + 1) * 44, 0.0);
      for (std::size_t i = 0; i < prefix.size(); ++i) w.samples[i * 44] = prefix[i];
      w.samples[prefix.size() * 44] = cand;
      score[cand] = classifier.classify(w)[slot_index(Measure::kSrd)][4];
    }
    if (std::abs(score[0] - score[1]) < 1e-9) return -1;
    return score[1] > score[0] ? 1 : 0;
  };

  int decided = 0, agreed = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const TokenSequence out = ar_generate(ar, &target, cfg, 12, rng, &ctx);
    REQUIRE(out.size() == 12);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const int best = preference(TokenSequence(out.begin(), out.begin() + static_cast<long>(i)));
      if (best < 0) continue;
      ++decided;
      agreed += out[i] == best ? 1 : 0;
    }
    const Waveform w = decode(unflatten(out, 1), cb);
    CHECK(quantize(analyze(w, {.band_wise = false}).srd_m, default_grids().for_measure(Measure::kSrd)) == 4);
  }
  CHECK(decided > 20);
  CHECK(static_cast<double>(agreed) >= 0.95 * decided);
}

TEST_CASE("n-gram style CFG is a no-op when the model ignores the condition") {
  const UniformAr ar(8);
  GuidanceConfig cfg;
  cfg.top_k = 8;
  cfg.cfg_weight = 3.0;
  QuantizedParams cond;
  Rng a(4), b(4);
  CHECK(ar_generate(ar, &cond, cfg, 40, a) == ar_generate(ar, nullptr, cfg, 40, b));
}

TEST_CASE("cosine mask schedule") {
  const auto m = masked_counts(172, MaskSchedule{20});
  REQUIRE(m.size() == 21);
  CHECK(m[0] == 172);
  CHECK(m[10] == 122);
  CHECK(m[10] == static_cast<std::size_t>(std::ceil(172 * std::cos(std::numbers::pi / 4))));
  CHECK(m[20] == 0);
  for (std::size_t s = 1; s < m.size(); ++s) CHECK(m[s] < m[s - 1]);
  for (int steps = 1; steps <= 12; ++steps) {
    const auto n = masked_counts(12, MaskSchedule{steps});
    CHECK(n.back() == 0);
    for (std::size_t s = 1; s < n.size(); ++s) CHECK(n[s] < n[s - 1]);
  }
  CHECK_THROWS_AS((void)masked_counts(5, MaskSchedule{6}), Error);
  CHECK_THROWS_AS((void)masked_counts(5, MaskSchedule{0}), Error);
}

TEST_CASE("MaskGIT with an oracle converges to the truth") {
  const Codegram truth = random_codegram(4, 40, 16, 7);
  const OracleMaskedModel model(truth, 16);
  for (int steps : {1, 5, 20}) {
    for (std::uint64_t seed : {1u, 2u}) {
      MaskgitOptions opts;
      opts.schedule.total_steps = steps;
      Rng rng(seed);
      CHECK(maskgit_generate(model, nullptr, 4, 40, opts, rng).codes == truth.codes);
    }
  }
}

TEST_CASE("MaskGIT masks whole frames and commits each frame once") {
  const Codegram truth = random_codegram(3, 30, 16, 8);
  const SpyMasked spy(truth);
  MaskgitOptions opts;
  opts.schedule.total_steps = 7;
  Rng rng(3);
  (void)maskgit_generate(spy, nullptr, 3, 30, opts, rng);
  const auto counts = masked_counts(30, opts.schedule);
  REQUIRE(spy.calls.size() == 7);
  for (std::size_t s = 0; s < spy.calls.size(); ++s) {
    CHECK(spy.calls[s].size() == counts[s]);
    if (s > 0) {
      for (std::size_t f : spy.calls[s]) CHECK(spy.calls[s - 1].contains(f));
    }
  }
}

TEST_CASE("MaskGIT is reproducible with a corpus model") {
  std::vector<Codegram> corpus{random_codegram(2, 20, 16, 1), random_codegram(2, 20, 16, 2)};
  std::vector<QuantizedParams> labels(2);
  labels[1].indices.fill(1);
  const PositionalFrequencyModel model(corpus, labels, 16);
  MaskgitOptions opts;
  opts.schedule.total_steps = 5;
  opts.cfg_weight = 1.0;
  Rng a(5), b(5);
  const Codegram x = maskgit_generate(model, &labels[1], 2, 20, opts, a);
  const Codegram y = maskgit_generate(model, &labels[1], 2, 20, opts, b);
  CHECK(x.codes == y.codes);
}

TEST_CASE("Euler sampler") {
  SUBCASE("constant fields are integrated exactly") {
    LatentSequence x0;
    x0.num_frames = 2;
    x0.frame_len = 2;
    x0.values = {0.0, 1.0, -2.0, 0.25};
    for (int steps : {1, 2, 4, 8, 16}) {
      const LatentSequence x = euler_sample(ConstantVelocity(), x0, nullptr, steps);
      for (std::size_t i = 0; i < 4; ++i) CHECK(x.values[i] == x0.values[i] + 0.125);
    }
    const LatentSequence y = euler_sample(ConstantVelocity(), x0, nullptr, 7);
    for (std::size_t i = 0; i < 4; ++i) CHECK(y.values[i] == doctest::Approx(x0.values[i] + 0.125).epsilon(1e-14));
  }

  SUBCASE("velocity CFG") {
    LatentSequence x0;
    x0.num_frames = 1;
    x0.frame_len = 1;
    x0.values = {0.0};
    QuantizedParams cond;
    // (1 + 1) * 0.5 - 1 * 0.125 = 0.875
    CHECK(euler_sample(ConstantVelocity(), x0, &cond, 4, 1.0).values[0] == 0.875);
    CHECK(euler_sample(ConstantVelocity(), x0, &cond, 4, 0.0).values[0] == 0.5);
  }

  SUBCASE("first-order convergence on dx/dt = -x") {
    const double exact = std::exp(-1.0);
    const double e25 = std::abs(euler_endpoint(25) - exact);
    const double e50 = std::abs(euler_endpoint(50) - exact);
    CHECK(euler_endpoint(25) == doctest::Approx(std::pow(1.0 - 1.0 / 25.0, 25.0)).epsilon(1e-12));
    CHECK(euler_endpoint(25) == doctest::Approx(0.3604).epsilon(1e-3));
    CHECK(e25 == doctest::Approx(0.0075).epsilon(0.02));
    CHECK(e50 == doctest::Approx(0.0037).epsilon(0.03));
    CHECK(e25 / e50 >= 1.8);
    CHECK(e25 / e50 <= 2.2);
  }

  SUBCASE("divergence names the step") {
    LatentSequence x0;
    x0.num_frames = 1;
    x0.frame_len = 1;
    x0.values = {0.0};
    try {
      (void)euler_sample(Exploding(), x0, nullptr, 10);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kDivergence);
      CHECK(std::string(e.what()).find("step 4") != std::string::npos);
    }
    CHECK_THROWS_AS((void)euler_sample(Decay(), x0, nullptr, 0), Error);
  }
}

TEST_CASE("seeded Gaussian latents") {
  Rng a(1), b(1);
  const LatentSequence x = gaussian_latent(10, 64, a);
  CHECK(x.values == gaussian_latent(10, 64, b).values);
  Rng rng(2);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = standard_normal(rng);
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(sq / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("empirical flow transports noise onto the corpus") {
  LatentSequence a, b;
  a.num_frames = b.num_frames = 2;
  a.frame_len = b.frame_len = 3;
  a.values = {1, 1, 1, 1, 1, 1};
  b.values = {-1, -1, -1, -1, -1, -1};
  std::vector<QuantizedParams> labels(2);
  labels[1].indices.fill(3);
  const EmpiricalFlowModel model({a, b}, labels, 0.1);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const LatentSequence x = euler_sample(model, gaussian_latent(2, 3, rng), &labels[1], 100);
    double err_b = 0.0;
    for (std::size_t i = 0; i < 6; ++i) err_b += std::abs(x.values[i] - b.values[i]);
    CHECK(err_b < 0.3);
  }
}

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "rirkit/error.hpp"
#include "rirkit/eval.hpp"
#include "rirkit/synth.hpp"
#include "signals.hpp"

using namespace rirkit;

TEST_CASE("relative error") {
  CHECK(*relative_error(1.1, 1.0, Measure::kT30) == doctest::Approx(0.1));
  CHECK(*relative_error(0.9, 1.0, Measure::kEdt) == doctest::Approx(0.1));
  CHECK(*relative_error(80.0, 100.0, Measure::kD50) == doctest::Approx(0.2));
  // C80 compares energy ratios, not decibels.
  CHECK(*relative_error(3.0, 0.0, Measure::kC80) == doctest::Approx(std::pow(10.0, 0.3) - 1.0));
  CHECK(*relative_error(10.0, 10.0, Measure::kC80) == 0.0);
  CHECK_FALSE(relative_error(1.0, 0.0, Measure::kT30).has_value());
  CHECK_FALSE(relative_error(std::nan(""), 1.0, Measure::kT30).has_value());
  CHECK_FALSE(relative_error(INFINITY, 1.0, Measure::kC80).has_value());
}

TEST_CASE("A-weighting") {
  CHECK(std::abs(a_weight_db(1000.0)) < 1e-12);
  // Tabulated IEC values.
  CHECK(a_weight_db(63.0) == doctest::Approx(-26.2).epsilon(0.01));
  CHECK(a_weight_db(125.0) == doctest::Approx(-16.1).epsilon(0.01));
  CHECK(a_weight_db(250.0) == doctest::Approx(-8.6).epsilon(0.02));
  CHECK(a_weight_db(500.0) == doctest::Approx(-3.2).epsilon(0.03));
  CHECK(a_weight_db(2000.0) == doctest::Approx(1.2).epsilon(0.05));
  CHECK(a_weight_db(4000.0) == doctest::Approx(1.0).epsilon(0.05));
  CHECK(a_weight_db(8000.0) == doctest::Approx(-1.1).epsilon(0.05));
}

TEST_CASE("A-weighted aggregate") {
  std::array<double, kNumBands> e{};
  e.fill(0.2);
  CHECK(*a_weighted_aggregate(e) == doctest::Approx(0.2));

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double& x : e) x = u(rng);
  e[2] = std::nan("");
  double num = 0.0, den = 0.0;
  for (std::size_t b = 0; b < kNumBands; ++b) {
    if (b == 2) continue;
    const double g = std::pow(10.0, a_weight_db(kBandCentersHz[b]) / 10.0);
    num += g * e[b];
    den += g;
  }
  CHECK(*a_weighted_aggregate(e) == doctest::Approx(num / den).epsilon(1e-12));

  // Low bands barely count: an error only at 63 Hz stays small.
  std::array<double, kNumBands> low{};
  low[0] = 1.0;
  CHECK(*a_weighted_aggregate(low) < 0.01);

  e.fill(std::nan(""));
  CHECK_FALSE(a_weighted_aggregate(e).has_value());
  CHECK_THROWS_AS((void)a_weighted_aggregate(std::vector<double>{1.0}), Error);
}

TEST_CASE("bootstrap confidence interval") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.3, 0.1);
  std::vector<double> v(200);
  for (double& x : v) x = g(rng);
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  const double se = std::sqrt(var / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));

  const BootstrapCi ci = bootstrap_ci(v, 4000, 0.95, 7);
  CHECK(ci.mean == doctest::Approx(mean).epsilon(1e-14));
  CHECK(ci.lower < ci.mean);
  CHECK(ci.upper > ci.mean);
  CHECK(ci.upper - ci.lower == doctest::Approx(2.0 * 1.96 * se).epsilon(0.15));

  const BootstrapCi again = bootstrap_ci(v, 4000, 0.95, 7);
  CHECK(again.lower == ci.lower);
  CHECK(again.upper == ci.upper);
  const BootstrapCi wider = bootstrap_ci(v, 4000, 0.99, 7);
  CHECK(wider.upper - wider.lower > ci.upper - ci.lower);

  const std::vector<double> flat(10, 0.25);
  const BootstrapCi f = bootstrap_ci(flat, 100);
  CHECK(f.mean == 0.25);
  CHECK(f.lower == 0.25);
  CHECK(f.upper == 0.25);

  // Skewed data: the interval still contains the mean.
  std::vector<double> skewed(20, 0.0);
  skewed[0] = 100.0;
  const BootstrapCi s = bootstrap_ci(skewed, 500, 0.95, 3);
  CHECK(s.lower <= s.mean);
  CHECK(s.upper >= s.mean);

  CHECK_THROWS_AS((void)bootstrap_ci(std::vector<double>{1.0}), Error);
  CHECK_THROWS_AS((void)bootstrap_ci(v, 0), Error);
  CHECK_THROWS_AS((void)bootstrap_ci(v, 100, 1.0), Error);
}

TEST_CASE("evaluating a set") {
  std::vector<EvalItem> ref;
  std::vector<EvalItem> gen;
  for (int i = 0; i < 4; ++i) {
    const double t60 = 0.4 + 0.1 * i;
    ref.push_back({"r" + std::to_string(i), test::noisy_exponential_rir(t60, 10 + i)});
    gen.push_back({"r" + std::to_string(i), test::noisy_exponential_rir(1.2 * t60, 20 + i)});
  }
  const std::vector<Waveform> dry{synthetic_speech(1, 1.0)};
  EvalOptions opts;
  opts.n_resamples = 200;

  SUBCASE("a set compared with itself has zero error everywhere") {
    const EvalReport r = evaluate_set(ref, ref, dry, opts);
    CHECK(r.num_samples == 4);
    CHECK(r.metrics.size() == 12);
    for (const MetricSummary& m : r.metrics) {
      INFO(m.name);
      CHECK(m.ci.mean == 0.0);
      CHECK(m.ci.upper == 0.0);
    }
  }

  SUBCASE("a known T60 offset shows up in the decay metrics") {
    const EvalReport r = evaluate_set(gen, ref, dry, opts);
    CHECK(r.metric("t30_broadband").ci.mean == doctest::Approx(0.2).epsilon(0.25));
    CHECK(r.metric("t30").ci.mean == doctest::Approx(0.2).epsilon(0.35));
    CHECK(r.metric("srd").ci.mean < 0.05);
    CHECK(r.metric("srmr").count == 4);
    CHECK(r.metric("srmr").ci.mean > 0.0);
  }

  SUBCASE("input order does not matter") {
    std::vector<EvalItem> shuffled = gen;
    std::reverse(shuffled.begin(), shuffled.end());
    const EvalReport a = evaluate_set(gen, ref, dry, opts);
    const EvalReport b = evaluate_set(shuffled, ref, dry, opts);
    for (std::size_t i = 0; i < a.metrics.size(); ++i) {
      CHECK(a.metrics[i].ci.mean == b.metrics[i].ci.mean);
      CHECK(a.metrics[i].ci.lower == b.metrics[i].ci.lower);
    }
    opts.jobs = 3;
    const EvalReport c = evaluate_set(gen, ref, dry, opts);
    for (std::size_t i = 0; i < a.metrics.size(); ++i) CHECK(a.metrics[i].ci.upper == c.metrics[i].ci.upper);
  }

  SUBCASE("mismatched ids are listed") {
    gen[1].id = "stray";
    try {
      (void)evaluate_set(gen, ref, dry, opts);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kManifest);
      CHECK(std::string(e.what()).find("stray") != std::string::npos);
      CHECK(std::string(e.what()).find("r1") != std::string::npos);
    }
    gen[1].id = "r0";
    CHECK_THROWS_AS((void)evaluate_set(gen, ref, dry, opts), Error);
  }

  SUBCASE("silent generated items are excluded, not fatal") {
    gen[0].rir.samples.assign(gen[0].rir.size(), 0.0);
    opts.with_srmr = false;
    const EvalReport r = evaluate_set(gen, ref, dry, opts);
    CHECK(r.metric("t30_broadband").excluded == 1);
    CHECK(r.metric("t30_broadband").count == 3);
    CHECK_THROWS_AS((void)r.metric("srmr"), Error);
  }

  SUBCASE("CSV layout") {
    const EvalReport r = evaluate_set(gen, ref, dry, opts);
    const std::string csv = eval_report_csv({r});
    CHECK(csv.rfind("method,t30,t30_plus,t30_minus,", 0) == 0);
    CHECK(csv.find("\ngenerated,") != std::string::npos);
  }
}

TEST_CASE("SRMR deviation") {
  const Waveform a = test::noisy_exponential_rir(0.3, 1);
  const Waveform b = test::noisy_exponential_rir(1.2, 2);
  const std::vector<Waveform> dry{synthetic_speech(3, 1.0)};
  CHECK(*srmr_deviation(a, a, dry) == 0.0);
  CHECK(*srmr_deviation(b, a, dry) > 0.05);
  CHECK_THROWS_AS((void)srmr_deviation(a, b, {}), Error);
}

#include <cmath>
#include <limits>

#include "doctest.h"
#include "rirkit/decay.hpp"
#include "rirkit/error.hpp"
#include "signals.hpp"

using namespace rirkit;

TEST_CASE("Schroeder curve of an exponential follows the closed form") {
  const double t60 = 0.5;
  const Waveform w = test::exponential_rir(t60);
  const EnergyDecayCurve edc = energy_decay_curve(w);
  CHECK(edc.values_db.front() == doctest::Approx(0.0));
  const double a2 = 2.0 * 3.0 * std::log(10.0) / t60;  // energy decay rate
  const double total_t = w.duration_s();
  for (double t : {0.05, 0.1, 0.2, 0.4}) {
    const auto i = static_cast<std::size_t>(t * w.sample_rate_hz);
    const double expected =
        10.0 * std::log10((std::exp(-a2 * t) - std::exp(-a2 * total_t)) / (1.0 - std::exp(-a2 * total_t)));
    CHECK(edc.values_db[i] == doctest::Approx(expected).epsilon(0.0).scale(1.0).epsilon(5e-3));
  }
  for (std::size_t i = 1; i < edc.truncation_index; ++i) {
    REQUIRE(edc.values_db[i] <= edc.values_db[i - 1]);
  }
}

TEST_CASE("reverberation times of an exponential equal its T60") {
  for (double t60 : {0.2, 0.5, 1.0, 1.5}) {
    CAPTURE(t60);
    const EnergyDecayCurve edc = energy_decay_curve(test::exponential_rir(t60));
    CHECK(reverb_time(edc, ReverbTimeKind::kT30) == doctest::Approx(t60).epsilon(0.01));
    CHECK(reverb_time(edc, ReverbTimeKind::kT15) == doctest::Approx(t60).epsilon(0.01));
    CHECK(reverb_time(edc, ReverbTimeKind::kEdt) == doctest::Approx(t60).epsilon(0.01));
  }
}

TEST_CASE("a non-decaying signal has insufficient decay") {
  Waveform w = test::sine(500.0, 1.0);
  const EnergyDecayCurve edc = energy_decay_curve(w);
  try {
    (void)reverb_time(edc, ReverbTimeKind::kT30);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInsufficientDecay);
  }
}

TEST_CASE("silence is a degenerate signal") {
  Waveform w;
  w.samples.assign(44100, 0.0);
  try {
    (void)energy_decay_curve(w);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateSignal);
  }
}

TEST_CASE("clarity and definition match closed forms") {
  for (double t60 : {0.2, 0.5, 1.0, 1.5}) {
    CAPTURE(t60);
    const Waveform w = test::exponential_rir(t60, 3.0);
    CHECK(clarity_c80(w, 0) == doctest::Approx(test::exponential_c80_db(t60)).epsilon(0.0).scale(1.0).epsilon(0.02));
    CHECK(definition_d50(w, 0) == doctest::Approx(test::exponential_d50_pct(t60)).epsilon(0.001));
  }
  // Worked values for T60 = 0.5 s.
  CHECK(test::exponential_c80_db(0.5) == doctest::Approx(9.10).epsilon(0.002));
  CHECK(test::exponential_d50_pct(0.5) == doctest::Approx(74.9).epsilon(0.001));
}

TEST_CASE("clarity without late energy is the +inf sentinel") {
  Waveform w;
  w.samples.assign(44100, 0.0);
  w.samples[10] = 1.0;
  const double c80 = clarity_c80(w, 10);
  CHECK(std::isinf(c80));
  CHECK(is_degenerate_clarity(c80));
  CHECK_FALSE(is_degenerate_clarity(12.0));
  CHECK(definition_d50(w, 10) == doctest::Approx(100.0));
}

TEST_CASE("onset and source-receiver distance") {
  Waveform w;
  w.samples.assign(44100, 0.0);
  w.samples[441] = -1.0;
  w.samples[600] = 0.5;
  CHECK(detect_onset(w) == 441);
  CHECK(srd_from_onset(441, 44100) == doctest::Approx(3.43));
  CHECK(estimate_srd(w) == doctest::Approx(3.43));
  CHECK(srd_from_onset(0, 44100) == doctest::Approx(kMinSrdM));
  CHECK(srd_from_onset(44100, 44100) == doctest::Approx(kMaxSrdM));
}

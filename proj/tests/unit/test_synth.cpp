#include <cmath>

#include "doctest.h"
#include "rirkit/analyze.hpp"
#include "rirkit/decay.hpp"
#include "rirkit/error.hpp"
#include "rirkit/synth.hpp"
#include "signals.hpp"

using namespace rirkit;

namespace {

AcousticParams uniform_params(double t30, double edt, double c80, double d50, double srd) {
  AcousticParams p;
  const auto fill = [&](Measures& m) {
    m.t30_s = t30;
    m.t15_s = t30;
    m.edt_s = edt;
    m.c80_db = c80;
    m.d50_pct = d50;
  };
  fill(p.broadband);
  for (Measures& m : p.per_band) fill(m);
  p.srd_m = srd;
  return p;
}

SynthTarget target_for(const AcousticParams& p, std::uint64_t seed = 1) {
  SynthTarget t;
  t.params = p;
  t.seed = seed;
  return t;
}

double band_energy_share(const MelEnergyProfile& p, std::size_t lo, std::size_t hi) {
  double s = 0.0;
  for (std::size_t k = lo; k <= hi; ++k) s += p.energies[k];
  return s;
}

}  // namespace

TEST_CASE("synthesized RIR re-analyzes to its target") {
  const AcousticParams p = uniform_params(0.5, 0.5, 9.0, 75.0, 2.0);
  const auto [w, report] = synth_rir(target_for(p));
  const AcousticParams a = analyze(w);
  CHECK(report.converged);
  CHECK(report.iterations <= 10);
  CHECK(a.broadband.t30_s == doctest::Approx(0.5).epsilon(0.10));
  CHECK(a.broadband.t15_s == doctest::Approx(0.5).epsilon(0.10));
  CHECK(a.broadband.edt_s == doctest::Approx(0.5).epsilon(0.15));
  CHECK(std::abs(a.broadband.c80_db - 9.0) < 1.0);
  CHECK(std::abs(a.broadband.d50_pct - 75.0) < 5.0);
  CHECK(a.srd_m == doctest::Approx(2.0).epsilon(0.01));
  for (std::size_t b = 2; b < kNumBands; ++b) {
    CAPTURE(kBandCentersHz[b]);
    CHECK(a.per_band[b].t30_s == doctest::Approx(0.5).epsilon(0.10));
  }
  for (std::size_t s = 0; s < kNumSlots; ++s) CHECK(report.achieved.value(s) == a.value(s));
}

TEST_CASE("synthesis is deterministic per seed and bounded") {
  const AcousticParams p = uniform_params(0.9, 0.8, 3.0, 50.0, 5.0);
  const auto [a, ra] = synth_rir(target_for(p, 7));
  const auto [b, rb] = synth_rir(target_for(p, 7));
  CHECK(a.samples == b.samples);
  const auto [c, rc] = synth_rir(target_for(p, 8));
  CHECK(a.samples != c.samples);
  CHECK(peak_abs(a.samples) == doctest::Approx(1.0));
  for (double x : a.samples) REQUIRE(std::isfinite(x));
  CHECK(a.size() == 88200);
}

TEST_CASE("direct path sits at the SRD delay") {
  const auto [w, report] = synth_rir(target_for(uniform_params(0.6, 0.6, 6.0, 65.0, 10.0)));
  const double onset_s = static_cast<double>(detect_onset(w)) / w.sample_rate_hz;
  CHECK(std::abs(onset_s - 10.0 / kSpeedOfSoundMps) <= 0.001);
}

TEST_CASE("achieved T30 grows with the target") {
  double previous = 0.0;
  for (double t30 : {0.3, 0.6, 0.9, 1.2}) {
    CAPTURE(t30);
    const auto [w, report] = synth_rir(target_for(uniform_params(t30, t30, 2.0, 50.0, 2.0)));
    const double achieved = report.achieved.broadband.t30_s;
    CHECK(achieved >= previous);
    previous = achieved;
  }
}

TEST_CASE("unreachable targets give a flagged best effort") {
  const auto [w, report] = synth_rir(target_for(uniform_params(1.5, 1.5, 20.0, 100.0, 1.0)));
  CHECK_FALSE(report.flags.empty());
  CHECK_FALSE(report.converged);
  CHECK(peak_abs(w.samples) == doctest::Approx(1.0));
}

TEST_CASE("invalid targets throw") {
  SynthTarget t = target_for(uniform_params(1.5, 1.5, 2.0, 50.0, 2.0));
  t.duration_s = 1.0;  // shorter than 1.2 x T30
  CHECK_THROWS_AS((void)synth_rir(t), Error);
  t.duration_s = 2.0;
  t.sample_rate_hz = 16000;  // 8 kHz band at Nyquist
  try {
    (void)synth_rir(t);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfiguration);
  }
}

TEST_CASE("random grid targets are realizable bin centers") {
  const SynthTarget a = random_grid_target(3);
  const SynthTarget b = random_grid_target(3);
  for (std::size_t s = 0; s < kNumSlots; ++s) CHECK(a.params.value(s) == b.params.value(s));
  CHECK(is_realizable(a.params));
  const QuantizedParams q = quantize_params(a.params);
  const AcousticParams centers = dequantize_params(q);
  for (std::size_t s = 0; s < kNumSlots; ++s) CHECK(a.params.value(s) == doctest::Approx(centers.value(s)));
  CHECK(a.params.broadband.t15_s == a.params.broadband.t30_s);
  CHECK(a.params.per_band[3].c80_db == a.params.broadband.c80_db);
}

TEST_CASE("mel EQ with the input's own profile is a fixed point") {
  const auto [w, report] = synth_rir(target_for(uniform_params(0.5, 0.5, 9.0, 75.0, 2.0)));
  const Waveform y = apply_mel_eq(w, mel_energy_profile(w));
  REQUIRE(y.size() == w.size());
  double max_diff = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) max_diff = std::max(max_diff, std::abs(y.samples[i] - w.samples[i]));
  CHECK(max_diff < 1e-3);
}

TEST_CASE("mel EQ moves energy into the requested bands") {
  const Waveform noise = anchor_rir(44100, 4);
  MelEnergyProfile target;
  for (std::size_t k = 5; k <= 8; ++k) target.energies[k] = 0.25;
  const Waveform y = apply_mel_eq(noise, target);
  CHECK(band_energy_share(mel_energy_profile(y), 5, 8) >= 0.95);
}

TEST_CASE("mel EQ matches a reachable profile and is idempotent") {
  const Waveform noise = anchor_rir(44100, 5);
  MelEnergyProfile target;
  double sum = 0.0;
  for (std::size_t k = 0; k < kNumMelBands; ++k) {
    target.energies[k] = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(k));
    sum += target.energies[k];
  }
  for (double& e : target.energies) e /= sum;
  const Waveform once = apply_mel_eq(noise, target);
  const MelEnergyProfile p1 = mel_energy_profile(once);
  for (std::size_t k = 0; k < kNumMelBands; ++k) {
    CAPTURE(k);
    CHECK(std::abs(10.0 * std::log10(p1.energies[k] / target.energies[k])) < 1.0);
  }
  const MelEnergyProfile p2 = mel_energy_profile(apply_mel_eq(once, target));
  for (std::size_t k = 0; k < kNumMelBands; ++k) {
    CHECK(std::abs(10.0 * std::log10(p2.energies[k] / p1.energies[k])) < 0.1);
  }
}

TEST_CASE("mel EQ survives empty bands and rejects silence") {
  const Waveform tone = test::sine(1000.0, 1.0);
  MelEnergyProfile flat;
  flat.energies.fill(1.0 / kNumMelBands);
  const Waveform y = apply_mel_eq(tone, flat);
  for (double x : y.samples) REQUIRE(std::isfinite(x));
  Waveform silent;
  silent.samples.assign(1000, 0.0);
  CHECK_THROWS_AS((void)apply_mel_eq(silent, flat), Error);
}

TEST_CASE("anchor is 500 ms of unit-peak uniform noise") {
  const Waveform a = anchor_rir(44100, 0);
  CHECK(a.size() == 22050);
  CHECK(peak_abs(a.samples) == doctest::Approx(1.0));
  const double share = energy(a.samples, 0, 2205) / energy(a.samples);
  CHECK(share == doctest::Approx(0.10).epsilon(0.2));
  CHECK(anchor_rir(48000, 0).size() == 24000);
}

TEST_CASE("synthetic speech") {
  const Waveform s = synthetic_speech(0);
  CHECK(s.size() == 88200);
  CHECK(peak_abs(s.samples) == doctest::Approx(0.9));
  CHECK(synthetic_speech(0).samples == s.samples);
  CHECK(synthetic_speech(1).samples != s.samples);
}

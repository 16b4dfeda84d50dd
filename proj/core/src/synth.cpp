#include "rirkit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numbers>
#include <random>
#include <string>

#include "rirkit/analyze.hpp"
#include "rirkit/decay.hpp"
#include "rirkit/error.hpp"
#include "rirkit/filters.hpp"

namespace rirkit {
namespace {

constexpr double kKneeDb = 10.0;
constexpr double kEarlyWindowS = 0.050;
constexpr double kClarityWindowS = 0.080;
constexpr double kMaxMidGain = 6.0;
constexpr double kMinDirectShare = 0.02;  // of the 0-50 ms energy
constexpr double kMinTauS = 0.01;
constexpr double kMaxTauS = 10.0;
constexpr int kPresolveIterations = 40;
constexpr int kModelDecimation = 10;
constexpr double kMaxLogStep = 0.69;  // at most a factor of two per round

struct BandTarget {
  double t30 = 0.5;
  double t15 = 0.5;
  double edt = 0.5;
  double c80 = 5.0;
  double d50 = 70.0;
  bool operator==(const BandTarget&) const = default;
};

// Envelope and gain controls of one band. The direct sound is one broadband
// impulse, so each band's direct energy is fixed and the tail level is solved
// instead. d_eff / c_eff are the D50 / C80 values handed to the gain solver;
// the refinement loop shifts them to cancel measurement bias.
struct BandControl {
  double tau_edt = 0.5;
  double tau_t30 = 0.5;
  double direct_energy = 1.0;
  double tail_scale = 1.0;
  double gain_early = 1.0;
  double gain_mid = 1.0;
  double d_eff = 70.0;
  double c_eff = 5.0;
};

struct SegmentEnergies {
  double early = 0.0;  // [0, 50 ms)
  double mid = 0.0;    // [50, 80 ms)
  double late = 0.0;   // [80 ms, end)
};

struct Layout {
  std::size_t length = 0;
  std::size_t delay = 0;
  std::size_t early_end = 0;  // relative to delay
  std::size_t mid_end = 0;
  int sample_rate_hz = kDefaultSessionRateHz;
  double sample_weight = 1.0;  // fine samples per layout sample
};

Layout make_layout(double duration_s, double srd_m, int fs) {
  Layout l;
  l.sample_rate_hz = fs;
  l.length = seconds_to_samples(duration_s, fs);
  l.delay = seconds_to_samples(std::clamp(srd_m, kMinSrdM, kMaxSrdM) / kSpeedOfSoundMps, fs);
  l.early_end = seconds_to_samples(kEarlyWindowS, fs);
  l.mid_end = seconds_to_samples(kClarityWindowS, fs);
  return l;
}

// Coarse layout for the expected-envelope model; the smooth envelope loses
// nothing at a tenth of the rate and the presolve gets ten times cheaper.
Layout make_model_layout(double duration_s, double srd_m, int fs) {
  const int coarse = std::max(1, fs / kModelDecimation);
  Layout l = make_layout(duration_s, srd_m, coarse);
  l.sample_weight = static_cast<double>(fs) / coarse;
  return l;
}

// Tail envelope power (linear) at lag n samples after the direct sound.
double envelope_power(std::size_t n, const BandControl& c, int fs) {
  const double tau = static_cast<double>(n) / fs;
  const double knee = c.tau_edt * kKneeDb / 60.0;
  const double level_db =
      tau < knee ? -60.0 * tau / c.tau_edt : -kKneeDb - 60.0 * (tau - knee) / c.tau_t30;
  return std::pow(10.0, level_db / 10.0);
}

double segment_gain(std::size_t n, const BandControl& c, const Layout& l) {
  if (n < l.early_end) return c.gain_early;
  if (n < l.mid_end) return c.gain_mid;
  return 1.0;
}

// Tail energies without segment gains. `carrier` is the per-lag noise power
// (nullptr for the expected envelope).
SegmentEnergies segment_energies(const BandControl& c, const Layout& l, const double* carrier) {
  SegmentEnergies e;
  for (std::size_t n = 0; l.delay + n < l.length; ++n) {
    const double p =
        envelope_power(n, c, l.sample_rate_hz) * (carrier ? carrier[n] : l.sample_weight);
    if (n < l.early_end) {
      e.early += p;
    } else if (n < l.mid_end) {
      e.mid += p;
    } else {
      e.late += p;
    }
  }
  return e;
}

// Tail scale and segment gains that put D50 and C80 at d_eff / c_eff given
// the band's direct energy and unscaled tail energies. The natural early
// tail (gain 1) is kept unless it alone would exceed the D50 budget. Returns
// false when a gain had to be clamped.
bool solve_gains(BandControl& c, const SegmentEnergies& e) {
  bool exact = true;
  const double d = std::clamp(c.d_eff / 100.0, 1e-3, 0.999);
  const double ratio = std::pow(10.0, c.c_eff / 10.0);
  const double early_per_scale = d * (ratio + 1.0) * e.late;
  c.gain_early = e.early > 0.0
                     ? std::min(1.0, (1.0 - kMinDirectShare) * early_per_scale / e.early)
                     : 0.0;
  c.tail_scale = c.direct_energy / (early_per_scale - c.gain_early * e.early);
  double mid_per_scale = (ratio - d * (ratio + 1.0)) * e.late;
  if (mid_per_scale < 0.0) {
    mid_per_scale = 0.0;
    exact = false;
  }
  c.gain_mid = e.mid > 0.0 ? mid_per_scale / e.mid : 0.0;
  if (c.gain_mid > kMaxMidGain) {
    c.gain_mid = kMaxMidGain;
    exact = false;
  }
  return exact;
}

// Expected (noise-free) energy envelope rendered as a waveform: sqrt of the
// per-sample expected power, with the direct energy at the delay.
Waveform expected_rir(const BandControl& c, const Layout& l) {
  Waveform w;
  w.sample_rate_hz = l.sample_rate_hz;
  w.samples.assign(l.length, 0.0);
  for (std::size_t n = 0; l.delay + n < l.length; ++n) {
    double p = c.tail_scale * l.sample_weight * envelope_power(n, c, l.sample_rate_hz) *
               segment_gain(n, c, l);
    if (n == 0) p += c.direct_energy;
    w.samples[l.delay + n] = std::sqrt(p);
  }
  return w;
}

struct Prediction {
  double t30 = 0.0, t15 = 0.0, edt = 0.0, c80 = 0.0, d50 = 0.0;
  bool ok = false;
};

Prediction predict(const BandControl& c, const Layout& l) {
  Prediction p;
  const Waveform w = expected_rir(c, l);
  try {
    const auto edc = energy_decay_curve(w);
    p.t30 = reverb_time(edc, ReverbTimeKind::kT30);
    p.t15 = reverb_time(edc, ReverbTimeKind::kT15);
    p.edt = reverb_time(edc, ReverbTimeKind::kEdt);
    p.c80 = clarity_c80(w, l.delay);
    p.d50 = definition_d50(w, l.delay);
    p.ok = std::isfinite(p.c80);
  } catch (const Error&) {
    p.ok = false;
  }
  return p;
}

double ratio_step(double target, double measured) {
  if (!(measured > 0.0) || !std::isfinite(measured)) return 1.0;
  return std::clamp(target / measured, 0.5, 2.0);
}

void clamp_taus(BandControl& c) {
  c.tau_t30 = std::clamp(c.tau_t30, kMinTauS, kMaxTauS);
  c.tau_edt = std::clamp(c.tau_edt, kMinTauS, kMaxTauS);
}

struct Presolved {
  BandControl control;
  Prediction prediction;
  bool gains_exact = true;
};

// Fits the envelope slopes on the expected envelope so its measured EDT and
// T30 land on the targets, re-solving the D50 / C80 gains each round.
Presolved presolve(const BandTarget& t, const Layout& l) {
  Presolved r;
  BandControl& c = r.control;
  c.tau_edt = t.edt;
  c.tau_t30 = t.t30;
  c.d_eff = t.d50;
  c.c_eff = t.c80;
  for (int it = 0; it < kPresolveIterations; ++it) {
    r.gains_exact = solve_gains(c, segment_energies(c, l, nullptr));
    r.prediction = predict(c, l);
    if (!r.prediction.ok) break;
    const double e30 = std::abs(r.prediction.t30 - t.t30) / t.t30;
    const double eedt = std::abs(r.prediction.edt - t.edt) / t.edt;
    if (e30 < 1e-3 && eedt < 1e-3) break;
    c.tau_t30 *= ratio_step(t.t30, r.prediction.t30);
    c.tau_edt *= ratio_step(t.edt, r.prediction.edt);
    clamp_taus(c);
  }
  return r;
}

// Bands usually share targets; the presolve is independent of the direct
// energy up to the tail scale, so results are reused across bands.
class PresolveCache {
 public:
  explicit PresolveCache(const Layout& l) : layout_(l) {}

  Presolved get(const BandTarget& t, double direct_energy = 1.0) {
    auto it = std::find_if(entries_.begin(), entries_.end(),
                           [&](const auto& e) { return e.first == t; });
    if (it == entries_.end()) {
      entries_.emplace_back(t, presolve(t, layout_));
      it = std::prev(entries_.end());
    }
    Presolved r = it->second;
    r.control.direct_energy *= direct_energy;
    r.control.tail_scale *= direct_energy;
    return r;
  }

 private:
  Layout layout_;
  std::vector<std::pair<BandTarget, Presolved>> entries_;
};

BandTarget band_target(const AcousticParams& p, int band) {
  const Measures& m = band < 0 ? p.broadband : p.per_band[static_cast<std::size_t>(band)];
  const GridSet grids = default_grids();
  const auto clamp_to = [&](Measure k, double v) {
    const ClassGrid& g = grids.for_measure(k);
    return std::clamp(v, g.min, g.max);
  };
  BandTarget t;
  t.t30 = clamp_to(Measure::kT30, m.t30_s);
  t.t15 = clamp_to(Measure::kT15, m.t15_s);
  t.edt = clamp_to(Measure::kEdt, m.edt_s);
  t.c80 = clamp_to(Measure::kC80, m.c80_db);
  t.d50 = clamp_to(Measure::kD50, m.d50_pct);
  return t;
}

struct Tolerances {
  double reverb = 0.10;
  double edt = 0.15;
  double d50 = 5.0;
  double c80 = 1.0;
};

Tolerances tolerances_from(const SynthOptions& o) {
  Tolerances t;
  t.reverb = o.reverb_time_tolerance;
  t.edt = std::max(0.15, o.reverb_time_tolerance);
  t.d50 = o.d50_tolerance_pct;
  t.c80 = o.c80_tolerance_db;
  return t;
}

bool prediction_within(const Prediction& p, const BandTarget& t, const Tolerances& tol, double share) {
  return p.ok && std::abs(p.t30 - t.t30) / t.t30 <= share * tol.reverb &&
         std::abs(p.t15 - t.t15) / t.t15 <= share * tol.reverb &&
         std::abs(p.edt - t.edt) / t.edt <= share * tol.edt &&
         std::abs(p.d50 - t.d50) <= share * tol.d50 && std::abs(p.c80 - t.c80) <= share * tol.c80;
}

// Per-band realization: band-limited noise at unit power from the delay on.
struct BandCarrier {
  std::vector<double> noise;
  std::vector<double> noise_power_from_delay;
};

BandCarrier make_carrier(std::size_t band, const Layout& l, std::uint64_t seed) {
  BandCarrier c;
  const double center = kBandCentersHz[band];
  std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * (band + 1)));
  std::normal_distribution<double> normal;
  std::vector<double> white(l.length);
  for (double& v : white) v = normal(rng);
  c.noise = filtfilt(octave_band_filter(center, l.sample_rate_hz), white,
                     octave_band_padding(center, l.sample_rate_hz));
  double power = 0.0;
  for (std::size_t i = l.delay; i < l.length; ++i) power += c.noise[i] * c.noise[i];
  power /= static_cast<double>(std::max<std::size_t>(1, l.length - l.delay));
  const double norm = power > 0.0 ? 1.0 / std::sqrt(power) : 0.0;
  for (double& v : c.noise) v *= norm;
  c.noise_power_from_delay.resize(l.length - l.delay);
  for (std::size_t n = 0; n < c.noise_power_from_delay.size(); ++n) {
    c.noise_power_from_delay[n] = c.noise[l.delay + n] * c.noise[l.delay + n];
  }
  return c;
}

// The direct sound: an impulse at the delay, band-limited to the span of the
// octave filterbank so the broadband and band-wise direct energies agree.
// band_energy is what each band's analysis sees from the delay on.
struct DirectPath {
  std::vector<double> samples;
  std::array<double, kNumBands> band_energy{};
};

DirectPath make_direct_path(const Layout& l) {
  DirectPath d;
  d.samples.assign(l.length, 0.0);
  for (std::size_t b = 0; b < kNumBands; ++b) {
    const double center = kBandCentersHz[b];
    const std::size_t pad = octave_band_padding(center, l.sample_rate_hz);
    std::vector<double> delta(2 * pad + 1, 0.0);
    delta[pad] = 1.0;
    const std::vector<double> kernel =
        filtfilt(octave_band_filter(center, l.sample_rate_hz), delta, pad);
    for (std::size_t k = 0; k < kernel.size(); ++k) {
      const auto pos = static_cast<std::ptrdiff_t>(l.delay + k) - static_cast<std::ptrdiff_t>(pad);
      if (pos >= 0 && static_cast<std::size_t>(pos) < l.length) {
        d.samples[static_cast<std::size_t>(pos)] += kernel[k];
      }
    }
  }
  for (std::size_t b = 0; b < kNumBands; ++b) {
    const double center = kBandCentersHz[b];
    const std::vector<double> band =
        filtfilt(octave_band_filter(center, l.sample_rate_hz), d.samples,
                 octave_band_padding(center, l.sample_rate_hz));
    d.band_energy[b] = energy(band, l.delay, band.size());
  }
  return d;
}

void render_band(const BandCarrier& carrier, const BandControl& c, const Layout& l,
                 std::vector<double>& out) {
  for (std::size_t n = 0; l.delay + n < l.length; ++n) {
    const double amp =
        std::sqrt(c.tail_scale * envelope_power(n, c, l.sample_rate_hz) * segment_gain(n, c, l));
    out[l.delay + n] += amp * carrier.noise[l.delay + n];
  }
}

double slot_relative_error(std::size_t slot, double achieved, double target) {
  if (slot_at(slot).measure == Measure::kC80) {
    achieved = std::pow(10.0, achieved / 10.0);
    target = std::pow(10.0, target / 10.0);
  }
  return std::abs(achieved - target) / std::abs(target);
}

struct Score {
  int broadband_failures = 0;
  int band_failures = 0;
  double excess = 0.0;
  bool better_than(const Score& o) const {
    if (broadband_failures != o.broadband_failures) {
      return broadband_failures < o.broadband_failures;
    }
    if (band_failures != o.band_failures) return band_failures < o.band_failures;
    return excess < o.excess;
  }
};

// Counts slots outside tolerance. SRD is fixed by construction and band T15
// is not independently controlled, so neither counts as a failure.
Score score(const AcousticParams& achieved, const AcousticParams& target, const Tolerances& tol) {
  Score s;
  for (std::size_t slot = 0; slot < kNumSlots; ++slot) {
    const Slot k = slot_at(slot);
    if (k.measure == Measure::kSrd) continue;
    if (!achieved.valid(slot)) {
      ++(k.band < 0 ? s.broadband_failures : s.band_failures);
      s.excess += 10.0;
      continue;
    }
    const double a = achieved.value(slot);
    const double t = target.value(slot);
    double err = 0.0;
    double limit = 1.0;
    switch (k.measure) {
      case Measure::kT30:
      case Measure::kT15: err = std::abs(a - t) / t; limit = tol.reverb; break;
      case Measure::kEdt: err = std::abs(a - t) / t; limit = tol.edt; break;
      case Measure::kD50: err = std::abs(a - t); limit = tol.d50; break;
      case Measure::kC80: err = std::abs(a - t); limit = tol.c80; break;
      case Measure::kSrd: break;
    }
    const bool controlled = !(k.band >= 0 && k.measure == Measure::kT15);
    if (controlled && err > limit) ++(k.band < 0 ? s.broadband_failures : s.band_failures);
    s.excess += err / limit;
  }
  return s;
}

// Per-band control corrections for one measure. Each band follows its own
// error relative to the band mean, and the broadband error sets the common
// offset, so a mismatch between the band sum and the broadband measurement
// is absorbed evenly by the bands. `error(band)` gives target minus measured
// in the control's domain; band -1 is broadband.
template <typename ErrorFn>
std::array<double, kNumBands> corrections(const AcousticParams& measured, Measure k,
                                          ErrorFn error) {
  std::array<double, kNumBands> band_error{};
  std::array<bool, kNumBands> valid{};
  double mean = 0.0;
  int count = 0;
  for (std::size_t b = 0; b < kNumBands; ++b) {
    valid[b] = measured.valid(slot_index(k, static_cast<int>(b)));
    if (valid[b]) {
      band_error[b] = error(static_cast<int>(b));
      valid[b] = std::isfinite(band_error[b]);
    }
    if (valid[b]) {
      mean += band_error[b];
      ++count;
    }
  }
  mean = count > 0 ? mean / count : 0.0;
  double broadband = measured.valid(slot_index(k, -1)) ? error(-1) : mean;
  if (!std::isfinite(broadband)) broadband = mean;
  std::array<double, kNumBands> out{};
  for (std::size_t b = 0; b < kNumBands; ++b) {
    out[b] = valid[b] ? band_error[b] - mean + broadband : broadband;
  }
  return out;
}

AcousticParams clamped_target(const AcousticParams& p) {
  AcousticParams t = p;
  t.invalid.reset();
  const GridSet grids = default_grids();
  for (std::size_t slot = 0; slot < kNumSlots; ++slot) {
    const ClassGrid& g = grids.for_slot(slot);
    t.set_value(slot, std::clamp(p.value(slot), g.min, g.max));
  }
  return t;
}

}  // namespace

bool is_realizable(const AcousticParams& params, const SynthOptions& options, int sample_rate_hz,
                   double duration_s) {
  const AcousticParams target = clamped_target(params);
  double max_t30 = target.broadband.t30_s;
  for (const auto& m : target.per_band) max_t30 = std::max(max_t30, m.t30_s);
  if (duration_s < 1.2 * max_t30) return false;
  const Layout l = make_model_layout(duration_s, target.srd_m, sample_rate_hz);
  const Tolerances tol = tolerances_from(options);
  PresolveCache cache(l);
  for (int band = -1; band < static_cast<int>(kNumBands); ++band) {
    const BandTarget t = band_target(target, band);
    const Presolved r = cache.get(t);
    if (!r.gains_exact || !prediction_within(r.prediction, t, tol, 0.5)) return false;
  }
  return true;
}

std::pair<Waveform, SynthReport> synth_rir(const SynthTarget& target, const SynthOptions& options) {
  if (target.sample_rate_hz < kMinSampleRateHz) {
    throw Error(ErrorCode::kConfiguration, "synthesis sample rate below 8000 Hz");
  }
  if (!(kBandCentersHz.back() < target.sample_rate_hz / 2.0)) {
    throw Error(ErrorCode::kConfiguration, "sample rate too low for the 8 kHz band");
  }
  const AcousticParams goal = clamped_target(target.params);
  double max_t30 = goal.broadband.t30_s;
  for (const auto& m : goal.per_band) max_t30 = std::max(max_t30, m.t30_s);
  if (target.duration_s < 1.2 * max_t30) {
    throw Error(ErrorCode::kConfiguration,
                "duration " + std::to_string(target.duration_s) + " s is shorter than 1.2 x T30");
  }
  if (options.max_iterations < 1) {
    throw Error(ErrorCode::kConfiguration, "max_iterations must be at least 1");
  }

  const Layout l = make_layout(target.duration_s, goal.srd_m, target.sample_rate_hz);
  if (l.delay + l.mid_end >= l.length) {
    throw Error(ErrorCode::kConfiguration, "duration too short for the direct-path delay");
  }
  const Tolerances tol = tolerances_from(options);

  SynthReport report;
  std::array<BandTarget, kNumBands> targets{};
  std::array<BandControl, kNumBands> controls{};
  std::array<BandCarrier, kNumBands> carriers{};
  PresolveCache cache(make_model_layout(target.duration_s, goal.srd_m, target.sample_rate_hz));
  const DirectPath direct = make_direct_path(l);
  for (std::size_t b = 0; b < kNumBands; ++b) {
    targets[b] = band_target(goal, static_cast<int>(b));
    carriers[b] = make_carrier(b, l, target.seed);
    const Presolved r = cache.get(targets[b], direct.band_energy[b]);
    controls[b] = r.control;
    if (!r.gains_exact) {
      report.flags.push_back("band " + std::to_string(static_cast<int>(kBandCentersHz[b])) +
                             " Hz: D50/C80 combination needs clamped segment gains");
    }
  }

  Waveform best;
  Score best_score{1 << 20, 1 << 20, 0.0};
  AcousticParams best_params;
  int iterations = 0;
  for (int it = 0; it < options.max_iterations; ++it) {
    iterations = it + 1;
    Waveform w;
    w.sample_rate_hz = l.sample_rate_hz;
    w.samples = direct.samples;
    for (std::size_t b = 0; b < kNumBands; ++b) render_band(carriers[b], controls[b], l, w.samples);

    const AcousticParams measured = analyze(w);
    const Score s = score(measured, goal, tol);
    if (s.better_than(best_score)) {
      best_score = s;
      best = std::move(w);
      best_params = measured;
    }
    if (s.broadband_failures == 0) break;

    const auto tau_step = [&](Measure k, double BandTarget::*field, double Measures::*value) {
      return corrections(measured, k, [&](int band) {
        const double t = band < 0 ? goal.broadband.*value : targets[band].*field;
        const double m = band < 0 ? measured.broadband.*value : measured.per_band[band].*value;
        return std::log(t / m);
      });
    };
    const auto level_step = [&](Measure k, double BandTarget::*field, double Measures::*value) {
      return corrections(measured, k, [&](int band) {
        const double t = band < 0 ? goal.broadband.*value : targets[band].*field;
        const double m = band < 0 ? measured.broadband.*value : measured.per_band[band].*value;
        return t - m;
      });
    };
    const auto t30 = tau_step(Measure::kT30, &BandTarget::t30, &Measures::t30_s);
    const auto edt = tau_step(Measure::kEdt, &BandTarget::edt, &Measures::edt_s);
    const auto d50 = level_step(Measure::kD50, &BandTarget::d50, &Measures::d50_pct);
    const auto c80 = level_step(Measure::kC80, &BandTarget::c80, &Measures::c80_db);
    for (std::size_t b = 0; b < kNumBands; ++b) {
      BandControl& c = controls[b];
      c.tau_t30 *= std::exp(std::clamp(t30[b], -kMaxLogStep, kMaxLogStep));
      c.tau_edt *= std::exp(std::clamp(edt[b], -kMaxLogStep, kMaxLogStep));
      clamp_taus(c);
      c.d_eff = std::clamp(c.d_eff + d50[b], 1.0, 99.9);
      c.c_eff = std::clamp(c.c_eff + c80[b], -10.0, 40.0);
      solve_gains(c, segment_energies(c, l, carriers[b].noise_power_from_delay.data()));
    }
  }

  if (target.eq_profile) {
    best = apply_mel_eq(best, *target.eq_profile);
    best_params = analyze(best);
  }
  const double peak = peak_abs(best.samples);
  if (peak > 0.0 && peak != 1.0) {
    for (double& v : best.samples) v /= peak;
    // The report describes the returned waveform bit for bit.
    best_params = analyze(best);
  }

  report.achieved = best_params;
  report.iterations = iterations;
  const Score final_score = score(best_params, goal, tol);
  report.converged = final_score.broadband_failures == 0;
  if (final_score.band_failures > 0) {
    report.flags.push_back(std::to_string(final_score.band_failures) +
                           " band-wise parameters outside tolerance");
  }
  if (!report.converged) {
    report.flags.push_back("broadband parameters outside tolerance after " +
                           std::to_string(iterations) + " iterations");
  }
  for (std::size_t slot = 0; slot < kNumSlots; ++slot) {
    report.relative_errors[slot] =
        best_params.valid(slot) ? slot_relative_error(slot, best_params.value(slot), goal.value(slot))
                                : std::nan("");
  }
  return {std::move(best), std::move(report)};
}

SynthTarget random_grid_target(std::uint64_t seed, const GridSet& grids, const SynthOptions& options,
                               int sample_rate_hz, double duration_s) {
  std::mt19937_64 rng(seed);
  const auto draw = [&](Measure m) {
    const ClassGrid& g = grids.for_measure(m);
    std::uniform_int_distribution<int> pick(0, g.num_classes - 1);
    return dequantize(pick(rng), g);
  };
  SynthTarget target;
  target.seed = seed;
  target.sample_rate_hz = sample_rate_hz;
  target.duration_s = duration_s;
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Measures m;
    m.t30_s = draw(Measure::kT30);
    m.t15_s = m.t30_s;
    m.edt_s = draw(Measure::kEdt);
    m.c80_db = draw(Measure::kC80);
    m.d50_pct = draw(Measure::kD50);
    const double srd = draw(Measure::kSrd);

    AcousticParams p;
    p.broadband = m;
    p.per_band.fill(m);
    p.srd_m = srd;
    if (is_realizable(p, options, target.sample_rate_hz, target.duration_s)) {
      target.params = p;
      return target;
    }
  }
  throw Error(ErrorCode::kConfiguration, "no realizable grid target found");
}

Waveform anchor_rir(int sample_rate_hz, std::uint64_t seed) {
  if (sample_rate_hz <= 0) throw Error(ErrorCode::kConfiguration, "sample rate must be positive");
  Waveform w;
  w.sample_rate_hz = sample_rate_hz;
  w.samples.resize(static_cast<std::size_t>(sample_rate_hz / 2));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  for (double& v : w.samples) v = uniform(rng);
  const double peak = peak_abs(w.samples);
  for (double& v : w.samples) v /= peak;
  return w;
}

Waveform synthetic_speech(std::uint64_t seed, double duration_s, int sample_rate_hz) {
  Waveform w;
  w.sample_rate_hz = sample_rate_hz;
  w.samples.assign(seconds_to_samples(duration_s, sample_rate_hz), 0.0);
  const double fs = sample_rate_hz;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> normal;

  const double f0_base = 100.0 + 120.0 * u(rng);
  // Rough vowel formant sets (F1, F2, F3).
  constexpr std::array<std::array<double, 3>, 5> kVowels{{
      {730, 1090, 2440}, {270, 2290, 3010}, {300, 870, 2240}, {530, 1840, 2480}, {570, 840, 2410}}};

  double t = 0.05 + 0.1 * u(rng);
  while (t < duration_s - 0.1) {
    const double len = 0.12 + 0.13 * u(rng);
    const auto& formants = kVowels[static_cast<std::size_t>(u(rng) * kVowels.size()) % kVowels.size()];
    const double f0 = f0_base * (0.9 + 0.2 * u(rng));
    const bool fricative_onset = u(rng) < 0.4;
    const std::size_t start = seconds_to_samples(t, sample_rate_hz);
    const std::size_t n = std::min(seconds_to_samples(len, sample_rate_hz), w.size() - start);
    double phase = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = static_cast<double>(i) / static_cast<double>(n);
      const double env = std::sin(std::numbers::pi * x);
      const double f = f0 * (1.0 + 0.08 * (0.5 - x));  // slight declination
      phase += 2.0 * std::numbers::pi * f / fs;
      double voiced = 0.0;
      for (int h = 1; f * h < std::min(5000.0, fs / 2.0); ++h) {
        const double fh = f * h;
        double gain = 0.0;
        for (double fm : formants) {
          const double bw = 80.0 + fm * 0.05;
          gain += 1.0 / (1.0 + ((fh - fm) / bw) * ((fh - fm) / bw));
        }
        voiced += gain * std::sin(h * phase) / std::sqrt(static_cast<double>(h));
      }
      double sample = env * env * voiced;
      if (fricative_onset && x < 0.2) sample += 0.3 * (1.0 - x / 0.2) * normal(rng);
      w.samples[start + i] += sample;
    }
    t += len + 0.06 + 0.1 * u(rng);
  }
  const double peak = peak_abs(w.samples);
  if (peak > 0.0) {
    for (double& v : w.samples) v *= 0.9 / peak;
  }
  return w;
}

}  // namespace rirkit

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "rirkit/analyze.hpp"
#include "rirkit/codec.hpp"
#include "rirkit/error.hpp"
#include "rirkit/eval.hpp"
#include "rirkit/guidance.hpp"
#include "rirkit/models.hpp"
#include "rirkit/samplers.hpp"
#include "rirkit/srmr.hpp"
#include "rirkit/synth.hpp"
#include "signals.hpp"

using namespace rirkit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (!pass) detail << "; ";
      detail << what;
      pass = false;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Held-out RIRs and a codec trained on a disjoint set, shared by the codec
// and evaluation criteria.
struct CodecFixture {
  std::vector<Waveform> held_out;
  RvqCodebooks codebooks;
};

const CodecFixture& codec_fixture() {
  static const CodecFixture fixture = [] {
    CodecFixture f;
    std::vector<Waveform> train;
    for (int i = 0; i < 20; ++i) {
      const double t60 = 0.2 + 0.065 * i;
      train.push_back(test::noisy_exponential_rir(t60, 100 + static_cast<std::uint64_t>(i)));
      f.held_out.push_back(test::noisy_exponential_rir(t60 + 0.03, 500 + static_cast<std::uint64_t>(i)));
    }
    // Default codec shape: L = 4, K = 256, frame_len = 512.
    RvqTrainOptions opts;
    opts.lloyd_iterations = 10;
    opts.seed = 7;
    f.codebooks = train_rvq(train, opts);
    return f;
  }();
  return fixture;
}

Outcome analyzer_exactness() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  for (double t60 : {0.2, 0.5, 1.0, 1.5}) {
    const AcousticParams p = analyze(test::exponential_rir(t60), {.band_wise = false});
    const std::string tag = "T60 " + std::to_string(t60) + ": ";
    for (Measure m : {Measure::kT30, Measure::kT15, Measure::kEdt}) {
      const double v = p.broadband.get(m);
      o.require(p.valid(slot_index(m)) && std::abs(v - t60) <= 0.01 * t60,
                tag + measure_field(m) + " = " + std::to_string(v));
    }
    o.require(std::abs(p.broadband.c80_db - test::exponential_c80_db(t60)) <= 0.2,
              tag + "c80 = " + std::to_string(p.broadband.c80_db));
    o.require(std::abs(p.broadband.d50_pct - test::exponential_d50_pct(t60)) <= 1.0,
              tag + "d50 = " + std::to_string(p.broadband.d50_pct));
  }
  const double dt = seconds_since(t0);
  o.require(dt < 5.0, "took " + std::to_string(dt) + " s");
  if (o.pass) o.detail << "4 decay rates, " << dt << " s";
  return o;
}

Outcome synthesis_round_trip() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const GridSet grids = default_grids();
  const ClassGrid& srd_grid = grids.for_measure(Measure::kSrd);
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const SynthTarget target = random_grid_target(seed, grids);
    const Waveform w = synth_rir(target).first;
    const AcousticParams a = analyze(w, {.band_wise = false});
    const Measures& want = target.params.broadband;
    const Measures& got = a.broadband;
    const auto rel = [](double x, double ref) { return std::abs(x - ref) / std::abs(ref); };
    bool good = true;
    for (Measure m : {Measure::kT30, Measure::kT15, Measure::kEdt, Measure::kC80, Measure::kD50}) {
      good = good && a.valid(slot_index(m));
    }
    good = good && rel(got.t30_s, want.t30_s) < 0.10 && rel(got.t15_s, want.t15_s) < 0.10 &&
           rel(got.edt_s, want.edt_s) < 0.15 && std::abs(got.d50_pct - want.d50_pct) <= 5.0 &&
           std::abs(got.c80_db - want.c80_db) <= 1.0 &&
           std::abs(quantize(a.srd_m, srd_grid) - quantize(target.params.srd_m, srd_grid)) <= 1;
    ok += good ? 1 : 0;
  }
  const double dt = seconds_since(t0);
  o.require(ok >= 45, std::to_string(ok) + "/50 targets within tolerance");
  o.require(dt < 120.0, "took " + std::to_string(dt) + " s");
  if (o.pass) o.detail << ok << "/50 targets within tolerance, " << dt << " s";
  return o;
}

Outcome quantizer_conformance() {
  Outcome o;
  const GridSet grids = default_grids();
  std::size_t checked = 0;
  for (std::size_t slot = 0; slot < kNumSlots; ++slot) {
    const ClassGrid& g = grids.for_slot(slot);
    const bool log = g.spacing == GridSpacing::kLog;
    const double lo = log ? std::log10(g.min) : g.min;
    const double hi = log ? std::log10(g.max) : g.max;
    const double w = (hi - lo) / g.num_classes;
    const auto phys = [&](double u) { return log ? std::pow(10.0, u) : u; };
    const std::string tag = slot_name(slot) + ": ";

    o.require(quantize(g.min, g) == 0, tag + "min endpoint");
    o.require(quantize(g.max, g) == g.num_classes - 1, tag + "max endpoint");
    o.require(quantize(phys(lo - 5 * w), g) == 0, tag + "below range");
    o.require(quantize(phys(hi + 5 * w), g) == g.num_classes - 1, tag + "above range");
    for (int c = 0; c < g.num_classes; ++c) {
      const double inside_lo = phys(lo + (c + 1e-6) * w);
      const double inside_hi = phys(lo + (c + 1 - 1e-6) * w);
      o.require(quantize(inside_lo, g) == c && quantize(inside_hi, g) == c,
                tag + "class " + std::to_string(c) + " edges");
      o.require(quantize(dequantize(c, g), g) == c, tag + "round trip " + std::to_string(c));
      ++checked;
    }
    int prev = 0;
    for (int i = 0; i <= 4000; ++i) {
      const int q = quantize(phys(lo - w + (hi - lo + 2 * w) * i / 4000.0), g);
      o.require(q >= prev, tag + "monotone");
      prev = q;
    }
  }
  const ClassGrid& t30 = grids.for_measure(Measure::kT30);
  const ClassGrid& srd = grids.for_measure(Measure::kSrd);
  o.require(quantize(0.8, t30) == 7, "T30 0.8 s class " + std::to_string(quantize(0.8, t30)));
  o.require(quantize(3.0, srd) == 5, "SRD 3 m class " + std::to_string(quantize(3.0, srd)));
  if (o.pass) o.detail << checked << " slot classes, spot checks T30 0.8 s -> 7, SRD 3 m -> 5";
  return o;
}

Outcome guidance_algebra() {
  Outcome o;
  const ScoreVector cond{1.0, 2.0};
  const ScoreVector uncond{0.0, 0.0};
  o.require(cfg_combine(cond, uncond, 1.0) == ScoreVector{2.0, 4.0}, "cfg [2, 4] example");
  const ScoreVector c{0.3, -1.7, 5.0, -INFINITY};
  const ScoreVector u{2.0, 0.1, -3.0, -INFINITY};
  o.require(cfg_combine(c, u, 0.0) == c, "cfg identity at w = 0");
  const ScoreVector ar{0.5, -2.0, 1.25, 3.0};
  std::vector<ClassifierTerm> terms{{{9.0, 1.0, -4.0, 2.0}, 0.0}, {{-INFINITY, 0.0, 0.0, 0.0}, 0.0}};
  o.require(cg_combine(ar, terms, 1.0) == ar, "cg reduces to the AR term");
  const double rt = 1.0 / std::sqrt(27.0);
  const double cl = 1.0 / std::sqrt(18.0);
  const std::map<Measure, double> expected{{Measure::kT30, rt}, {Measure::kT15, rt}, {Measure::kEdt, rt},
                                           {Measure::kC80, cl}, {Measure::kD50, cl}, {Measure::kSrd, 1.0}};
  for (const auto& [m, w] : expected) {
    o.require(std::abs(default_classifier_weight(m) - w) < 1e-12, "default weight " + measure_field(m));
  }
  if (o.pass) o.detail << "cfg/cg identities and default weights";
  return o;
}

Outcome maskgit_oracle() {
  Outcome o;
  Rng gen(42);
  Codegram truth;
  truth.num_stages = 4;
  truth.num_frames = 43;
  truth.codes.resize(4 * 43);
  for (int& v : truth.codes) v = static_cast<int>(gen() % 64);
  const OracleMaskedModel model(truth, 64);
  for (int steps : {1, 5, 20}) {
    for (std::uint64_t seed : {0u, 1u, 2u}) {
      MaskgitOptions opts;
      opts.schedule.total_steps = steps;
      Rng rng(seed);
      const Codegram out = maskgit_generate(model, nullptr, 4, 43, opts, rng);
      o.require(out.codes == truth.codes, "S = " + std::to_string(steps) + " seed " + std::to_string(seed));
    }
  }
  const std::size_t m10 = masked_counts(172, MaskSchedule{20})[10];
  o.require(m10 == 122, "schedule(172, 20, 10) = " + std::to_string(m10));
  if (o.pass) o.detail << "exact recovery for S in {1, 5, 20}, schedule value 122";
  return o;
}

Outcome euler_order() {
  Outcome o;
  class Decay final : public VelocityModel {
   public:
    LatentSequence velocity(const LatentSequence& x, double, const QuantizedParams*) const override {
      LatentSequence v = x;
      for (double& e : v.values) e = -e;
      return v;
    }
  };
  const auto error = [](int steps) {
    LatentSequence x0;
    x0.num_frames = 1;
    x0.frame_len = 1;
    x0.values = {1.0};
    return std::abs(euler_sample(Decay(), x0, nullptr, steps).values[0] - std::exp(-1.0));
  };
  const double e25 = error(25);
  const double e50 = error(50);
  o.require(std::abs(e25 - 0.0075) < 0.0005, "25-step error " + std::to_string(e25));
  const double ratio = e25 / e50;
  o.require(ratio >= 1.8 && ratio <= 2.2, "ratio " + std::to_string(ratio));
  if (o.pass) o.detail << "error " << e25 << " at 25 steps, ratio " << ratio;
  return o;
}

Outcome codec_monotonicity() {
  Outcome o;
  const CodecFixture& f = codec_fixture();
  const int fl = f.codebooks.frame_len;
  std::size_t frames_checked = 0;
  double snr_first = 0.0, snr_last = 0.0;
  for (std::size_t item = 0; item < f.held_out.size(); ++item) {
    const Waveform& x = f.held_out[item];
    const Codegram c = encode(x, f.codebooks);
    std::vector<double> padded = x.samples;
    padded.resize(c.num_frames * static_cast<std::size_t>(fl), 0.0);
    std::vector<double> prev_frame_err(c.num_frames, 0.0);
    for (std::size_t t = 0; t < c.num_frames; ++t) {
      for (int i = 0; i < fl; ++i) prev_frame_err[t] += padded[t * fl + i] * padded[t * fl + i];
    }
    double prev_total = INFINITY;
    for (int stages = 1; stages <= c.num_stages; ++stages) {
      const LatentSequence z = reconstruct_latent(c, f.codebooks, stages);
      double total = 0.0;
      for (std::size_t t = 0; t < c.num_frames; ++t) {
        double e = 0.0;
        const auto frame = z.frame(t);
        for (int i = 0; i < fl; ++i) {
          const double d = padded[t * fl + i] - frame[static_cast<std::size_t>(i)];
          e += d * d;
        }
        o.require(e <= prev_frame_err[t] * (1.0 + 1e-12) + 1e-300,
                  "item " + std::to_string(item) + " frame " + std::to_string(t) + " stage " +
                      std::to_string(stages) + " residual grew");
        prev_frame_err[t] = e;
        total += e;
        ++frames_checked;
      }
      const Waveform y = decode(c, f.codebooks, stages);
      double err = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) err += (x.samples[i] - y.samples[i]) * (x.samples[i] - y.samples[i]);
      o.require(err <= prev_total * (1.0 + 1e-12), "item " + std::to_string(item) + " SNR dropped at stage " +
                                                       std::to_string(stages));
      prev_total = err;
      const double snr = 10.0 * std::log10(energy(x.samples) / err);
      if (stages == 1) snr_first += snr / static_cast<double>(f.held_out.size());
      if (stages == c.num_stages) snr_last += snr / static_cast<double>(f.held_out.size());
    }
  }
  if (o.pass) {
    o.detail << f.held_out.size() << " held-out RIRs, " << frames_checked << " frame-stage checks, mean SNR "
             << snr_first << " dB -> " << snr_last << " dB";
  }
  return o;
}

Outcome evaluation_protocol() {
  Outcome o;
  const CodecFixture& f = codec_fixture();
  std::vector<EvalItem> ref, round_trip, anchor;
  for (std::size_t i = 0; i < f.held_out.size(); ++i) {
    const std::string id = "rir" + std::to_string(i);
    ref.push_back({id, f.held_out[i]});
    round_trip.push_back({id, decode(encode(f.held_out[i], f.codebooks), f.codebooks)});
    anchor.push_back({id, anchor_rir(kDefaultSessionRateHz, i)});
  }
  std::vector<Waveform> dry;
  for (std::uint64_t s = 0; s < 2; ++s) dry.push_back(synthetic_speech(s, 1.0));
  EvalOptions opts;
  opts.n_resamples = 1000;

  const EvalReport self = evaluate_set(ref, ref, dry, opts);
  for (const MetricSummary& m : self.metrics) {
    o.require(m.ci.mean == 0.0 && m.ci.lower == 0.0 && m.ci.upper == 0.0, "self comparison " + m.name);
  }
  opts.with_srmr = false;
  const MetricSummary rt = evaluate_set(round_trip, ref, dry, opts).metric("t30");
  const MetricSummary an = evaluate_set(anchor, ref, dry, opts).metric("t30");
  o.require(rt.count > 0 && an.count > 0, "t30 comparisons all excluded");
  o.require(rt.ci.mean < an.ci.mean,
            "round trip dT30 " + std::to_string(rt.ci.mean) + " vs anchor " + std::to_string(an.ci.mean));

  std::vector<double> coin(1000, 0.0);
  std::fill(coin.begin() + 500, coin.end(), 1.0);
  const BootstrapCi ci = bootstrap_ci(coin, 2000, 0.95, 0);
  const double width = ci.upper - ci.lower;
  o.require(std::abs(width - 0.062) <= 0.015, "bootstrap width " + std::to_string(width));
  if (o.pass) {
    o.detail << "self = 0, dT30 round trip " << rt.ci.mean << " < anchor " << an.ci.mean << ", CI width "
             << width;
  }
  return o;
}

#ifdef RIRKIT_CLI_PATH
int shell(const fs::path& cwd, const std::string& args) {
  const std::string cmd = "cd '" + cwd.string() + "' && '" + std::string(RIRKIT_CLI_PATH) + "' " + args +
                          " > /dev/null 2>> cli.log";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
#endif

Outcome end_to_end() {
  Outcome o;
#ifndef RIRKIT_CLI_PATH
  o.require(false, "command-line tool not built");
#else
  const std::vector<std::string> steps{
      "synth --random 8 --seed 3 -o refs",
      "ingest refs -o corpus.jsonl",
      "codec train --manifest corpus.jsonl -o codebooks.rvq --stages 4 --codebook-size 32 "
      "--frame-len 512 --iterations 10 --seed 3",
      "sample --mode ar-cfg --config ../cfg.json --codebooks codebooks.rvq --manifest corpus.jsonl "
      "--targets corpus.jsonl -o gen --seed 3",
      "eval --generated gen/manifest.jsonl --reference corpus.jsonl -o report.json --csv table.csv "
      "--resamples 500 --seed 3"};
  const fs::path root = test::scratch_dir("rirkit_acceptance_e2e");
  {
    std::ofstream cfg(root / "cfg.json");
    cfg << R"({"sample": {"ngram_order": 2, "cfg_weight": 1.0, "top_k": 32, "temperature": 1.0}})";
  }
  std::map<std::string, std::uint64_t> hashes[2];
  double slowest = 0.0;
  for (int run = 0; run < 2 && o.pass; ++run) {
    const fs::path dir = root / ("run" + std::to_string(run));
    fs::create_directories(dir);
    const auto t0 = std::chrono::steady_clock::now();
    for (const std::string& step : steps) {
      const int rc = shell(dir, step);
      o.require(rc == 0, "'" + step.substr(0, step.find(' ', 6)) + "' exited " + std::to_string(rc));
      if (!o.pass) break;
    }
    slowest = std::max(slowest, seconds_since(t0));
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
      if (e.is_regular_file() && e.path().filename() != "cli.log") {
        hashes[run][fs::relative(e.path(), dir).string()] = test::file_hash(e.path());
      }
    }
  }
  if (o.pass) {
    o.require(hashes[0] == hashes[1], "outputs differ between seeded runs");
    o.require(hashes[0].contains("report.json"), "no report written");
    o.require(slowest < 300.0, "pipeline took " + std::to_string(slowest) + " s");
  }
  if (o.pass) o.detail << hashes[0].size() << " identical files across two runs, " << slowest << " s per run";
#endif
  return o;
}

Outcome srmr_direction() {
  Outcome o;
  SynthTarget target;
  target.params.broadband = {1.2, 1.2, 1.2, 1.8, 44.0};
  target.params.srd_m = 2.0;
  for (auto& b : target.params.per_band) b = target.params.broadband;
  target.seed = 9;
  const Waveform rir = synth_rir(target).first;
  const double t30 = analyze(rir, {.band_wise = false}).broadband.t30_s;
  o.require(std::abs(t30 - 1.2) < 0.12, "synthetic RIR T30 " + std::to_string(t30));
  for (std::uint64_t s = 0; s < 4; ++s) {
    const Waveform dry = synthetic_speech(s, 2.0);
    const double a = srmr_lite(dry);
    const double b = srmr_lite(convolve(dry, rir));
    o.require(a > b, "sample " + std::to_string(s) + ": dry " + std::to_string(a) + " <= wet " + std::to_string(b));
    if (o.pass) o.detail << (s ? ", " : "dry > wet: ") << a << " > " << b;
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"analyzer exactness on analytic decays", analyzer_exactness},
      {"synthesis round trip", synthesis_round_trip},
      {"quantizer conformance", quantizer_conformance},
      {"guidance algebra", guidance_algebra},
      {"MaskGIT oracle convergence", maskgit_oracle},
      {"Euler convergence order", euler_order},
      {"codec monotonicity", codec_monotonicity},
      {"evaluation self-consistency", evaluation_protocol},
      {"end-to-end CLI determinism", end_to_end},
      {"SRMR directionality", srmr_direction},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "threw: " << e.what();
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << ": " << criteria[i].first << " ("
              << o.detail.str() << ")" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}

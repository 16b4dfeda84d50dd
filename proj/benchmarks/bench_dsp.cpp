#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "rirkit/analyze.hpp"
#include "rirkit/spectrum.hpp"
#include "rirkit/srmr.hpp"
#include "rirkit/synth.hpp"

using namespace rirkit;

namespace {

Waveform decaying_noise(double t60, double duration_s) {
  Waveform w;
  w.samples.resize(static_cast<std::size_t>(duration_s * w.sample_rate_hz));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  const double k = -3.0 * std::log(10.0) / (t60 * w.sample_rate_hz);
  for (std::size_t n = 0; n < w.samples.size(); ++n) w.samples[n] = g(rng) * std::exp(k * n);
  return w;
}

}  // namespace

static void BM_AnalyzeBroadband(benchmark::State& state) {
  const Waveform w = decaying_noise(0.8, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(analyze(w, {.band_wise = false}));
}
BENCHMARK(BM_AnalyzeBroadband)->Unit(benchmark::kMillisecond);

static void BM_AnalyzeFull(benchmark::State& state) {
  const Waveform w = decaying_noise(0.8, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(analyze(w));
}
BENCHMARK(BM_AnalyzeFull)->Unit(benchmark::kMillisecond);

static void BM_SynthRir(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(synth_rir(random_grid_target(seed++)));
}
BENCHMARK(BM_SynthRir)->Unit(benchmark::kMillisecond);

static void BM_Convolve(benchmark::State& state) {
  const Waveform speech = synthetic_speech(0, 2.0);
  const Waveform rir = decaying_noise(1.0, static_cast<double>(state.range(0)) / 1000.0);
  for (auto _ : state) benchmark::DoNotOptimize(convolve(speech, rir));
}
BENCHMARK(BM_Convolve)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_SrmrLite(benchmark::State& state) {
  const Waveform speech = synthetic_speech(0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(srmr_lite(speech));
}
BENCHMARK(BM_SrmrLite)->Unit(benchmark::kMillisecond);

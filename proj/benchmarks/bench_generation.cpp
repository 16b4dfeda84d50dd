#include <benchmark/benchmark.h>

#include <random>

#include "rirkit/codec.hpp"
#include "rirkit/guidance.hpp"
#include "rirkit/ngram.hpp"
#include "rirkit/samplers.hpp"

using namespace rirkit;

namespace {

std::vector<Waveform> corpus(std::size_t n) {
  std::vector<Waveform> out;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (std::size_t i = 0; i < n; ++i) {
    Waveform w;
    w.samples.resize(44100);
    const double k = -6.9 / (0.3 + 0.1 * static_cast<double>(i)) / w.sample_rate_hz;
    for (std::size_t s = 0; s < w.samples.size(); ++s) w.samples[s] = g(rng) * std::exp(k * s);
    out.push_back(std::move(w));
  }
  return out;
}

const RvqCodebooks& codebooks() {
  static const RvqCodebooks cb = [] {
    RvqTrainOptions o;
    o.codebook_size = 32;
    o.lloyd_iterations = 5;
    return train_rvq(corpus(8), o);
  }();
  return cb;
}

}  // namespace

static void BM_TrainRvq(benchmark::State& state) {
  const auto data = corpus(8);
  RvqTrainOptions o;
  o.codebook_size = 32;
  o.lloyd_iterations = 5;
  for (auto _ : state) benchmark::DoNotOptimize(train_rvq(data, o));
}
BENCHMARK(BM_TrainRvq)->Unit(benchmark::kMillisecond)->Iterations(1);

static void BM_EncodeDecode(benchmark::State& state) {
  const Waveform w = corpus(1)[0];
  for (auto _ : state) benchmark::DoNotOptimize(decode(encode(w, codebooks()), codebooks()));
}
BENCHMARK(BM_EncodeDecode)->Unit(benchmark::kMillisecond);

static void BM_TopkSample(benchmark::State& state) {
  ScoreVector scores(256);
  Rng rng(1);
  for (double& s : scores) s = uniform01(rng);
  for (auto _ : state) benchmark::DoNotOptimize(topk_sample(scores, 64, 1.0, rng));
}
BENCHMARK(BM_TopkSample);

static void BM_NgramArGenerate(benchmark::State& state) {
  std::vector<TokenSequence> seqs;
  for (const Waveform& w : corpus(8)) seqs.push_back(flatten(encode(w, codebooks())));
  const NgramModel model(seqs, 2, codebooks().codebook_size);
  GuidanceConfig cfg;
  cfg.top_k = 32;
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(ar_generate(model, nullptr, cfg, seqs[0].size(), rng));
}
BENCHMARK(BM_NgramArGenerate)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

#include "rirkit/srmr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "rirkit/error.hpp"
#include "rirkit/filters.hpp"

namespace rirkit {
namespace {

constexpr double kLowestCenterHz = 125.0;
constexpr double kEnvelopeCutoffHz = 30.0;
constexpr double kEnvelopeRateHz = 1000.0;
constexpr double kModLowHz = 4.0;
constexpr double kModHighHz = 128.0;
// Edge ratio sqrt(hi/lo) for a constant-Q (Q = 2) band-pass.
constexpr double kModEdgeRatio = 1.2807764064044151;

double erb_hz(double fc) { return 24.7 * (4.37 * fc / 1000.0 + 1.0); }

}  // namespace

SrmrDetail srmr_lite_detail(const Waveform& w) {
  validate(w);
  if (w.duration_s() < 1.0) {
    throw Error(ErrorCode::kConfiguration, "SRMR needs at least 1 s of signal");
  }
  const double fs = w.sample_rate_hz;
  const double top = fs / 4.0;
  const auto decim = std::max<std::size_t>(1, static_cast<std::size_t>(fs / kEnvelopeRateHz));
  const double env_fs = fs / static_cast<double>(decim);

  const SosFilter envelope_lp = butterworth_lowpass(1, kEnvelopeCutoffHz, fs);
  std::array<SosFilter, kSrmrModulationBands> mod_filters;
  for (std::size_t m = 0; m < kSrmrModulationBands; ++m) {
    const double fc = kModLowHz * std::pow(kModHighHz / kModLowHz,
                                           static_cast<double>(m) / (kSrmrModulationBands - 1));
    mod_filters[m] = butterworth_bandpass(1, fc / kModEdgeRatio, fc * kModEdgeRatio, env_fs);
  }

  SrmrDetail detail;
  std::vector<double> band(w.size());
  for (std::size_t a = 0; a < kSrmrAcousticBands; ++a) {
    const double fc = kLowestCenterHz * std::pow(top / kLowestCenterHz,
                                                 static_cast<double>(a) / (kSrmrAcousticBands - 1));
    const double half_bw = erb_hz(fc) / 2.0;
    const SosFilter acoustic =
        butterworth_bandpass(2, fc - half_bw, std::min(fc + half_bw, 0.49 * fs), fs);

    std::copy(w.samples.begin(), w.samples.end(), band.begin());
    acoustic.process(band);
    for (double& v : band) v = std::abs(v);
    envelope_lp.process(band);

    std::vector<double> env;
    env.reserve(band.size() / decim + 1);
    for (std::size_t i = 0; i < band.size(); i += decim) env.push_back(band[i]);
    const double mean = std::accumulate(env.begin(), env.end(), 0.0) / static_cast<double>(env.size());
    for (double& v : env) v -= mean;

    for (std::size_t m = 0; m < kSrmrModulationBands; ++m) {
      std::vector<double> mod = env;
      mod_filters[m].process(mod);
      double e = 0.0;
      for (double v : mod) e += v * v;
      detail.modulation_energy[m] += e;
    }
  }

  const auto& me = detail.modulation_energy;
  const double low = me[0] + me[1] + me[2] + me[3];
  const double high = me[4] + me[5] + me[6] + me[7];
  if (!(high > 0.0)) throw Error(ErrorCode::kDegenerateSignal, "no high modulation energy");
  detail.score = low / high;
  return detail;
}

double srmr_lite(const Waveform& w) { return srmr_lite_detail(w).score; }

}  // namespace rirkit

#include "rirkit/decay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rirkit/error.hpp"

namespace rirkit {
namespace {

constexpr std::size_t kMinFitPoints = 8;
constexpr double kOnsetThresholdDb = -20.0;

struct FitInterval {
  double upper_db;
  double lower_db;
};

FitInterval interval_for(ReverbTimeKind kind) {
  switch (kind) {
    case ReverbTimeKind::kT30: return {-5.0, -35.0};
    case ReverbTimeKind::kT15: return {-5.0, -20.0};
    case ReverbTimeKind::kEdt: return {0.0, -10.0};
  }
  return {-5.0, -35.0};
}

const char* kind_name(ReverbTimeKind kind) {
  switch (kind) {
    case ReverbTimeKind::kT30: return "T30";
    case ReverbTimeKind::kT15: return "T15";
    case ReverbTimeKind::kEdt: return "EDT";
  }
  return "?";
}

double to_db(double power_ratio) {
  if (!(power_ratio > 0.0)) return kEdcFloorDb;
  return std::max(kEdcFloorDb, 10.0 * std::log10(power_ratio));
}

void require_window(const Waveform& w, std::size_t onset, double window_s, const char* what) {
  if (onset >= w.size()) {
    throw Error(ErrorCode::kInvalidValue, std::string(what) + ": onset outside signal");
  }
  const std::size_t need = seconds_to_samples(window_s, w.sample_rate_hz);
  if (w.size() - onset < need) {
    throw Error(ErrorCode::kInvalidValue,
                std::string(what) + ": needs " + std::to_string(window_s * 1000.0) +
                    " ms of signal after the onset");
  }
}

}  // namespace

EnergyDecayCurve energy_decay_curve(const Waveform& w, const EdcOptions& options) {
  const std::span<const double> x = w.samples;
  const double peak = peak_abs(x);
  if (!(peak > 0.0)) throw Error(ErrorCode::kDegenerateSignal, "energy decay of a silent signal");
  const std::size_t n = x.size();

  // Noise floor: mean power of the final stretch of the signal.
  const std::size_t tail_len =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(options.tail_fraction * n)));
  const double floor_power = energy(x, n - tail_len, n) / static_cast<double>(tail_len);

  // Centered moving-average power; find the last window clearly above the floor.
  const std::size_t win = std::max<std::size_t>(
      1, seconds_to_samples(options.local_window_s, w.sample_rate_hz));
  const std::size_t half = win / 2;
  const double threshold = floor_power * std::pow(10.0, options.margin_db / 10.0);
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i] * x[i];

  std::size_t trunc = n;  // sentinel: none found
  for (std::size_t i = n; i-- > 0;) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n, i + half + 1);
    const double local = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
    if (local > threshold) {
      trunc = i;
      break;
    }
  }

  EnergyDecayCurve edc;
  edc.sample_rate_hz = w.sample_rate_hz;
  edc.noise_floor_db = to_db(floor_power / (peak * peak));
  edc.values_db.assign(n, kEdcFloorDb);
  if (trunc == n) {
    // Nothing stands out from the tail level: there is no decay to measure.
    edc.values_db[0] = 0.0;
    return edc;
  }
  edc.truncation_index = trunc;

  // Backward accumulation adds the small tail terms first.
  std::vector<double> backward(trunc + 1);
  double acc = 0.0;
  for (std::size_t i = trunc + 1; i-- > 0;) {
    acc += x[i] * x[i];
    backward[i] = acc;
  }
  const double total = backward[0];
  if (!(total > 0.0)) throw Error(ErrorCode::kDegenerateSignal, "no energy before truncation");
  edc.values_db[0] = 0.0;
  for (std::size_t i = 1; i <= trunc; ++i) {
    edc.values_db[i] = std::min(edc.values_db[i - 1], to_db(backward[i] / total));
  }
  return edc;
}

double reverb_time(const EnergyDecayCurve& edc, ReverbTimeKind kind) {
  const auto [upper, lower] = interval_for(kind);
  const auto& v = edc.values_db;
  const std::size_t last = std::min(edc.truncation_index, v.empty() ? 0 : v.size() - 1);

  std::size_t begin = 0;
  while (begin <= last && begin < v.size() && v[begin] > upper) ++begin;
  std::size_t end = begin;
  while (end <= last && end < v.size() && v[end] >= lower) ++end;
  const bool reached = end <= last && end < v.size();
  if (!reached || end - begin < kMinFitPoints) {
    throw Error(ErrorCode::kInsufficientDecay,
                std::string(kind_name(kind)) + ": decay curve does not reach " +
                    std::to_string(static_cast<int>(lower)) + " dB");
  }

  // Centered least squares on (t, dB).
  const double fs = edc.sample_rate_hz;
  const double count = static_cast<double>(end - begin);
  double mean_t = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    mean_t += static_cast<double>(i) / fs;
    mean_y += v[i];
  }
  mean_t /= count;
  mean_y /= count;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const double dt = static_cast<double>(i) / fs - mean_t;
    sxy += dt * (v[i] - mean_y);
    sxx += dt * dt;
  }
  const double slope = sxy / sxx;
  if (!(slope < 0.0)) {
    throw Error(ErrorCode::kInsufficientDecay,
                std::string(kind_name(kind)) + ": non-negative decay slope");
  }
  return -60.0 / slope;
}

double clarity_c80(const Waveform& w, std::size_t onset) {
  require_window(w, onset, 0.080, "C80");
  const std::size_t split = onset + seconds_to_samples(0.080, w.sample_rate_hz);
  const double early = energy(w.samples, onset, split);
  const double late = energy(w.samples, split, w.size());
  if (!(early > 0.0) && !(late > 0.0)) {
    throw Error(ErrorCode::kDegenerateSignal, "C80: no energy after onset");
  }
  if (!(late > 0.0)) return std::numeric_limits<double>::infinity();
  if (!(early > 0.0)) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(early / late);
}

bool is_degenerate_clarity(double c80_db) noexcept { return !std::isfinite(c80_db); }

double definition_d50(const Waveform& w, std::size_t onset) {
  require_window(w, onset, 0.050, "D50");
  const std::size_t split = onset + seconds_to_samples(0.050, w.sample_rate_hz);
  const double early = energy(w.samples, onset, split);
  const double total = energy(w.samples, onset, w.size());
  if (!(total > 0.0)) throw Error(ErrorCode::kDegenerateSignal, "D50: no energy after onset");
  return 100.0 * early / total;
}

std::size_t detect_onset(const Waveform& w) {
  const double peak = peak_abs(w.samples);
  if (!(peak > 0.0)) throw Error(ErrorCode::kDegenerateSignal, "onset of a silent signal");
  const double threshold = peak * std::pow(10.0, kOnsetThresholdDb / 20.0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (std::abs(w.samples[i]) >= threshold) return i;
  }
  return 0;
}

double srd_from_onset(std::size_t onset, int sample_rate_hz) noexcept {
  const double d = static_cast<double>(onset) / sample_rate_hz * kSpeedOfSoundMps;
  return std::clamp(d, kMinSrdM, kMaxSrdM);
}

double estimate_srd(const Waveform& w) { return srd_from_onset(detect_onset(w), w.sample_rate_hz); }

}  // namespace rirkit

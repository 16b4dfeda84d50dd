#include "rirkit/eval.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iterator>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include "rirkit/analyze.hpp"
#include "rirkit/error.hpp"
#include "rirkit/srmr.hpp"

namespace rirkit {
namespace {

constexpr std::array<Measure, 5> kDecayMeasures{Measure::kT30, Measure::kT15, Measure::kEdt,
                                                Measure::kC80, Measure::kD50};

double r_a(double f) {
  const double f2 = f * f;
  const double c1 = 12194.0 * 12194.0;
  const double c2 = 20.6 * 20.6;
  const double c3 = 107.7 * 107.7;
  const double c4 = 737.9 * 737.9;
  return c1 * f2 * f2 / ((f2 + c2) * std::sqrt((f2 + c3) * (f2 + c4)) * (f2 + c1));
}

// Per-sample deltas, NaN where the comparison was excluded.
struct SampleDeltas {
  std::map<std::string, double> values;
};

std::vector<std::string> metric_names() {
  std::vector<std::string> names;
  for (Measure m : kDecayMeasures) names.push_back(measure_field(m).substr(0, 3));
  for (Measure m : kDecayMeasures) names.push_back(measure_field(m).substr(0, 3) + "_broadband");
  names.push_back("srd");
  names.push_back("srmr");
  return names;
}

SampleDeltas compare(const Waveform& gen, const Waveform& ref, const std::vector<Waveform>& dry,
                     bool with_srmr) {
  SampleDeltas d;
  const double nan = std::nan("");
  for (const std::string& name : metric_names()) d.values[name] = nan;

  AcousticParams pg;
  AcousticParams pr;
  try {
    pg = analyze(gen);
    pr = analyze(ref);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfiguration) throw;
    return d;  // silent input: every comparison excluded
  }
  const auto delta = [&](std::size_t slot, Measure kind) {
    if (!pg.valid(slot) || !pr.valid(slot)) return nan;
    return relative_error(pg.value(slot), pr.value(slot), kind).value_or(nan);
  };
  for (Measure m : kDecayMeasures) {
    const std::string name = measure_field(m).substr(0, 3);
    d.values[name + "_broadband"] = delta(slot_index(m), m);
    std::array<double, kNumBands> bands{};
    for (std::size_t b = 0; b < kNumBands; ++b) bands[b] = delta(slot_index(m, static_cast<int>(b)), m);
    d.values[name] = a_weighted_aggregate(bands).value_or(nan);
  }
  d.values["srd"] = delta(slot_index(Measure::kSrd), Measure::kSrd);
  if (with_srmr && !dry.empty()) d.values["srmr"] = srmr_deviation(gen, ref, dry).value_or(nan);
  return d;
}

std::vector<EvalItem> sorted_by_id(std::vector<EvalItem> items, const char* side) {
  std::sort(items.begin(), items.end(),
            [](const EvalItem& a, const EvalItem& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < items.size(); ++i) {
    if (items[i].id == items[i - 1].id) {
      throw Error(ErrorCode::kManifest, std::string("duplicate id '") + items[i].id + "' in " + side);
    }
  }
  return items;
}

}  // namespace

std::optional<double> relative_error(double feat, double ref, Measure kind) {
  if (!std::isfinite(feat) || !std::isfinite(ref)) return std::nullopt;
  if (kind == Measure::kC80) {
    feat = std::pow(10.0, feat / 10.0);
    ref = std::pow(10.0, ref / 10.0);
  }
  if (ref == 0.0) return std::nullopt;
  return std::abs(feat - ref) / std::abs(ref);
}

double a_weight_db(double f_hz) {
  return 20.0 * std::log10(r_a(f_hz)) - 20.0 * std::log10(r_a(1000.0));
}

std::optional<double> a_weighted_aggregate(std::span<const double> band_errors,
                                           std::span<const double> centers_hz) {
  if (band_errors.size() != centers_hz.size()) {
    throw Error(ErrorCode::kShape, "band errors and band centers differ in length");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t b = 0; b < band_errors.size(); ++b) {
    if (std::isnan(band_errors[b])) continue;
    const double g = std::pow(10.0, a_weight_db(centers_hz[b]) / 10.0);
    num += g * band_errors[b];
    den += g;
  }
  if (!(den > 0.0)) return std::nullopt;
  return num / den;
}

std::optional<double> srmr_deviation(const Waveform& gen, const Waveform& ref,
                                     const std::vector<Waveform>& dry) {
  if (dry.empty()) throw Error(ErrorCode::kConfiguration, "SRMR deviation needs dry signals");
  double total = 0.0;
  for (const Waveform& s : dry) {
    const double sg = srmr_lite(convolve(s, gen));
    const double sr = srmr_lite(convolve(s, ref));
    if (!std::isfinite(sg) || !std::isfinite(sr) || !(sr > 0.0)) return std::nullopt;
    total += std::abs(sg - sr) / sr;
  }
  return total / static_cast<double>(dry.size());
}

BootstrapCi bootstrap_ci(std::span<const double> values, int n_resamples, double level,
                         std::uint64_t seed) {
  if (values.size() < 2) {
    throw Error(ErrorCode::kConfiguration, "bootstrap needs at least two values");
  }
  if (n_resamples < 1 || !(level > 0.0 && level < 1.0)) {
    throw Error(ErrorCode::kConfiguration, "bootstrap needs resamples >= 1 and level in (0, 1)");
  }
  const std::size_t n = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  BootstrapCi ci;
  ci.mean = sum / static_cast<double>(n);

  std::mt19937_64 rng(seed);
  std::vector<double> means(static_cast<std::size_t>(n_resamples));
  for (double& m : means) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto pick = static_cast<std::size_t>(static_cast<double>(rng() >> 11) * 0x1.0p-53 *
                                                 static_cast<double>(n));
      acc += values[std::min(pick, n - 1)];
    }
    m = acc / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(means.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, means.size() - 1);
    return means[lo] + (pos - static_cast<double>(lo)) * (means[hi] - means[lo]);
  };
  const double tail = (1.0 - level) / 2.0;
  ci.lower = std::min(quantile(tail), ci.mean);
  ci.upper = std::max(quantile(1.0 - tail), ci.mean);
  return ci;
}

const MetricSummary& EvalReport::metric(const std::string& name) const {
  for (const MetricSummary& m : metrics) {
    if (m.name == name) return m;
  }
  throw Error(ErrorCode::kConfiguration, "no metric named " + name);
}

EvalReport evaluate_set(std::vector<EvalItem> generated, std::vector<EvalItem> reference,
                        const std::vector<Waveform>& dry, const EvalOptions& options) {
  generated = sorted_by_id(std::move(generated), "generated set");
  reference = sorted_by_id(std::move(reference), "reference set");
  std::vector<std::string> only_gen;
  std::vector<std::string> only_ref;
  std::vector<std::string> ids_gen;
  std::vector<std::string> ids_ref;
  for (const auto& g : generated) ids_gen.push_back(g.id);
  for (const auto& r : reference) ids_ref.push_back(r.id);
  std::set_difference(ids_gen.begin(), ids_gen.end(), ids_ref.begin(), ids_ref.end(),
                      std::back_inserter(only_gen));
  std::set_difference(ids_ref.begin(), ids_ref.end(), ids_gen.begin(), ids_gen.end(),
                      std::back_inserter(only_ref));
  if (!only_gen.empty() || !only_ref.empty()) {
    std::string msg = "sample ids do not match;";
    for (const auto& id : only_gen) msg += " missing in reference: " + id + ";";
    for (const auto& id : only_ref) msg += " missing in generated: " + id + ";";
    throw Error(ErrorCode::kManifest, msg);
  }
  if (generated.empty()) throw Error(ErrorCode::kManifest, "nothing to evaluate");

  std::vector<SampleDeltas> deltas(generated.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < generated.size(); i = next++) {
      try {
        deltas[i] = compare(generated[i].rir, reference[i].rir, dry, options.with_srmr);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(generated.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  EvalReport report;
  report.method = options.method;
  report.num_samples = generated.size();
  for (const std::string& name : metric_names()) {
    if (name == "srmr" && (!options.with_srmr || dry.empty())) continue;
    MetricSummary m;
    m.name = name;
    std::vector<double> values;
    for (const SampleDeltas& d : deltas) {
      const double v = d.values.at(name);
      if (std::isnan(v)) {
        ++m.excluded;
      } else {
        values.push_back(v);
      }
    }
    m.count = values.size();
    if (values.size() >= 2) {
      m.ci = bootstrap_ci(values, options.n_resamples, options.level, options.seed);
    } else if (values.size() == 1) {
      m.ci = {values[0], values[0], values[0]};
    } else {
      m.ci = {std::nan(""), std::nan(""), std::nan("")};
    }
    report.metrics.push_back(m);
  }
  return report;
}

std::string eval_report_csv(const std::vector<EvalReport>& reports) {
  std::string out = "method";
  if (reports.empty()) return out + "\n";
  for (const MetricSummary& m : reports.front().metrics) {
    out += "," + m.name + "," + m.name + "_plus," + m.name + "_minus";
  }
  out += "\n";
  char buf[64];
  for (const EvalReport& r : reports) {
    out += r.method;
    for (const MetricSummary& m : r.metrics) {
      std::snprintf(buf, sizeof buf, ",%.4f,%.4f,%.4f", 100.0 * m.ci.mean,
                    100.0 * (m.ci.upper - m.ci.mean), 100.0 * (m.ci.mean - m.ci.lower));
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace rirkit

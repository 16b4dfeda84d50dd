#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rirkit/acoustic_params.hpp"
#include "rirkit/waveform.hpp"

namespace rirkit {

/// |feat - ref| / |ref|, with C80 compared as linear energy ratios.
/// nullopt when the comparison is undefined (ref zero, non-finite input);
/// callers count these as excluded samples.
std::optional<double> relative_error(double feat, double ref, Measure kind);

/// Standard A-weighting response, 0 dB at 1 kHz.
double a_weight_db(double f_hz);

/// Weighted mean of per-band errors with power weights 10^(A(f_b)/10).
/// NaN entries are skipped; nullopt if none remain.
std::optional<double> a_weighted_aggregate(std::span<const double> band_errors,
                                           std::span<const double> centers_hz = kBandCentersHz);

/// Mean over the dry signals of |SRMR(dry * gen) - SRMR(dry * ref)| /
/// SRMR(dry * ref). nullopt if any SRMR is degenerate.
std::optional<double> srmr_deviation(const Waveform& gen, const Waveform& ref,
                                     const std::vector<Waveform>& dry);

struct BootstrapCi {
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Percentile bootstrap of the mean. The mean is the plain arithmetic mean
/// and the interval always contains it. Needs at least two values.
BootstrapCi bootstrap_ci(std::span<const double> values, int n_resamples = 2000,
                         double level = 0.95, std::uint64_t seed = 0);

struct EvalItem {
  std::string id;
  Waveform rir;
};

struct MetricSummary {
  std::string name;
  BootstrapCi ci;
  std::size_t count = 0;     // samples contributing
  std::size_t excluded = 0;  // invalid comparisons dropped
};

struct EvalReport {
  std::string method;
  std::size_t num_samples = 0;
  std::vector<MetricSummary> metrics;

  const MetricSummary& metric(const std::string& name) const;
};

struct EvalOptions {
  std::string method = "generated";
  int n_resamples = 2000;
  double level = 0.95;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool with_srmr = true;
};

/// Full comparison of a generated set against references matched by id.
/// Metrics: t30, t15, edt, c80, d50 as A-weighted band aggregates, their
/// broadband counterparts (suffix "_broadband"), srd and srmr. Order of the
/// inputs does not matter. Throws kManifest listing ids present on one side
/// only.
EvalReport evaluate_set(std::vector<EvalItem> generated, std::vector<EvalItem> reference,
                        const std::vector<Waveform>& dry, const EvalOptions& options = {});

/// Table layout: one row per method, per metric "mean +upper -lower" in
/// percent.
std::string eval_report_csv(const std::vector<EvalReport>& reports);

}  // namespace rirkit

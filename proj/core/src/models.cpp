#include "rirkit/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rirkit/analyze.hpp"
#include "rirkit/error.hpp"

namespace rirkit {
namespace {

constexpr double kExcluded = -1e9;

void log_normalize(ScoreVector& s) {
  const double m = *std::max_element(s.begin(), s.end());
  double total = 0.0;
  for (double v : s) total += std::exp(v - m);
  const double log_z = m + std::log(total);
  for (double& v : s) v -= log_z;
}

// Log prior weights over corpus items for a condition (uniform without one).
std::vector<double> log_prior(const std::vector<QuantizedParams>& labels,
                              const QuantizedParams* condition, double scale, std::size_t n) {
  std::vector<double> out(n, 0.0);
  if (condition == nullptr) return out;
  for (std::size_t j = 0; j < n; ++j) out[j] = -condition_distance(*condition, labels[j]) / scale;
  return out;
}

}  // namespace

OracleArModel::OracleArModel(TokenSequence truth, int vocab_size)
    : truth_(std::move(truth)), vocab_size_(vocab_size) {
  for (int t : truth_) {
    if (t < 0 || t >= vocab_size_) throw Error(ErrorCode::kCorruptSequence, "oracle token out of range");
  }
}

ScoreVector OracleArModel::next_scores(std::span<const int> prefix, const QuantizedParams*) const {
  const std::size_t pos = prefix.size();
  if (pos >= truth_.size()) return ScoreVector(static_cast<std::size_t>(vocab_size_), 0.0);
  ScoreVector s(static_cast<std::size_t>(vocab_size_), kExcluded);
  s[static_cast<std::size_t>(truth_[pos])] = 0.0;
  return s;
}

OracleMaskedModel::OracleMaskedModel(Codegram truth, int vocab_size)
    : truth_(std::move(truth)), vocab_size_(vocab_size) {}

std::vector<ScoreVector> OracleMaskedModel::predict(const Codegram& masked,
                                                    const QuantizedParams*) const {
  if (masked.num_stages != truth_.num_stages || masked.num_frames != truth_.num_frames) {
    throw Error(ErrorCode::kShape, "oracle codegram shape differs from the request");
  }
  std::vector<ScoreVector> out(masked.codes.size());
  for (std::size_t i = 0; i < masked.codes.size(); ++i) {
    if (masked.codes[i] != kMaskToken) continue;
    out[i].assign(static_cast<std::size_t>(vocab_size_), kExcluded);
    out[i][static_cast<std::size_t>(truth_.codes[i])] = 0.0;
  }
  return out;
}

AnalyzerClassifier::AnalyzerClassifier(GridSet grids, double sigma_classes, bool band_wise)
    : grids_(std::move(grids)), sigma_(sigma_classes), band_wise_(band_wise) {
  if (!(sigma_ > 0.0)) throw Error(ErrorCode::kConfiguration, "classifier sigma must be positive");
}

ClassLogProbs AnalyzerClassifier::classify(const Waveform& partial) const {
  ClassLogProbs out;
  for (std::size_t slot = 0; slot < kNumSlots; ++slot) {
    const int n = grids_.for_slot(slot).num_classes;
    out[slot].assign(static_cast<std::size_t>(n), -std::log(static_cast<double>(n)));
  }
  AcousticParams measured;
  try {
    AnalysisOptions options;
    options.band_wise = band_wise_;
    measured = analyze(partial, options);
  } catch (const Error&) {
    return out;  // silent or unusable prefix: no information
  }
  for (std::size_t slot = 0; slot < kNumSlots; ++slot) {
    if (!measured.valid(slot)) continue;
    const double v = measured.value(slot);
    if (std::isnan(v)) continue;
    const int center = quantize(v, grids_.for_slot(slot));
    ScoreVector& s = out[slot];
    for (std::size_t c = 0; c < s.size(); ++c) {
      const double d = (static_cast<double>(c) - center) / sigma_;
      s[c] = -0.5 * d * d;
    }
    log_normalize(s);
  }
  return out;
}

double condition_distance(const QuantizedParams& a, const QuantizedParams& b) {
  double total = 0.0;
  for (std::size_t slot = 0; slot < kNumSlots; ++slot) {
    total += std::abs(a.indices[slot] - b.indices[slot]);
  }
  return total / static_cast<double>(kNumSlots);
}

PositionalFrequencyModel::PositionalFrequencyModel(std::vector<Codegram> corpus,
                                                   std::vector<QuantizedParams> labels,
                                                   int vocab_size, double smoothing, double scale)
    : corpus_(std::move(corpus)),
      labels_(std::move(labels)),
      vocab_size_(vocab_size),
      smoothing_(smoothing),
      scale_(scale) {
  if (corpus_.empty()) throw Error(ErrorCode::kConfiguration, "empty codegram corpus");
  if (!labels_.empty() && labels_.size() != corpus_.size()) {
    throw Error(ErrorCode::kConfiguration, "codegram corpus and labels differ in length");
  }
  if (!(smoothing_ > 0.0) || !(scale_ > 0.0)) {
    throw Error(ErrorCode::kConfiguration, "smoothing and scale must be positive");
  }
}

std::vector<ScoreVector> PositionalFrequencyModel::predict(const Codegram& masked,
                                                           const QuantizedParams* condition) const {
  if (condition != nullptr && labels_.empty()) {
    throw Error(ErrorCode::kConfiguration, "conditional query on an unlabeled corpus");
  }
  const std::vector<double> prior = log_prior(labels_, condition, scale_, corpus_.size());
  const double top = *std::max_element(prior.begin(), prior.end());
  std::vector<double> weight(prior.size());
  for (std::size_t j = 0; j < prior.size(); ++j) weight[j] = std::exp(prior[j] - top);

  std::vector<ScoreVector> out(masked.codes.size());
  for (int stage = 0; stage < masked.num_stages; ++stage) {
    for (std::size_t t = 0; t < masked.num_frames; ++t) {
      const std::size_t pos = static_cast<std::size_t>(stage) * masked.num_frames + t;
      if (masked.codes[pos] != kMaskToken) continue;
      std::vector<double> counts(static_cast<std::size_t>(vocab_size_), smoothing_);
      for (std::size_t j = 0; j < corpus_.size(); ++j) {
        const Codegram& c = corpus_[j];
        if (stage >= c.num_stages || t >= c.num_frames) continue;
        counts[static_cast<std::size_t>(c.at(stage, t))] += weight[j];
      }
      double total = 0.0;
      for (double v : counts) total += v;
      ScoreVector& s = out[pos];
      s.resize(counts.size());
      for (std::size_t k = 0; k < counts.size(); ++k) s[k] = std::log(counts[k] / total);
    }
  }
  return out;
}

EmpiricalFlowModel::EmpiricalFlowModel(std::vector<LatentSequence> corpus,
                                       std::vector<QuantizedParams> labels, double scale)
    : corpus_(std::move(corpus)), labels_(std::move(labels)), scale_(scale) {
  if (corpus_.empty()) throw Error(ErrorCode::kConfiguration, "empty latent corpus");
  if (!labels_.empty() && labels_.size() != corpus_.size()) {
    throw Error(ErrorCode::kConfiguration, "latent corpus and labels differ in length");
  }
  for (const LatentSequence& z : corpus_) {
    if (z.values.size() != corpus_.front().values.size()) {
      throw Error(ErrorCode::kShape, "latent corpus items differ in shape");
    }
  }
  if (!(scale_ > 0.0)) throw Error(ErrorCode::kConfiguration, "scale must be positive");
}

LatentSequence EmpiricalFlowModel::velocity(const LatentSequence& x, double t,
                                            const QuantizedParams* condition) const {
  if (x.values.size() != corpus_.front().values.size()) {
    throw Error(ErrorCode::kShape, "latent shape differs from the flow corpus");
  }
  if (condition != nullptr && labels_.empty()) {
    throw Error(ErrorCode::kConfiguration, "conditional query on an unlabeled corpus");
  }
  const double sigma = std::max(1.0 - t, 1e-9);
  std::vector<double> logw = log_prior(labels_, condition, scale_, corpus_.size());
  for (std::size_t j = 0; j < corpus_.size(); ++j) {
    double d2 = 0.0;
    const auto& z = corpus_[j].values;
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double r = x.values[i] - t * z[i];
      d2 += r * r;
    }
    logw[j] -= d2 / (2.0 * sigma * sigma);
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  double total = 0.0;
  for (double& w : logw) {
    w = std::exp(w - top);
    total += w;
  }
  LatentSequence v = x;
  std::fill(v.values.begin(), v.values.end(), 0.0);
  for (std::size_t j = 0; j < corpus_.size(); ++j) {
    const double w = logw[j] / total;
    if (w == 0.0) continue;
    const auto& z = corpus_[j].values;
    for (std::size_t i = 0; i < z.size(); ++i) v.values[i] += w * z[i];
  }
  for (std::size_t i = 0; i < v.values.size(); ++i) {
    v.values[i] = (v.values[i] - x.values[i]) / sigma;
  }
  return v;
}

}  // namespace rirkit

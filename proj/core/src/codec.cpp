#include "rirkit/codec.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "rirkit/error.hpp"

namespace rirkit {
namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

constexpr std::size_t kMinFramesPerCode = 10;
constexpr Eigen::Index kAssignBlockRows = 2048;

void check_options(const RvqTrainOptions& o) {
  if (o.num_stages < 1 || o.codebook_size < 2 || o.frame_len < 1 || o.lloyd_iterations < 0) {
    throw Error(ErrorCode::kConfiguration,
                "RVQ needs L >= 1, K >= 2, frame_len >= 1 and non-negative iterations");
  }
  if (o.codebook_size > 65536) {
    throw Error(ErrorCode::kConfiguration, "codebook size above 65536 does not fit 16-bit codes");
  }
}

Matrix frame_matrix(const std::vector<Waveform>& corpus, int frame_len) {
  const std::size_t rows = count_frames(corpus, frame_len);
  Matrix x = Matrix::Zero(static_cast<Eigen::Index>(rows), frame_len);
  Eigen::Index row = 0;
  for (const Waveform& w : corpus) {
    const std::size_t frames = frames_for(w.size(), frame_len);
    for (std::size_t t = 0; t < frames; ++t, ++row) {
      const std::size_t begin = t * static_cast<std::size_t>(frame_len);
      const std::size_t end = std::min(w.size(), begin + static_cast<std::size_t>(frame_len));
      for (std::size_t i = begin; i < end; ++i) {
        x(row, static_cast<Eigen::Index>(i - begin)) = w.samples[i];
      }
    }
  }
  return x;
}

// Index of the nearest center for every row, ties to the lowest index. The
// chosen center is replaced by center 0 (the zero vector) whenever the
// expanded-form distance picked something that does not actually shrink the
// row's energy.
std::vector<int> assign(const Matrix& x, const Matrix& centers) {
  const Vector center_norms = centers.rowwise().squaredNorm();
  std::vector<int> out(static_cast<std::size_t>(x.rows()), 0);
  for (Eigen::Index start = 0; start < x.rows(); start += kAssignBlockRows) {
    const Eigen::Index rows = std::min(kAssignBlockRows, x.rows() - start);
    const auto block = x.middleRows(start, rows);
    const Matrix cross = block * centers.transpose();
    for (Eigen::Index r = 0; r < rows; ++r) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (Eigen::Index k = 0; k < centers.rows(); ++k) {
        const double d = center_norms(k) - 2.0 * cross(r, k);
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(k);
        }
      }
      if (best != 0 && (block.row(r) - centers.row(best)).squaredNorm() > block.row(r).squaredNorm()) {
        best = 0;
      }
      out[static_cast<std::size_t>(start + r)] = best;
    }
  }
  return out;
}

// k-means with center 0 pinned at the origin.
Matrix kmeans(const Matrix& x, int k, int iterations, std::mt19937_64& rng) {
  const Eigen::Index n = x.rows();
  Matrix centers = Matrix::Zero(k, x.cols());

  // k-means++ seeding by squared distance to the nearest chosen center.
  Vector d2 = x.rowwise().squaredNorm();
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (int j = 1; j < k; ++j) {
    const double total = d2.sum();
    if (!(total > 0.0)) break;  // every frame already coincides with a center
    const double target = uniform(rng) * total;
    double acc = 0.0;
    Eigen::Index pick = n - 1;
    for (Eigen::Index i = 0; i < n; ++i) {
      acc += d2(i);
      if (acc > target && d2(i) > 0.0) {
        pick = i;
        break;
      }
    }
    while (d2(pick) <= 0.0 && pick > 0) --pick;
    centers.row(j) = x.row(pick);
    d2 = d2.cwiseMin((x.rowwise() - centers.row(j)).rowwise().squaredNorm());
  }

  std::vector<int> labels;
  for (int it = 0; it < iterations; ++it) {
    std::vector<int> next = assign(x, centers);
    if (next == labels) break;
    labels = std::move(next);
    Matrix sums = Matrix::Zero(k, x.cols());
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = labels[static_cast<std::size_t>(i)];
      sums.row(c) += x.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    for (int c = 1; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      }
    }
  }
  return centers.cast<float>().cast<double>();
}

Eigen::Map<const Matrix> stage_matrix(const RvqCodebooks& cb, int stage) {
  const std::size_t stride =
      static_cast<std::size_t>(cb.codebook_size) * static_cast<std::size_t>(cb.frame_len);
  return Eigen::Map<const Matrix>(cb.vectors.data() + static_cast<std::size_t>(stage) * stride,
                                  cb.codebook_size, cb.frame_len);
}

int resolve_stages(int stages, const RvqCodebooks& cb, int available) {
  if (stages < 0) return std::min(available, cb.num_stages);
  if (stages > available || stages > cb.num_stages) {
    throw Error(ErrorCode::kConfiguration, "stage prefix " + std::to_string(stages) +
                                               " exceeds the codegram's " +
                                               std::to_string(available) + " stages");
  }
  return stages;
}

}  // namespace

std::span<const double> RvqCodebooks::vector(int stage, int code) const {
  const std::size_t len = static_cast<std::size_t>(frame_len);
  const std::size_t index =
      (static_cast<std::size_t>(stage) * static_cast<std::size_t>(codebook_size) +
       static_cast<std::size_t>(code)) *
      len;
  return std::span<const double>(vectors).subspan(index, len);
}

void validate(const RvqCodebooks& cb) {
  if (cb.num_stages < 1 || cb.codebook_size < 2 || cb.frame_len < 1 ||
      cb.sample_rate_hz <= 0) {
    throw Error(ErrorCode::kConfiguration, "codebooks have an invalid shape");
  }
  const std::size_t expected = static_cast<std::size_t>(cb.num_stages) *
                               static_cast<std::size_t>(cb.codebook_size) *
                               static_cast<std::size_t>(cb.frame_len);
  if (cb.vectors.size() != expected) {
    throw Error(ErrorCode::kConfiguration, "codebooks hold " + std::to_string(cb.vectors.size()) +
                                               " values, expected " + std::to_string(expected));
  }
  for (double v : cb.vectors) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidValue, "non-finite codevector entry");
  }
}

std::size_t frames_for(std::size_t num_samples, int frame_len) noexcept {
  const auto len = static_cast<std::size_t>(frame_len);
  return (num_samples + len - 1) / len;
}

std::size_t count_frames(const std::vector<Waveform>& corpus, int frame_len) {
  std::size_t total = 0;
  for (const Waveform& w : corpus) total += frames_for(w.size(), frame_len);
  return total;
}

std::uint64_t corpus_fingerprint(const std::vector<Waveform>& corpus) {
  std::uint64_t h = 14695981039346656037ULL;
  const auto mix = [&h](const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  for (const Waveform& w : corpus) {
    const std::int64_t rate = w.sample_rate_hz;
    const std::uint64_t n = w.size();
    mix(&rate, sizeof rate);
    mix(&n, sizeof n);
    mix(w.samples.data(), w.samples.size() * sizeof(double));
  }
  return h;
}

RvqCodebooks train_rvq(const std::vector<Waveform>& corpus, const RvqTrainOptions& options) {
  check_options(options);
  if (corpus.empty()) throw Error(ErrorCode::kConfiguration, "RVQ training corpus is empty");
  const int rate = corpus.front().sample_rate_hz;
  for (const Waveform& w : corpus) {
    validate(w);
    if (w.sample_rate_hz != rate) {
      throw Error(ErrorCode::kConfiguration, "RVQ training corpus mixes sample rates");
    }
  }
  const std::size_t frames = count_frames(corpus, options.frame_len);
  const std::size_t needed = kMinFramesPerCode * static_cast<std::size_t>(options.codebook_size);
  if (frames < needed) {
    throw Error(ErrorCode::kConfiguration, "RVQ training needs at least " +
                                               std::to_string(needed) + " frames, corpus has " +
                                               std::to_string(frames));
  }

  RvqCodebooks cb;
  cb.num_stages = options.num_stages;
  cb.codebook_size = options.codebook_size;
  cb.frame_len = options.frame_len;
  cb.sample_rate_hz = rate;
  cb.trained_on = corpus_fingerprint(corpus);
  cb.vectors.reserve(static_cast<std::size_t>(options.num_stages) *
                     static_cast<std::size_t>(options.codebook_size) *
                     static_cast<std::size_t>(options.frame_len));

  std::mt19937_64 rng(options.seed);
  Matrix residual = frame_matrix(corpus, options.frame_len);
  for (int stage = 0; stage < options.num_stages; ++stage) {
    const Matrix centers = kmeans(residual, options.codebook_size, options.lloyd_iterations, rng);
    cb.vectors.insert(cb.vectors.end(), centers.data(), centers.data() + centers.size());
    const std::vector<int> labels = assign(residual, centers);
    for (Eigen::Index i = 0; i < residual.rows(); ++i) {
      residual.row(i) -= centers.row(labels[static_cast<std::size_t>(i)]);
    }
  }
  return cb;
}

void validate(const Codegram& c, const RvqCodebooks& cb) {
  if (c.num_stages < 1 || c.num_stages > cb.num_stages) {
    throw Error(ErrorCode::kCorruptCodegram, "codegram has " + std::to_string(c.num_stages) +
                                                 " stages, codebooks have " +
                                                 std::to_string(cb.num_stages));
  }
  if (c.codes.size() != static_cast<std::size_t>(c.num_stages) * c.num_frames) {
    throw Error(ErrorCode::kCorruptCodegram, "codegram size does not match L x T");
  }
  if (c.num_samples > c.num_frames * static_cast<std::size_t>(cb.frame_len)) {
    throw Error(ErrorCode::kCorruptCodegram, "codegram sample count exceeds its frames");
  }
  for (std::size_t i = 0; i < c.codes.size(); ++i) {
    if (c.codes[i] < 0 || c.codes[i] >= cb.codebook_size) {
      throw Error(ErrorCode::kCorruptCodegram,
                  "code " + std::to_string(c.codes[i]) + " at position " + std::to_string(i) +
                      " outside [0, " + std::to_string(cb.codebook_size - 1) + "]");
    }
  }
}

Codegram encode(const Waveform& w, const RvqCodebooks& cb) {
  validate(w);
  if (w.sample_rate_hz != cb.sample_rate_hz) {
    throw Error(ErrorCode::kConfiguration, "waveform at " + std::to_string(w.sample_rate_hz) +
                                               " Hz, codebooks at " +
                                               std::to_string(cb.sample_rate_hz) + " Hz");
  }
  Codegram c;
  c.num_stages = cb.num_stages;
  c.num_frames = frames_for(w.size(), cb.frame_len);
  c.num_samples = w.size();
  c.codes.assign(static_cast<std::size_t>(c.num_stages) * c.num_frames, 0);

  Matrix residual = frame_matrix({w}, cb.frame_len);
  for (int stage = 0; stage < cb.num_stages; ++stage) {
    const Matrix centers = stage_matrix(cb, stage);
    const std::vector<int> labels = assign(residual, centers);
    for (std::size_t t = 0; t < c.num_frames; ++t) {
      c.at(stage, t) = labels[t];
      residual.row(static_cast<Eigen::Index>(t)) -= centers.row(labels[t]);
    }
  }
  return c;
}

LatentSequence reconstruct_latent(const Codegram& c, const RvqCodebooks& cb, int stages) {
  validate(c, cb);
  const int used = resolve_stages(stages, cb, c.num_stages);
  LatentSequence z;
  z.num_frames = c.num_frames;
  z.frame_len = cb.frame_len;
  z.values.assign(c.num_frames * static_cast<std::size_t>(cb.frame_len), 0.0);
  for (std::size_t t = 0; t < c.num_frames; ++t) {
    std::span<double> out = z.frame(t);
    for (int stage = 0; stage < used; ++stage) {
      const std::span<const double> v = cb.vector(stage, c.at(stage, t));
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i];
    }
  }
  return z;
}

Waveform latent_to_waveform(const LatentSequence& z, int sample_rate_hz, std::size_t num_samples) {
  if (z.values.size() != z.num_frames * static_cast<std::size_t>(z.frame_len)) {
    throw Error(ErrorCode::kShape, "latent sequence size does not match T x frame_len");
  }
  for (double v : z.values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidValue, "non-finite latent value");
  }
  Waveform w;
  w.sample_rate_hz = sample_rate_hz;
  w.samples = z.values;
  if (num_samples > 0 && num_samples < w.samples.size()) w.samples.resize(num_samples);
  return w;
}

Waveform decode(const Codegram& c, const RvqCodebooks& cb, int stages) {
  return latent_to_waveform(reconstruct_latent(c, cb, stages), cb.sample_rate_hz, c.num_samples);
}

TokenSequence flatten(const Codegram& c) {
  TokenSequence out;
  out.reserve(c.codes.size());
  for (std::size_t t = 0; t < c.num_frames; ++t) {
    for (int stage = 0; stage < c.num_stages; ++stage) out.push_back(c.at(stage, t));
  }
  return out;
}

Codegram unflatten(std::span<const int> tokens, int num_stages) {
  if (num_stages < 1) throw Error(ErrorCode::kConfiguration, "unflatten needs L >= 1");
  if (tokens.size() % static_cast<std::size_t>(num_stages) != 0) {
    throw Error(ErrorCode::kCorruptSequence, "sequence length " + std::to_string(tokens.size()) +
                                                 " is not a multiple of L = " +
                                                 std::to_string(num_stages));
  }
  Codegram c;
  c.num_stages = num_stages;
  c.num_frames = tokens.size() / static_cast<std::size_t>(num_stages);
  c.codes.resize(tokens.size());
  for (std::size_t t = 0; t < c.num_frames; ++t) {
    for (int stage = 0; stage < num_stages; ++stage) {
      c.at(stage, t) = tokens[t * static_cast<std::size_t>(num_stages) +
                              static_cast<std::size_t>(stage)];
    }
  }
  return c;
}

}  // namespace rirkit

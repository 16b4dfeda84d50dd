#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rirkit/waveform.hpp"

namespace rirkit {

/// Residual-VQ codebooks: L stages of K vectors, each frame_len samples.
/// Code 0 of every stage is the zero vector, so adding a stage can never
/// increase a frame's residual.
struct RvqCodebooks {
  int num_stages = 4;
  int codebook_size = 256;
  int frame_len = 512;
  int sample_rate_hz = kDefaultSessionRateHz;
  std::vector<double> vectors;  // stage-major, then code, then sample
  std::uint64_t trained_on = 0;  // corpus fingerprint

  std::span<const double> vector(int stage, int code) const;
};

/// Throws kConfiguration on inconsistent shape and kInvalidValue on
/// non-finite entries.
void validate(const RvqCodebooks& cb);

struct RvqTrainOptions {
  int num_stages = 4;
  int codebook_size = 256;
  int frame_len = 512;
  int lloyd_iterations = 20;
  std::uint64_t seed = 0;
};

/// Frames a corpus of the given waveforms produces (each zero-padded to a
/// whole number of frames).
std::size_t count_frames(const std::vector<Waveform>& corpus, int frame_len);

/// Stage-wise k-means (k-means++ seeding, Lloyd iterations) on the corpus
/// frames, then on each stage's residuals. Codevectors are stored at float32
/// precision so a saved codebook reloads bit-identically. Needs at least
/// 10 * codebook_size frames; all waveforms must share one sample rate.
RvqCodebooks train_rvq(const std::vector<Waveform>& corpus, const RvqTrainOptions& options = {});

/// FNV-1a over sample rates, lengths and samples.
std::uint64_t corpus_fingerprint(const std::vector<Waveform>& corpus);

/// L x T code matrix, stage-major. num_samples is the unpadded length of the
/// encoded waveform.
struct Codegram {
  int num_stages = 0;
  std::size_t num_frames = 0;
  std::vector<int> codes;
  std::size_t num_samples = 0;

  int at(int stage, std::size_t frame) const {
    return codes[static_cast<std::size_t>(stage) * num_frames + frame];
  }
  int& at(int stage, std::size_t frame) {
    return codes[static_cast<std::size_t>(stage) * num_frames + frame];
  }
};

/// Throws kCorruptCodegram unless the shape matches and every code is in
/// [0, K-1] for `cb`.
void validate(const Codegram& c, const RvqCodebooks& cb);

/// Per-frame summed codevectors, T x frame_len.
struct LatentSequence {
  std::size_t num_frames = 0;
  int frame_len = 0;
  std::vector<double> values;

  std::span<const double> frame(std::size_t t) const {
    return std::span<const double>(values).subspan(t * static_cast<std::size_t>(frame_len),
                                                   static_cast<std::size_t>(frame_len));
  }
  std::span<double> frame(std::size_t t) {
    return std::span<double>(values).subspan(t * static_cast<std::size_t>(frame_len),
                                             static_cast<std::size_t>(frame_len));
  }
};

std::size_t frames_for(std::size_t num_samples, int frame_len) noexcept;

/// Nearest codevector per stage on the running residual. Throws
/// kConfiguration when the waveform's sample rate differs from the
/// codebooks'.
Codegram encode(const Waveform& w, const RvqCodebooks& cb);

/// Uses the first `stages` stages (all when negative). The output is
/// truncated to c.num_samples when that is set.
Waveform decode(const Codegram& c, const RvqCodebooks& cb, int stages = -1);

LatentSequence reconstruct_latent(const Codegram& c, const RvqCodebooks& cb, int stages = -1);

/// Concatenates latent frames into a waveform of `num_samples` samples
/// (the full frame span when zero).
Waveform latent_to_waveform(const LatentSequence& z, int sample_rate_hz,
                            std::size_t num_samples = 0);

/// Frame-major flattening: frame 0 stages 0..L-1, then frame 1, and so on.
using TokenSequence = std::vector<int>;
TokenSequence flatten(const Codegram& c);

/// Throws kCorruptSequence when the length is not a multiple of L.
Codegram unflatten(std::span<const int> tokens, int num_stages);

// Binary formats. Codebooks: "RVQ1", L, K, frame_len, sample_rate as
// little-endian uint32, then L*K*frame_len little-endian float32. Raw
// codegrams: "RVQC", L, T, num_samples as uint32, then L*T uint16 codes,
// stage-major. Loaders throw kIo for unreadable or malformed files (bad
// magic, truncation) and kCorruptCodegram for out-of-range codes.
void save_codebooks(const RvqCodebooks& cb, const std::filesystem::path& path);
RvqCodebooks load_codebooks(const std::filesystem::path& path);
void save_codegram_raw(const Codegram& c, const std::filesystem::path& path);
Codegram load_codegram_raw(const std::filesystem::path& path);
std::string codegram_to_json(const Codegram& c);
Codegram codegram_from_json(const std::string& text);

}  // namespace rirkit

#pragma once

#include <cstddef>
#include <vector>

#include "rirkit/codec.hpp"
#include "rirkit/guidance.hpp"
#include "rirkit/models.hpp"
#include "rirkit/params.hpp"

namespace rirkit {

/// What classifier guidance needs besides the AR model: the codec to turn
/// a partial token sequence into a waveform and the classifier reading it.
/// cg_candidates limits classifier evaluation to the AR model's best
/// candidates (0 evaluates all K); the others are excluded from sampling.
struct CgContext {
  const RvqCodebooks* codebooks = nullptr;
  const ClassifierModel* classifier = nullptr;
  int cg_candidates = 0;
};

/// Autoregressive decoding of `length` tokens. CFG mode queries the model
/// with and without the condition and combines with cfg_combine; CG mode
/// fuses the unconditional AR scores with classifier log-probabilities of
/// the condition's classes, evaluated on the decoded partial codegram with
/// each candidate appended (the unfinished frame padded with code 0, the
/// zero codevector). A null condition generates unconditionally.
TokenSequence ar_generate(const ArModel& model, const QuantizedParams* condition,
                          const GuidanceConfig& cfg, std::size_t length, Rng& rng,
                          const CgContext* cg = nullptr);

struct MaskSchedule {
  int total_steps = 20;
};

/// Masked frame counts m_0 = T, m_1, ..., m_S = 0 with
/// m_s = min(ceil(T cos(pi s / 2S)), m_{s-1} - 1). Throws kConfiguration
/// when S < 1 or S > T, where the count cannot fall strictly to zero.
std::vector<std::size_t> masked_counts(std::size_t num_frames, const MaskSchedule& schedule);

struct MaskgitOptions {
  MaskSchedule schedule;
  double cfg_weight = 0.0;
  double temperature = 1.0;
};

/// MaskGIT decoding with frame-level masks. Every step samples all masked
/// frames, commits the most confident ones (confidence = product of the
/// stages' post-temperature probabilities, ties to the lower frame) and
/// re-masks the rest; committed frames are never revisited.
Codegram maskgit_generate(const MaskedModel& model, const QuantizedParams* condition,
                          int num_stages, std::size_t num_frames, const MaskgitOptions& options,
                          Rng& rng);

/// Standard normal draw via Box-Muller on uniform01, identical on every
/// platform.
double standard_normal(Rng& rng) noexcept;

LatentSequence gaussian_latent(std::size_t num_frames, int frame_len, Rng& rng);

/// Euler integration of dx/dt = v(x, t) from t = 0 to 1 in `steps` equal
/// steps. With a condition and cfg_weight > 0 the velocity is
/// (1 + w) v_cond - w v_uncond. Throws kDivergence on a non-finite
/// velocity.
LatentSequence euler_sample(const VelocityModel& model, LatentSequence x0,
                            const QuantizedParams* condition, int steps, double cfg_weight = 0.0);

}  // namespace rirkit

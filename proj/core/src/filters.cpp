#include "rirkit/filters.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "rirkit/error.hpp"

#if defined(__SSE2__)
#include <xmmintrin.h>
#endif

namespace rirkit {
namespace {

class FlushDenormals {
 public:
#if defined(__SSE2__)
  FlushDenormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040); }
  ~FlushDenormals() { _mm_setcsr(saved_); }

 private:
  unsigned saved_;
#endif
};

using cplx = std::complex<double>;

// Left-half-plane poles of the normalized analog Butterworth prototype.
std::vector<cplx> butterworth_prototype(int order) {
  std::vector<cplx> poles;
  poles.reserve(order);
  for (int k = 0; k < order; ++k) {
    const double theta = std::numbers::pi * (2.0 * k + order + 1) / (2.0 * order);
    poles.push_back(std::polar(1.0, theta));
  }
  return poles;
}

cplx bilinear(cplx s, double fs2) { return (fs2 + s) / (fs2 - s); }

cplx evaluate(const SosFilter& f, double omega) {
  const cplx z1 = std::polar(1.0, -omega);
  const cplx z2 = z1 * z1;
  cplx h = 1.0;
  for (const auto& s : f.sections()) {
    h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
  }
  return h;
}

// Groups digital poles into real-coefficient sections: conjugate pairs first,
// then leftover real poles paired two at a time.
std::vector<std::pair<cplx, cplx>> pair_poles(const std::vector<cplx>& poles) {
  std::vector<std::pair<cplx, cplx>> pairs;
  std::vector<double> reals;
  for (const cplx& p : poles) {
    if (std::abs(p.imag()) < 1e-12) {
      reals.push_back(p.real());
    } else if (p.imag() > 0.0) {
      pairs.emplace_back(p, std::conj(p));
    }
  }
  std::sort(reals.begin(), reals.end());
  for (std::size_t i = 0; i < reals.size(); i += 2) {
    const double second = i + 1 < reals.size() ? reals[i + 1] : 0.0;
    pairs.emplace_back(cplx(reals[i], 0.0), cplx(second, 0.0));
  }
  return pairs;
}

}  // namespace

void SosFilter::process(std::span<double> x) const {
  // Decaying tails drive the state into subnormals, which are very slow.
  const FlushDenormals guard;
  for (const auto& s : sections_) {
    double z1 = 0.0;
    double z2 = 0.0;
    for (double& v : x) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
}

void SosFilter::scale(double gain) {
  if (sections_.empty()) return;
  sections_.front().b0 *= gain;
  sections_.front().b1 *= gain;
  sections_.front().b2 *= gain;
}

SosFilter butterworth_bandpass(int prototype_order, double f_lo_hz, double f_hi_hz,
                               double sample_rate_hz) {
  if (prototype_order < 1 || !(f_lo_hz > 0.0) || !(f_hi_hz > f_lo_hz) ||
      !(f_hi_hz < sample_rate_hz / 2.0)) {
    throw Error(ErrorCode::kConfiguration, "invalid band-pass edges " + std::to_string(f_lo_hz) +
                                               " - " + std::to_string(f_hi_hz) + " Hz");
  }
  const double fs2 = 2.0 * sample_rate_hz;
  const double w_lo = fs2 * std::tan(std::numbers::pi * f_lo_hz / sample_rate_hz);
  const double w_hi = fs2 * std::tan(std::numbers::pi * f_hi_hz / sample_rate_hz);
  const double w0_sq = w_lo * w_hi;
  const double bw = w_hi - w_lo;

  std::vector<cplx> digital;
  for (const cplx& p : butterworth_prototype(prototype_order)) {
    const cplx pb = p * bw;
    const cplx disc = std::sqrt(pb * pb - 4.0 * w0_sq);
    digital.push_back(bilinear((pb + disc) / 2.0, fs2));
    digital.push_back(bilinear((pb - disc) / 2.0, fs2));
  }

  // Each section carries one zero at z = 1 and one at z = -1.
  std::vector<Biquad> sections;
  for (const auto& [p, q] : pair_poles(digital)) {
    Biquad s;
    s.b0 = 1.0;
    s.b1 = 0.0;
    s.b2 = -1.0;
    s.a1 = -(p + q).real();
    s.a2 = (p * q).real();
    sections.push_back(s);
  }
  SosFilter filter(std::move(sections));
  const double omega0 = 2.0 * std::atan(std::sqrt(w0_sq) / fs2);
  filter.scale(1.0 / std::abs(evaluate(filter, omega0)));
  return filter;
}

SosFilter butterworth_lowpass(int order, double cutoff_hz, double sample_rate_hz) {
  if (order < 1 || !(cutoff_hz > 0.0) || !(cutoff_hz < sample_rate_hz / 2.0)) {
    throw Error(ErrorCode::kConfiguration,
                "invalid low-pass cutoff " + std::to_string(cutoff_hz) + " Hz");
  }
  const double fs2 = 2.0 * sample_rate_hz;
  const double wc = fs2 * std::tan(std::numbers::pi * cutoff_hz / sample_rate_hz);
  std::vector<cplx> digital;
  for (const cplx& p : butterworth_prototype(order)) digital.push_back(bilinear(p * wc, fs2));

  std::vector<Biquad> sections;
  for (const auto& [p, q] : pair_poles(digital)) {
    Biquad s;
    if (q == cplx(0.0, 0.0) && std::abs(p.imag()) < 1e-12) {
      // First-order leftover: (1 + z^-1) / (1 - p z^-1).
      s.b0 = 1.0;
      s.b1 = 1.0;
      s.b2 = 0.0;
      s.a1 = -p.real();
      s.a2 = 0.0;
    } else {
      s.b0 = 1.0;
      s.b1 = 2.0;
      s.b2 = 1.0;
      s.a1 = -(p + q).real();
      s.a2 = (p * q).real();
    }
    sections.push_back(s);
  }
  SosFilter filter(std::move(sections));
  filter.scale(1.0 / std::abs(evaluate(filter, 0.0)));
  return filter;
}

std::vector<double> filtfilt(const SosFilter& filter, std::span<const double> x, std::size_t pad) {
  std::vector<double> buf(x.size() + 2 * pad, 0.0);
  std::copy(x.begin(), x.end(), buf.begin() + static_cast<std::ptrdiff_t>(pad));
  filter.process(buf);
  std::reverse(buf.begin(), buf.end());
  filter.process(buf);
  std::reverse(buf.begin(), buf.end());
  return {buf.begin() + static_cast<std::ptrdiff_t>(pad),
          buf.begin() + static_cast<std::ptrdiff_t>(pad + x.size())};
}

SosFilter octave_band_filter(double center_hz, int sample_rate_hz) {
  const double nyquist = sample_rate_hz / 2.0;
  if (!(center_hz > 0.0) || center_hz >= nyquist) {
    throw Error(ErrorCode::kConfiguration, "band " + std::to_string(center_hz) +
                                               " Hz is not below Nyquist (" +
                                               std::to_string(nyquist) + " Hz)");
  }
  const double lo = center_hz / std::numbers::sqrt2;
  const double hi = std::min(center_hz * std::numbers::sqrt2, 0.49 * sample_rate_hz);
  return butterworth_bandpass(2, lo, hi, sample_rate_hz);
}

std::size_t octave_band_padding(double center_hz, int sample_rate_hz) {
  const double lo = center_hz / std::numbers::sqrt2;
  return static_cast<std::size_t>(std::ceil(8.0 * sample_rate_hz / lo));
}

std::vector<Waveform> bandpass_filterbank(const Waveform& w, const BandSet& bands) {
  for (std::size_t i = 1; i < bands.centers_hz.size(); ++i) {
    if (!(bands.centers_hz[i] > bands.centers_hz[i - 1])) {
      throw Error(ErrorCode::kConfiguration, "band centers must be strictly increasing");
    }
  }
  std::vector<SosFilter> filters;
  filters.reserve(bands.centers_hz.size());
  for (double c : bands.centers_hz) filters.push_back(octave_band_filter(c, w.sample_rate_hz));

  std::vector<Waveform> out;
  out.reserve(filters.size());
  for (std::size_t b = 0; b < filters.size(); ++b) {
    const std::size_t pad = octave_band_padding(bands.centers_hz[b], w.sample_rate_hz);
    out.push_back(Waveform{filtfilt(filters[b], w.samples, pad), w.sample_rate_hz});
  }
  return out;
}

}  // namespace rirkit

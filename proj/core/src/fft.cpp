#include "rirkit/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>

#include "rirkit/error.hpp"

namespace rirkit {
namespace {

// The FFTW planner is not re-entrant; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1)));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

class Plan {
 public:
  explicit Plan(fftw_plan p) : plan_(p) {}
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

}  // namespace

std::size_t next_fast_fft_size(std::size_t n) noexcept {
  if (n <= 1) return 1;
  for (std::size_t m = n;; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u, 7u}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

std::vector<std::complex<double>> rfft(std::span<const double> x, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::kConfiguration, "rfft size must be positive");
  auto in = fftw_buffer<double>(n);
  auto out = fftw_buffer<fftw_complex>(n / 2 + 1);
  const std::size_t copied = std::min(n, x.size());
  std::copy_n(x.begin(), copied, in.get());
  std::fill(in.get() + copied, in.get() + n, 0.0);

  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(
        fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  }
  plan->execute();

  std::vector<std::complex<double>> result(n / 2 + 1);
  for (std::size_t k = 0; k < result.size(); ++k) result[k] = {out[k][0], out[k][1]};
  return result;
}

std::vector<double> irfft(std::span<const std::complex<double>> spectrum, std::size_t n) {
  if (spectrum.size() != n / 2 + 1) {
    throw Error(ErrorCode::kShape, "irfft expects n/2 + 1 spectral bins");
  }
  auto in = fftw_buffer<fftw_complex>(n / 2 + 1);
  auto out = fftw_buffer<double>(n);
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    in[k][0] = spectrum[k].real();
    in[k][1] = spectrum[k].imag();
  }
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(
        fftw_plan_dft_c2r_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  }
  plan->execute();

  std::vector<double> result(out.get(), out.get() + n);
  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : result) v *= scale;
  return result;
}

std::vector<double> fft_convolve(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out_len = a.size() + b.size() - 1;
  const std::size_t n = next_fast_fft_size(out_len);
  auto fa = rfft(a, n);
  const auto fb = rfft(b, n);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  auto y = irfft(fa, n);
  y.resize(out_len);
  return y;
}

}  // namespace rirkit

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace rirkit {

/// Smallest n' >= n whose only prime factors are 2, 3, 5 and 7.
std::size_t next_fast_fft_size(std::size_t n) noexcept;

/// Real-to-complex DFT of `x` zero-padded (or truncated) to `n` points.
/// Returns n/2 + 1 bins, unnormalized.
std::vector<std::complex<double>> rfft(std::span<const double> x, std::size_t n);

/// Inverse of rfft for an `n`-point transform, scaled by 1/n.
std::vector<double> irfft(std::span<const std::complex<double>> spectrum, std::size_t n);

/// Full linear convolution (length a + b - 1).
std::vector<double> fft_convolve(std::span<const double> a, std::span<const double> b);

}  // namespace rirkit

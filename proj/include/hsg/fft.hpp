#pragma once

#include <complex>
#include <vector>

namespace hsg::fft {

// In-place 2D complex DFT on an n x n row-major array.
//   sign = -1: X(k) = sum_j x(j) exp(-2*pi*i k.j / n)   (no normalization)
//   sign = +1: X(j) = sum_k x(k) exp(+2*pi*i k.j / n)
// Plans are cached per (n, sign); safe to call from multiple threads.
void dft2d(std::complex<double>* data, int n, int sign);

// In-place 1D complex DFT of length n (same conventions).
void dft1d(std::complex<double>* data, int n, int sign);

} // namespace hsg::fft

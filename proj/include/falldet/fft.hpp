#pragma once

#include <complex>
#include <span>
#include <vector>

namespace falldet {

// Exact-N discrete Fourier transform of a real sequence:
//   X[k] = sum_j x[j] * exp(-2*pi*i*j*k/N), k = 0..N-1.
// Power-of-two lengths run on an iterative radix-2 kernel; every other
// length goes through Bluestein's chirp-z, so N = 51 is a genuine
// length-51 transform, not a zero-padded one.
std::vector<std::complex<double>> dft(std::span<const double> x);

// Forward/inverse transform of a complex sequence, same conventions
// (inverse carries the 1/N factor).
std::vector<std::complex<double>> fft(std::vector<std::complex<double>> x);
std::vector<std::complex<double>> ifft(std::vector<std::complex<double>> x);

// Inverse transform of a spectrum known to come from real input;
// returns the real parts.
std::vector<double> idft_real(std::span<const std::complex<double>> spectrum);

}  // namespace falldet

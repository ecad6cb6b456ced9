#include "falldet/fft.hpp"

#include <cmath>
#include <cstdint>

#include "falldet/error.hpp"

namespace falldet {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// In-place iterative radix-2 Cooley-Tukey. n must be a power of two.
void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n <= 1) return;

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? kTwoPi : -kTwoPi) / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

// Bluestein chirp-z for arbitrary n. The chirp exponent j^2 is reduced
// mod 2n before the trig call to keep angles small.
std::vector<std::complex<double>> fft_bluestein(
    const std::vector<std::complex<double>>& x, bool inverse) {
  const std::size_t n = x.size();
  const double sign = inverse ? 1.0 : -1.0;

  std::vector<std::complex<double>> chirp(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::uint64_t j2 = (static_cast<std::uint64_t>(j) * j) %
                             (2 * static_cast<std::uint64_t>(n));
    const double ang = sign * kTwoPi * 0.5 * static_cast<double>(j2) /
                       static_cast<double>(n);
    chirp[j] = {std::cos(ang), std::sin(ang)};
  }

  const std::size_t m = next_pow2(2 * n - 1);
  std::vector<std::complex<double>> a(m), b(m);
  for (std::size_t j = 0; j < n; ++j) a[j] = x[j] * chirp[j];
  b[0] = std::conj(chirp[0]);
  for (std::size_t j = 1; j < n; ++j)
    b[j] = b[m - j] = std::conj(chirp[j]);

  fft_pow2(a, false);
  fft_pow2(b, false);
  for (std::size_t j = 0; j < m; ++j) a[j] *= b[j];
  fft_pow2(a, true);

  std::vector<std::complex<double>> out(n);
  const double inv_m = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * inv_m * chirp[k];
  return out;
}

std::vector<std::complex<double>> transform(
    std::vector<std::complex<double>> x, bool inverse) {
  if (x.empty()) raise_data("EmptyInput", "transform of empty sequence");
  if (is_pow2(x.size())) {
    fft_pow2(x, inverse);
  } else {
    x = fft_bluestein(x, inverse);
  }
  if (inverse) {
    const double inv_n = 1.0 / static_cast<double>(x.size());
    for (auto& v : x) v *= inv_n;
  }
  return x;
}

}  // namespace

std::vector<std::complex<double>> fft(std::vector<std::complex<double>> x) {
  return transform(std::move(x), false);
}

std::vector<std::complex<double>> ifft(std::vector<std::complex<double>> x) {
  return transform(std::move(x), true);
}

std::vector<std::complex<double>> dft(std::span<const double> x) {
  std::vector<std::complex<double>> in(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) in[i] = {x[i], 0.0};
  return transform(std::move(in), false);
}

std::vector<double> idft_real(std::span<const std::complex<double>> spectrum) {
  std::vector<std::complex<double>> in(spectrum.begin(), spectrum.end());
  const auto out = transform(std::move(in), true);
  std::vector<double> re(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) re[i] = out[i].real();
  return re;
}

}  // namespace falldet

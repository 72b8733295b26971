#include "core/fft.hpp"

#include <cmath>

#include "core/types.hpp"

namespace dislocate {

void fft(std::vector<std::complex<double>>& data) {
  const std::size_t n = data.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw InvalidArgument("fft size must be a power of two");
  }
  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -kTwoPi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = data[i + k];
        const std::complex<double> v = data[i + k + len / 2] * w;
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

FourierCoeffs fourier_coeffs(const std::vector<double>& samples, int kmax) {
  const std::size_t n = samples.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw InvalidArgument("fourier_coeffs wants a power-of-two sample count");
  }
  if (kmax >= static_cast<int>(n) / 2) {
    throw InvalidArgument("fourier_coeffs: kmax must be below n/2");
  }
  std::vector<std::complex<double>> buf(n);
  for (std::size_t j = 0; j < n; ++j) buf[j] = samples[j];
  fft(buf);

  FourierCoeffs out;
  out.cos_c.assign(kmax + 1, 0.0);
  out.sin_c.assign(kmax + 1, 0.0);
  const double inv_n = 1.0 / static_cast<double>(n);
  // Undo the half-sample stagger: c_k = e^{-i k h / 2} / n * FFT_k.
  for (int k = 0; k <= kmax; ++k) {
    const double shift = -kPi * k * inv_n;  // -k * (2 pi / n) / 2
    const std::complex<double> tw(std::cos(shift), std::sin(shift));
    const std::complex<double> ck = buf[k] * tw * inv_n;
    if (k == 0) {
      out.cos_c[0] = ck.real();
    } else {
      out.cos_c[k] = 2.0 * ck.real();
      out.sin_c[k] = -2.0 * ck.imag();
    }
  }
  return out;
}

}  // namespace dislocate

#pragma once

#include <complex>
#include <vector>

namespace dislocate {

// In-place radix-2 complex FFT; data.size() must be a power of two.
void fft(std::vector<std::complex<double>>& data);

// Fourier coefficients of a real 2*pi-periodic function sampled at the
// staggered nodes phi_j = (j + 1/2) * 2*pi / n (the stagger keeps samples off
// datum jump points). Returns cos/sin coefficients for modes 0..kmax:
//   f(phi) ~ cos_c[0] + sum_k ( cos_c[k] cos(k phi) + sin_c[k] sin(k phi) ).
struct FourierCoeffs {
  std::vector<double> cos_c;
  std::vector<double> sin_c;
};
FourierCoeffs fourier_coeffs(const std::vector<double>& samples, int kmax);

}  // namespace dislocate

#pragma once

#include <complex>
#include <vector>

namespace tmse::fft {

using cplx = std::complex<double>;

// In-place DFT of arbitrary length: radix-2 for powers of two, Bluestein
// otherwise (needed for the 510-point analysis used throughout).
void dft(std::vector<cplx>& a, bool inverse);

// One-sided real DFT: n real samples -> n/2+1 bins (n must be even).
std::vector<cplx> rdft_onesided(const double* x, int n);

// Inverse of rdft_onesided: n/2+1 bins -> n real samples.
std::vector<double> irdft_onesided(const cplx* bins, int n);

// Adjoint of the linear map rdft_onesided (as a map over (re, im) pairs of
// the one-sided bins). Used by reverse-mode gradients of spectral ops.
//   forward:  bins = rdft(x)         adjoint:  g_x = rdft^T(g_bins)
//   forward:  x = irdft(bins)        adjoint:  g_bins = irdft^T(g_x)
std::vector<double> rdft_onesided_adjoint(const cplx* g_bins, int n);
std::vector<cplx> irdft_onesided_adjoint(const double* g_x, int n);

}  // namespace tmse::fft

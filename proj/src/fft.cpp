#include "tmse/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace tmse::fft {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_pow2(size_t n) { return n && (n & (n - 1)) == 0; }

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Iterative Cooley-Tukey, n a power of two.
void fft_pow2(std::vector<cplx>& a, bool inverse) {
  const size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    double ang = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    cplx wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      cplx w(1.0, 0.0);
      for (size_t j = 0; j < len / 2; ++j) {
        cplx u = a[i + j];
        cplx v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse) {
    for (auto& x : a) x /= static_cast<double>(n);
  }
}

// Bluestein chirp-z: arbitrary n via a power-of-two convolution.
void fft_bluestein(std::vector<cplx>& a, bool inverse) {
  const size_t n = a.size();
  const size_t m = next_pow2(2 * n - 1);
  const double sign = inverse ? 1.0 : -1.0;

  // chirp[k] = exp(sign * i*pi*k^2/n); k^2 taken mod 2n to keep the angle exact
  std::vector<cplx> chirp(n);
  for (size_t k = 0; k < n; ++k) {
    size_t k2 = (k * k) % (2 * n);
    double ang = sign * kPi * static_cast<double>(k2) / static_cast<double>(n);
    chirp[k] = cplx(std::cos(ang), std::sin(ang));
  }

  std::vector<cplx> u(m, cplx(0, 0)), v(m, cplx(0, 0));
  for (size_t k = 0; k < n; ++k) u[k] = a[k] * chirp[k];
  v[0] = std::conj(chirp[0]);
  for (size_t k = 1; k < n; ++k) v[k] = v[m - k] = std::conj(chirp[k]);

  fft_pow2(u, false);
  fft_pow2(v, false);
  for (size_t k = 0; k < m; ++k) u[k] *= v[k];
  fft_pow2(u, true);

  for (size_t k = 0; k < n; ++k) a[k] = u[k] * chirp[k];
  if (inverse) {
    for (auto& x : a) x /= static_cast<double>(n);
  }
}

}  // namespace

void dft(std::vector<cplx>& a, bool inverse) {
  if (a.empty()) return;
  if (is_pow2(a.size()))
    fft_pow2(a, inverse);
  else
    fft_bluestein(a, inverse);
}

std::vector<cplx> rdft_onesided(const double* x, int n) {
  if (n <= 0 || (n & 1)) throw std::invalid_argument("rdft_onesided: n must be positive even");
  std::vector<cplx> a(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) a[static_cast<size_t>(i)] = cplx(x[i], 0.0);
  dft(a, false);
  a.resize(static_cast<size_t>(n / 2 + 1));
  return a;
}

std::vector<double> irdft_onesided(const cplx* bins, int n) {
  if (n <= 0 || (n & 1)) throw std::invalid_argument("irdft_onesided: n must be positive even");
  const int f = n / 2 + 1;
  std::vector<cplx> a(static_cast<size_t>(n));
  for (int j = 0; j < f; ++j) a[static_cast<size_t>(j)] = bins[j];
  for (int j = 1; j < f - 1; ++j) a[static_cast<size_t>(n - j)] = std::conj(bins[j]);
  dft(a, true);
  std::vector<double> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = a[static_cast<size_t>(i)].real();
  return out;
}

// x[i] = (1/n) sum_j c_j (re_j cos(2pi j i/n) - im_j sin(2pi j i/n)),
// c_0 = c_{F-1} = 1, otherwise 2 (even n). The adjoint maps g_x back onto
// the bins with the same weights, computable from a forward DFT of g_x.
std::vector<cplx> irdft_onesided_adjoint(const double* g_x, int n) {
  if (n <= 0 || (n & 1)) throw std::invalid_argument("irdft_onesided_adjoint: n must be even");
  const int f = n / 2 + 1;
  std::vector<cplx> a(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) a[static_cast<size_t>(i)] = cplx(g_x[i], 0.0);
  dft(a, false);  // G_j = sum_i g_i cos - i * sum_i g_i sin
  std::vector<cplx> g(static_cast<size_t>(f));
  for (int j = 0; j < f; ++j) {
    double c = (j == 0 || j == f - 1) ? 1.0 : 2.0;
    double gre = c / n * a[static_cast<size_t>(j)].real();
    double gim = (j == 0 || j == f - 1) ? 0.0 : (2.0 / n) * a[static_cast<size_t>(j)].imag();
    g[static_cast<size_t>(j)] = cplx(gre, gim);
  }
  return g;
}

// re_j = sum_i x_i cos(2pi j i/n), im_j = -sum_i x_i sin(2pi j i/n).
// Adjoint: g_x[i] = sum_j (g_re_j cos(2pi j i/n) - g_im_j sin(2pi j i/n)),
// a one-sided synthesis without conjugate-symmetry doubling or 1/n.
std::vector<double> rdft_onesided_adjoint(const cplx* g_bins, int n) {
  if (n <= 0 || (n & 1)) throw std::invalid_argument("rdft_onesided_adjoint: n must be even");
  const int f = n / 2 + 1;
  std::vector<cplx> a(static_cast<size_t>(n), cplx(0, 0));
  for (int j = 0; j < f; ++j) a[static_cast<size_t>(j)] = g_bins[j];
  dft(a, true);  // (1/n) sum over full spectrum; we fed one side only
  std::vector<double> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    // inverse DFT of the one-sided-only load gives (1/n)*sum_j g_j e^{i2pi ji/n};
    // real part times n is exactly the adjoint sum
    out[static_cast<size_t>(i)] = a[static_cast<size_t>(i)].real() * n;
  }
  return out;
}

}  // namespace tmse::fft

#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "tmse/fft.hpp"
#include "tmse/rng.hpp"

using tmse::Pcg32;
using tmse::fft::cplx;

namespace {

// brute-force DFT oracle
std::vector<cplx> naive_dft(const std::vector<cplx>& x, bool inverse) {
  const size_t n = x.size();
  const double sign = inverse ? 1.0 : -1.0;
  std::vector<cplx> out(n);
  for (size_t k = 0; k < n; ++k) {
    cplx s(0, 0);
    for (size_t j = 0; j < n; ++j) {
      const double a = sign * 2.0 * M_PI * static_cast<double>(k * j % n) / static_cast<double>(n);
      s += x[j] * cplx(std::cos(a), std::sin(a));
    }
    out[k] = inverse ? s / static_cast<double>(n) : s;
  }
  return out;
}

std::vector<cplx> random_signal(size_t n, Pcg32& rng) {
  std::vector<cplx> x(n);
  for (auto& v : x) v = cplx(rng.next_normal(), rng.next_normal());
  return x;
}

}  // namespace

TEST_CASE("dft matches the naive DFT oracle for mixed sizes") {
  Pcg32 rng(42, 0);
  for (size_t n : {2u, 8u, 16u, 17u, 30u, 64u, 255u, 510u}) {
    std::vector<cplx> x = random_signal(n, rng);
    std::vector<cplx> want = naive_dft(x, false);
    std::vector<cplx> got = x;
    tmse::fft::dft(got, false);
    double scale = 0;
    for (auto& w : want) scale = std::max(scale, std::abs(w));
    for (size_t i = 0; i < n; ++i) CHECK(std::abs(got[i] - want[i]) < 1e-9 * (1.0 + scale));
  }
}

TEST_CASE("dft inverse round trip") {
  Pcg32 rng(7, 1);
  for (size_t n : {12u, 510u, 1024u}) {
    std::vector<cplx> x = random_signal(n, rng);
    std::vector<cplx> y = x;
    tmse::fft::dft(y, false);
    tmse::fft::dft(y, true);
    for (size_t i = 0; i < n; ++i) CHECK(std::abs(y[i] - x[i]) < 1e-10);
  }
}

TEST_CASE("rdft/irdft one-sided round trip (510 and 512)") {
  Pcg32 rng(11, 2);
  for (int n : {32, 510, 512}) {
    std::vector<double> x(static_cast<size_t>(n));
    for (auto& v : x) v = rng.next_normal();
    auto bins = tmse::fft::rdft_onesided(x.data(), n);
    CHECK(bins.size() == static_cast<size_t>(n / 2 + 1));
    auto back = tmse::fft::irdft_onesided(bins.data(), n);
    for (int i = 0; i < n; ++i) CHECK(back[static_cast<size_t>(i)] == doctest::Approx(x[static_cast<size_t>(i)]).epsilon(1e-10));
  }
}

// adjoint correctness: <L x, y> == <x, L^T y> over the real coordinates
TEST_CASE("rdft and irdft adjoints pass the dot-product test") {
  Pcg32 rng(13, 3);
  for (int n : {32, 510}) {
    const int f = n / 2 + 1;

    // L = rdft_onesided : R^n -> R^{2f}
    std::vector<double> x(static_cast<size_t>(n));
    for (auto& v : x) v = rng.next_normal();
    std::vector<cplx> y(static_cast<size_t>(f));
    for (auto& v : y) v = cplx(rng.next_normal(), rng.next_normal());

    auto lx = tmse::fft::rdft_onesided(x.data(), n);
    double lhs = 0;
    for (int j = 0; j < f; ++j)
      lhs += lx[static_cast<size_t>(j)].real() * y[static_cast<size_t>(j)].real() +
             lx[static_cast<size_t>(j)].imag() * y[static_cast<size_t>(j)].imag();
    auto lty = tmse::fft::rdft_onesided_adjoint(y.data(), n);
    double rhs = 0;
    for (int i = 0; i < n; ++i) rhs += x[static_cast<size_t>(i)] * lty[static_cast<size_t>(i)];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));

    // M = irdft_onesided : R^{2f} -> R^n
    std::vector<cplx> b(static_cast<size_t>(f));
    for (auto& v : b) v = cplx(rng.next_normal(), rng.next_normal());
    std::vector<double> g(static_cast<size_t>(n));
    for (auto& v : g) v = rng.next_normal();

    auto mb = tmse::fft::irdft_onesided(b.data(), n);
    double lhs2 = 0;
    for (int i = 0; i < n; ++i) lhs2 += mb[static_cast<size_t>(i)] * g[static_cast<size_t>(i)];
    auto mtg = tmse::fft::irdft_onesided_adjoint(g.data(), n);
    double rhs2 = 0;
    for (int j = 0; j < f; ++j)
      rhs2 += b[static_cast<size_t>(j)].real() * mtg[static_cast<size_t>(j)].real() +
              b[static_cast<size_t>(j)].imag() * mtg[static_cast<size_t>(j)].imag();
    CHECK(lhs2 == doctest::Approx(rhs2).epsilon(1e-10));
  }
}

#include <doctest.h>

#include <cmath>
#include <random>
#include <tuple>
#include <vector>

#include "tfsieve/kernels.hpp"

using namespace tfsieve;

namespace {

std::vector<cplx> random_cplx(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<cplx> v(n);
  for (auto& x : v) x = cplx(nd(rng), nd(rng));
  return v;
}

std::vector<double> random_real(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// 97 samples at dt = 1/16, columns every 4 samples, frequencies every 1/4:
// 1 / (dt dxi) = 64 >= nxi, so the FFT path applies.
kernels::StftLayout layout() {
  kernels::StftLayout L;
  L.nt = 97;
  L.t0 = -3.0;
  L.dt = 1.0 / 16;
  L.nx = 25;
  for (int i = 0; i < L.nx; ++i) L.shift.push_back(4L * (i - 12));
  L.nxi = 33;
  L.xi0 = -4.0;
  L.dxi = 0.25;
  L.fft_len = 64;
  return L;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a[n] - b[n]));
  return m;
}

struct ThreadGuard {
  int saved = kernels::max_threads();
  ~ThreadGuard() { kernels::set_threads(saved); }
};

}  // namespace

TEST_CASE("stft kernels: parallel matches serial, FFT matches direct") {
  std::mt19937_64 rng(21);
  const auto L = layout();
  const auto f = random_cplx(L.nt, rng), g = random_cplx(L.nt, rng);
  const std::size_t n = static_cast<std::size_t>(L.nx) * L.nxi;
  std::vector<cplx> s(n), p(n), q(n);
  kernels::serial::stft_direct(L, f.data(), g.data(), s.data());
  kernels::parallel::stft_direct(L, f.data(), g.data(), p.data());
  kernels::parallel::stft_fft(L, f.data(), g.data(), q.data());
  CHECK(s == p);
  CHECK(max_diff(s, q) < 1e-12);
}

TEST_CASE("adjoint kernels: FFT matches direct") {
  std::mt19937_64 rng(22);
  const auto L = layout();
  const auto F = random_cplx(static_cast<std::size_t>(L.nx) * L.nxi, rng), g = random_cplx(L.nt, rng);
  std::vector<cplx> s(L.nt), q(L.nt);
  kernels::serial::adjoint_direct(L, F.data(), g.data(), 1.0 / 64, s.data());
  kernels::parallel::adjoint_fft(L, F.data(), g.data(), 1.0 / 64, q.data());
  CHECK(max_diff(s, q) < 1e-12);
}

TEST_CASE("correlation kernels: serial, parallel and FFT agree") {
  std::mt19937_64 rng(23);
  for (int half : {0, 1, 3, 9}) {
    const int n0 = 40, n1 = 31;
    const auto img = random_real(n0 * n1, rng);
    const auto st = random_real((2 * half + 1) * (2 * half + 1), rng);
    std::vector<double> s(n0 * n1), p(n0 * n1), f(n0 * n1), a(n0 * n1);
    kernels::serial::correlate_direct(img.data(), n0, n1, st.data(), half, s.data());
    kernels::parallel::correlate_direct(img.data(), n0, n1, st.data(), half, p.data());
    kernels::correlate_fft(img.data(), n0, n1, st.data(), half, f.data());
    kernels::correlate(img.data(), n0, n1, st.data(), half, a.data());
    CHECK(s == p);
    double worst = 0.0, auto_gap = 0.0;
    for (int k = 0; k < n0 * n1; ++k) {
      worst = std::max(worst, std::abs(s[k] - f[k]));
      auto_gap = std::max(auto_gap, std::abs(s[k] - a[k]));
    }
    CHECK(worst < 1e-10);
    CHECK(auto_gap < 1e-10);
  }
}

TEST_CASE("correlation: brute-force oracle with zero padding") {
  const int n0 = 5, n1 = 4, half = 1;
  std::vector<double> img(n0 * n1), st(9, 0.0), out(n0 * n1);
  for (int k = 0; k < n0 * n1; ++k) img[k] = k + 1;
  st[1 * 3 + 2] = 1.0;  // picks img(c0, c1 + 1)
  st[0] = 2.0;          // picks img(c0 - 1, c1 - 1)
  kernels::serial::correlate_direct(img.data(), n0, n1, st.data(), half, out.data());
  for (int c0 = 0; c0 < n0; ++c0)
    for (int c1 = 0; c1 < n1; ++c1) {
      double want = 0.0;
      if (c1 + 1 < n1) want += img[c0 * n1 + c1 + 1];
      if (c0 >= 1 && c1 >= 1) want += 2.0 * img[(c0 - 1) * n1 + c1 - 1];
      CHECK(out[c0 * n1 + c1] == want);
    }
}

TEST_CASE("gram kernels: parallel matches serial and a direct sum") {
  std::mt19937_64 rng(24);
  const std::size_t rows = 500;
  const int cols = 7;
  const auto A = random_cplx(rows * cols, rng);
  const auto w = random_real(rows, rng);
  std::vector<cplx> s(cols * cols), p(cols * cols);
  kernels::serial::gram(A.data(), rows, cols, w.data(), s.data());
  kernels::parallel::gram(A.data(), rows, cols, w.data(), p.data());
  CHECK(s == p);
  for (int a = 0; a < cols; ++a)
    for (int b = 0; b < cols; ++b) {
      cplx want = 0.0;
      for (std::size_t n = 0; n < rows; ++n) want += std::conj(A[a * rows + n]) * w[n] * A[b * rows + n];
      CHECK(std::abs(s[b * cols + a] - want) < 1e-10);
    }
}

TEST_CASE("results do not depend on the thread count") {
  ThreadGuard guard;
  std::mt19937_64 rng(25);
  const auto L = layout();
  const auto f = random_cplx(L.nt, rng), g = random_cplx(L.nt, rng);
  const auto img = random_real(60 * 60, rng), st = random_real(11 * 11, rng);
  const auto A = random_cplx(800 * 5, rng);
  const auto w = random_real(800, rng);
  auto run = [&] {
    std::vector<cplx> a(static_cast<std::size_t>(L.nx) * L.nxi), b(a.size()), c(25);
    std::vector<double> d(60 * 60);
    kernels::parallel::stft_direct(L, f.data(), g.data(), a.data());
    kernels::parallel::stft_fft(L, f.data(), g.data(), b.data());
    kernels::parallel::gram(A.data(), 800, 5, w.data(), c.data());
    kernels::parallel::correlate_direct(img.data(), 60, 60, st.data(), 5, d.data());
    return std::make_tuple(a, b, c, d);
  };
  kernels::set_threads(1);
  const auto one = run();
  kernels::set_threads(4);
  CHECK(kernels::max_threads() == 4);
  const auto four = run();
  CHECK(one == four);
}

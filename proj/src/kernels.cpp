#include "tfsieve/kernels.hpp"

#include <fftw3.h>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

namespace tfsieve::kernels {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex& plan_mutex() {
  static std::mutex mu;
  return mu;
}

fftw_plan dft_plan(int n, int sign) {
  static std::map<std::pair<int, int>, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = plans.find({n, sign});
  if (it != plans.end()) return it->second;
  fftw_complex* buf = fftw_alloc_complex(n);
  fftw_plan p = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE);
  fftw_free(buf);
  plans.emplace(std::make_pair(n, sign), p);
  return p;
}

struct Plan2d {
  fftw_plan forward;
  fftw_plan backward;
};

Plan2d r2c_plan(int p0, int p1) {
  static std::map<std::pair<int, int>, Plan2d> plans;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = plans.find({p0, p1});
  if (it != plans.end()) return it->second;
  double* real = fftw_alloc_real(static_cast<std::size_t>(p0) * p1);
  fftw_complex* spec = fftw_alloc_complex(static_cast<std::size_t>(p0) * (p1 / 2 + 1));
  Plan2d plan{fftw_plan_dft_r2c_2d(p0, p1, real, spec, FFTW_ESTIMATE),
              fftw_plan_dft_c2r_2d(p0, p1, spec, real, FFTW_ESTIMATE)};
  fftw_free(real);
  fftw_free(spec);
  plans.emplace(std::make_pair(p0, p1), plan);
  return plan;
}

int good_fft_size(int n) {
  for (int m = n;; ++m) {
    int k = m;
    for (int p : {2, 3, 5, 7})
      while (k % p == 0) k /= p;
    if (k == 1) return m;
  }
}

inline fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

struct ColumnRange {
  long lo, hi;  // valid sample indices n with 0 <= n - shift < nt
};

inline ColumnRange column_range(const StftLayout& L, int i) {
  const long s = L.shift[i];
  return {std::max<long>(0, s), std::min<long>(L.nt, L.nt + s)};
}

inline void stft_direct_column(const StftLayout& L, const cplx* f, const cplx* g, int i, cplx* out) {
  const ColumnRange cr = column_range(L, i);
  const long s = L.shift[i];
  for (int k = 0; k < L.nxi; ++k) {
    const double xi = L.xi0 + k * L.dxi;
    cplx acc = 0.0;
    for (long n = cr.lo; n < cr.hi; ++n) {
      const double t = L.t0 + n * L.dt;
      acc += f[n] * std::conj(g[n - s]) * std::polar(1.0, -kTwoPi * xi * t);
    }
    out[static_cast<std::size_t>(i) * L.nxi + k] = acc * L.dt;
  }
}

inline void correlate_row(const double* img, int n0, int n1, const double* stencil, int half, int c0,
                          double* out) {
  const int w = 2 * half + 1;
  for (int c1 = 0; c1 < n1; ++c1) {
    double acc = 0.0;
    for (int a = -half; a <= half; ++a) {
      const int u0 = c0 + a;
      if (u0 < 0 || u0 >= n0) continue;
      const double* row = img + static_cast<std::size_t>(u0) * n1;
      const double* srow = stencil + static_cast<std::size_t>(a + half) * w;
      const int blo = std::max(-half, -c1), bhi = std::min(half, n1 - 1 - c1);
      for (int b = blo; b <= bhi; ++b) acc += row[c1 + b] * srow[b + half];
    }
    out[static_cast<std::size_t>(c0) * n1 + c1] = acc;
  }
}

inline cplx gram_entry(const cplx* atoms, std::size_t rows, const std::vector<std::size_t>& nz, const double* w,
                       int p, int q) {
  const cplx* ap = atoms + static_cast<std::size_t>(p) * rows;
  const cplx* aq = atoms + static_cast<std::size_t>(q) * rows;
  cplx acc = 0.0;
  for (std::size_t n : nz) acc += std::conj(ap[n]) * w[n] * aq[n];
  return acc;
}

std::vector<std::size_t> nonzero_rows(std::size_t rows, const double* w) {
  std::vector<std::size_t> nz;
  for (std::size_t n = 0; n < rows; ++n)
    if (w[n] != 0.0) nz.push_back(n);
  return nz;
}

}  // namespace

namespace serial {

void stft_direct(const StftLayout& L, const cplx* f, const cplx* g, cplx* out) {
  for (int i = 0; i < L.nx; ++i) stft_direct_column(L, f, g, i, out);
}

void adjoint_direct(const StftLayout& L, const cplx* F, const cplx* g, double cell_area, cplx* out) {
  for (int n = 0; n < L.nt; ++n) {
    const double t = L.t0 + n * L.dt;
    cplx acc = 0.0;
    for (int i = 0; i < L.nx; ++i) {
      const long m = n - L.shift[i];
      if (m < 0 || m >= L.nt) continue;
      cplx col = 0.0;
      for (int k = 0; k < L.nxi; ++k) {
        const double xi = L.xi0 + k * L.dxi;
        col += F[static_cast<std::size_t>(i) * L.nxi + k] * std::polar(1.0, kTwoPi * xi * t);
      }
      acc += g[m] * col;
    }
    out[n] = acc * cell_area;
  }
}

void correlate_direct(const double* img, int n0, int n1, const double* stencil, int half, double* out) {
  for (int c0 = 0; c0 < n0; ++c0) correlate_row(img, n0, n1, stencil, half, c0, out);
}

void gram(const cplx* atoms, std::size_t rows, int cols, const double* w, cplx* out) {
  const auto nz = nonzero_rows(rows, w);
  for (int q = 0; q < cols; ++q)
    for (int p = 0; p <= q; ++p) {
      const cplx v = gram_entry(atoms, rows, nz, w, p, q);
      out[static_cast<std::size_t>(q) * cols + p] = v;
      out[static_cast<std::size_t>(p) * cols + q] = std::conj(v);
    }
}

}  // namespace serial

namespace parallel {

void stft_direct(const StftLayout& L, const cplx* f, const cplx* g, cplx* out) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < L.nx; ++i) stft_direct_column(L, f, g, i, out);
}

void stft_fft(const StftLayout& L, const cplx* f, const cplx* g, cplx* out) {
  const int N = L.fft_len;
  const fftw_plan plan = dft_plan(N, FFTW_FORWARD);
  std::vector<cplx> ph_n(L.nt), ph_k(L.nxi);
  for (int n = 0; n < L.nt; ++n) ph_n[n] = std::polar(1.0, -kTwoPi * L.xi0 * (n * L.dt));
  for (int k = 0; k < L.nxi; ++k) ph_k[k] = L.dt * std::polar(1.0, -kTwoPi * (L.xi0 + k * L.dxi) * L.t0);

#pragma omp parallel
  {
    cplx* buf = reinterpret_cast<cplx*>(fftw_alloc_complex(N));
#pragma omp for schedule(static)
    for (int i = 0; i < L.nx; ++i) {
      std::fill(buf, buf + N, cplx(0.0));
      const ColumnRange cr = column_range(L, i);
      const long s = L.shift[i];
      for (long n = cr.lo; n < cr.hi; ++n) buf[n % N] += f[n] * std::conj(g[n - s]) * ph_n[n];
      fftw_execute_dft(plan, as_fftw(buf), as_fftw(buf));
      cplx* col = out + static_cast<std::size_t>(i) * L.nxi;
      for (int k = 0; k < L.nxi; ++k) col[k] = ph_k[k] * buf[k];
    }
    fftw_free(buf);
  }
}

void adjoint_fft(const StftLayout& L, const cplx* F, const cplx* g, double cell_area, cplx* out) {
  const int N = L.fft_len;
  const fftw_plan plan = dft_plan(N, FFTW_BACKWARD);
  std::vector<cplx> ph_k(L.nxi), ph_n(L.nt);
  for (int k = 0; k < L.nxi; ++k) ph_k[k] = std::polar(1.0, kTwoPi * (k * L.dxi) * L.t0);
  for (int n = 0; n < L.nt; ++n) ph_n[n] = cell_area * std::polar(1.0, kTwoPi * L.xi0 * (L.t0 + n * L.dt));
  std::vector<cplx> cols(static_cast<std::size_t>(L.nx) * L.nt, cplx(0.0));

#pragma omp parallel
  {
    cplx* buf = reinterpret_cast<cplx*>(fftw_alloc_complex(N));
#pragma omp for schedule(static)
    for (int i = 0; i < L.nx; ++i) {
      std::fill(buf, buf + N, cplx(0.0));
      const cplx* col = F + static_cast<std::size_t>(i) * L.nxi;
      for (int k = 0; k < L.nxi; ++k) buf[k] = col[k] * ph_k[k];
      fftw_execute_dft(plan, as_fftw(buf), as_fftw(buf));
      const ColumnRange cr = column_range(L, i);
      const long s = L.shift[i];
      cplx* dst = cols.data() + static_cast<std::size_t>(i) * L.nt;
      for (long n = cr.lo; n < cr.hi; ++n) dst[n] = g[n - s] * ph_n[n] * buf[n % N];
    }
    fftw_free(buf);
  }

#pragma omp parallel for schedule(static)
  for (int n = 0; n < L.nt; ++n) {
    cplx acc = 0.0;
    for (int i = 0; i < L.nx; ++i) acc += cols[static_cast<std::size_t>(i) * L.nt + n];
    out[n] = acc;
  }
}

void correlate_direct(const double* img, int n0, int n1, const double* stencil, int half, double* out) {
#pragma omp parallel for schedule(dynamic, 4)
  for (int c0 = 0; c0 < n0; ++c0) correlate_row(img, n0, n1, stencil, half, c0, out);
}

void gram(const cplx* atoms, std::size_t rows, int cols, const double* w, cplx* out) {
  const auto nz = nonzero_rows(rows, w);
  const long pairs = static_cast<long>(cols) * (cols + 1) / 2;
#pragma omp parallel for schedule(dynamic, 8)
  for (long t = 0; t < pairs; ++t) {
    // Unrank t into (p, q) with p <= q.
    int q = static_cast<int>((std::sqrt(8.0 * t + 1.0) - 1.0) / 2.0);
    while (static_cast<long>(q) * (q + 1) / 2 > t) --q;
    while (static_cast<long>(q + 1) * (q + 2) / 2 <= t) ++q;
    const int p = static_cast<int>(t - static_cast<long>(q) * (q + 1) / 2);
    const cplx v = gram_entry(atoms, rows, nz, w, p, q);
    out[static_cast<std::size_t>(q) * cols + p] = v;
    out[static_cast<std::size_t>(p) * cols + q] = std::conj(v);
  }
}

}  // namespace parallel

void correlate_fft(const double* img, int n0, int n1, const double* stencil, int half, double* out) {
  const int p0 = good_fft_size(n0 + half);
  const int p1 = good_fft_size(n1 + half);
  const int q1 = p1 / 2 + 1;
  const std::size_t nreal = static_cast<std::size_t>(p0) * p1;
  const std::size_t nspec = static_cast<std::size_t>(p0) * q1;
  const Plan2d plan = r2c_plan(p0, p1);

  double* a = fftw_alloc_real(nreal);
  double* b = fftw_alloc_real(nreal);
  fftw_complex* fa = fftw_alloc_complex(nspec);
  fftw_complex* fb = fftw_alloc_complex(nspec);
  std::fill(a, a + nreal, 0.0);
  std::fill(b, b + nreal, 0.0);
  for (int i = 0; i < n0; ++i)
    std::copy(img + static_cast<std::size_t>(i) * n1, img + static_cast<std::size_t>(i + 1) * n1,
              a + static_cast<std::size_t>(i) * p1);
  // Flipped stencil, wrapped to negative offsets.
  const int w = 2 * half + 1;
  for (int u = -half; u <= half; ++u)
    for (int v = -half; v <= half; ++v) {
      const int r0 = ((-u) % p0 + p0) % p0, r1 = ((-v) % p1 + p1) % p1;
      b[static_cast<std::size_t>(r0) * p1 + r1] = stencil[static_cast<std::size_t>(u + half) * w + (v + half)];
    }
  fftw_execute_dft_r2c(plan.forward, a, fa);
  fftw_execute_dft_r2c(plan.forward, b, fb);
  for (std::size_t n = 0; n < nspec; ++n) {
    const double re = fa[n][0] * fb[n][0] - fa[n][1] * fb[n][1];
    const double im = fa[n][0] * fb[n][1] + fa[n][1] * fb[n][0];
    fa[n][0] = re;
    fa[n][1] = im;
  }
  fftw_execute_dft_c2r(plan.backward, fa, a);
  const double scale = 1.0 / static_cast<double>(nreal);
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n1; ++j) out[static_cast<std::size_t>(i) * n1 + j] = a[static_cast<std::size_t>(i) * p1 + j] * scale;
  fftw_free(a);
  fftw_free(b);
  fftw_free(fa);
  fftw_free(fb);
}

void correlate(const double* img, int n0, int n1, const double* stencil, int half, double* out) {
  const double w = 2.0 * half + 1.0;
  const double direct = static_cast<double>(n0) * n1 * w * w;
  const double p = static_cast<double>(n0 + half) * (n1 + half);
  const double viafft = 3.0 * p * std::log2(std::max(p, 2.0)) * 4.0;
  if (direct < viafft)
    parallel::correlate_direct(img, n0, n1, stencil, half, out);
  else
    correlate_fft(img, n0, n1, stencil, half, out);
}

void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace tfsieve::kernels

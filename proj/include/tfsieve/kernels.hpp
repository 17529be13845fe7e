#pragma once

// Hot loops behind the public API. Each parallel kernel has a serial
// reference with the same signature; tests compare the two and the
// benchmark target times them. Parallel kernels write disjoint outputs and
// reduce in a fixed order, so results do not depend on the thread count.

#include <cstddef>
#include <vector>

#include "tfsieve/types.hpp"

namespace tfsieve::kernels {

struct StftLayout {
  int nt = 0;
  double t0 = 0.0, dt = 1.0;
  int nx = 0;
  std::vector<long> shift;  // x_i / dt per column
  int nxi = 0;
  double xi0 = 0.0, dxi = 1.0;
  int fft_len = 0;  // 1/(dt dxi) when integral, else 0
};

// out is nx * nxi, x-major. g is sampled on the same axis as f.
// adjoint: out has nt samples.
// correlate: out(c0,c1) = sum_{a,b} img(c0+a, c1+b) stencil(a,b), |a|,|b| <= half,
//   images row-major n0 x n1, stencil row-major (2 half + 1)^2, zero outside.
// gram: atoms column-major rows x cols, out column-major cols x cols,
//   out(p,q) = sum_n conj(a(n,p)) w(n) a(n,q).
namespace serial {
void stft_direct(const StftLayout& L, const cplx* f, const cplx* g, cplx* out);
void adjoint_direct(const StftLayout& L, const cplx* F, const cplx* g, double cell_area, cplx* out);
void correlate_direct(const double* img, int n0, int n1, const double* stencil, int half, double* out);
void gram(const cplx* atoms, std::size_t rows, int cols, const double* w, cplx* out);
}  // namespace serial

namespace parallel {
void stft_direct(const StftLayout& L, const cplx* f, const cplx* g, cplx* out);
void stft_fft(const StftLayout& L, const cplx* f, const cplx* g, cplx* out);
void adjoint_fft(const StftLayout& L, const cplx* F, const cplx* g, double cell_area, cplx* out);
void correlate_direct(const double* img, int n0, int n1, const double* stencil, int half, double* out);
void gram(const cplx* atoms, std::size_t rows, int cols, const double* w, cplx* out);
}  // namespace parallel

// FFT-based correlation, same contract as correlate_direct.
void correlate_fft(const double* img, int n0, int n1, const double* stencil, int half, double* out);

// Picks direct or FFT correlation by a flop estimate.
void correlate(const double* img, int n0, int n1, const double* stencil, int half, double* out);

void set_threads(int n);
int max_threads();

}  // namespace tfsieve::kernels

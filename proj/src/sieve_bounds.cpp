#include "tfsieve/sieve_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tfsieve/error.hpp"
#include "tfsieve/kernels.hpp"
#include "tfsieve/special_fn.hpp"

namespace tfsieve {

namespace {

struct KernelStencil {
  int half = 0;
  std::vector<double> values;  // (2 half + 1)^2 of |V_g g| at offsets, normalized window
  std::vector<std::string> warnings;
};

KernelStencil window_stencil(const Signal& g, const PhaseGrid& grid) {
  KernelStencil ks;
  double norm2g = g.l2_norm();
  if (norm2g == 0.0) throw Error(ErrorCode::ZeroSignal, "window is zero");
  norm2g *= norm2g;
  if (std::abs(norm2g - 1.0) > 1e-6) ks.warnings.push_back("window renormalized to unit L2 norm");

  const int H = std::min((grid.nx() - 1) / 2, (grid.nxi() - 1) / 2);
  const TimeAxis ox{-H * grid.time.step, grid.time.step, 2 * H + 1};
  const TimeAxis oy{-H * grid.freq.step, grid.freq.step, 2 * H + 1};
  const TFField vgg = stft(g, g, PhaseGrid(ox, oy));
  const double peak = vgg.max_abs();
  int used = 0;
  for (int a = -H; a <= H; ++a)
    for (int b = -H; b <= H; ++b)
      if (std::abs(vgg(a + H, b + H)) > 1e-14 * peak) used = std::max({used, std::abs(a), std::abs(b)});
  ks.half = used;
  const int w = 2 * used + 1;
  ks.values.assign(static_cast<std::size_t>(w) * w, 0.0);
  for (int a = -used; a <= used; ++a)
    for (int b = -used; b <= used; ++b)
      ks.values[static_cast<std::size_t>(a + used) * w + (b + used)] = std::abs(vgg(a + H, b + H)) / norm2g;
  return ks;
}

std::vector<double> kernel_integrals(const Mask& mask, const KernelStencil& ks) {
  const PhaseGrid& g = mask.grid();
  std::vector<double> img(g.size()), out(g.size());
  for (std::size_t n = 0; n < img.size(); ++n) img[n] = mask.cells()[n];
  kernels::correlate(img.data(), g.nx(), g.nxi(), ks.values.data(), ks.half, out.data());
  for (double& v : out) v *= g.cell_area();
  return out;
}

}  // namespace

SieveCertificate sieve_bound(const Region& region, int r, double R, const PhaseGrid& grid, double p,
                             const DensityOptions& opts) {
  if (!(p >= 1.0)) throw Error(ErrorCode::DomainError, "p must be at least 1");
  SieveCertificate c;
  c.order = r;
  c.radius = R;
  c.p = p;
  c.c_constant = c_constant(r, r, R);
  const DensityResult a = a_density(region, r, R, grid, opts);
  const DensityResult rho = max_nyquist_density(region, R, grid, opts);
  c.a_density = a.value;
  c.nyquist_density = rho.value;
  c.a_error = a.error_estimate;
  c.rho_error = rho.error_estimate;
  c.edge_effect = a.edge_effect || rho.edge_effect;
  c.bound_a = c.a_density / c.c_constant;
  c.bound_rho = c.nyquist_density / c.c_constant;
  return c;
}

SieveCertificate best_sieve_bound(const Region& region, int r, const std::vector<double>& radii, const PhaseGrid& grid,
                                  double p, const DensityOptions& opts) {
  if (radii.empty()) throw Error(ErrorCode::InvalidInput, "no candidate radii");
  if (!(p >= 1.0)) throw Error(ErrorCode::DomainError, "p must be at least 1");
  // Rank by bound_a alone; the Nyquist density is only needed at the winner.
  double best_bound = std::numeric_limits<double>::infinity(), best_R = radii.front();
  for (double R : radii) {
    if (!(R > 0)) throw Error(ErrorCode::DomainError, "candidate radii must be positive");
    const double b = a_density(region, r, R, grid, opts).value / c_constant(r, r, R);
    if (b < best_bound) {
      best_bound = b;
      best_R = R;
    }
  }
  return sieve_bound(region, r, best_R, grid, p, opts);
}

std::vector<double> default_radius_ladder() {
  std::vector<double> radii;
  for (int k = 0; k <= 16; ++k) radii.push_back(0.25 * std::pow(2.0, k / 4.0));
  return radii;
}

double empirical_concentration(const Signal& f, const Signal& g, const Region& region, double p, const PhaseGrid& grid) {
  if (!(p >= 1.0)) throw Error(ErrorCode::DomainError, "p must be at least 1");
  const TFField V = stft(f, g, grid);
  const RegionWeights rw = region_weights(region, grid);
  double num = 0.0, den = 0.0;
  for (std::size_t n = 0; n < V.values().size(); ++n) {
    const double m = std::pow(std::abs(V.values()[n]), p);
    num += rw.w[n] * m;
    den += m;
  }
  den *= grid.cell_area();
  if (!(den > std::numeric_limits<double>::min())) throw Error(ErrorCode::ZeroSignal, "STFT vanishes on the grid");
  return num / den;
}

KernelBound general_kernel_bound(const Signal& g, const Region& region, const PhaseGrid& grid,
                                 std::optional<double> split_radius) {
  KernelBound kb;
  const KernelStencil ks = window_stencil(g, grid);
  kb.warnings = ks.warnings;
  const Mask mask = rasterize(region, grid);
  const std::vector<double> vals = kernel_integrals(mask, ks);
  kb.bound = std::max(0.0, *std::max_element(vals.begin(), vals.end()));
  if (split_radius) {
    const double R = *split_radius;
    if (!(R > 0)) throw Error(ErrorCode::DomainError, "split radius must be positive");
    KernelSplit s;
    s.radius = R;
    s.nyquist_density = max_nyquist_density(region, R, grid, DensityOptions{1}).value;
    const int w = 2 * ks.half + 1;
    for (int a = -ks.half; a <= ks.half; ++a)
      for (int b = -ks.half; b <= ks.half; ++b)
        if (std::hypot(a * grid.time.step, b * grid.freq.step) > R * (1.0 + 1e-12))
          s.epsilon += ks.values[static_cast<std::size_t>(a + ks.half) * w + (b + ks.half)];
    s.epsilon *= grid.cell_area();
    s.bound = s.nyquist_density + s.epsilon;
    kb.split = s;
  }
  return kb;
}

double selberg_bound(const Signal& g, const Region& region, const PhaseGrid& grid) {
  const KernelStencil ks = window_stencil(g, grid);
  const Mask mask = rasterize(region, grid);
  const std::vector<double> vals = kernel_integrals(mask, ks);
  double best = 0.0;
  for (std::size_t n = 0; n < vals.size(); ++n)
    if (mask.cells()[n]) best = std::max(best, vals[n]);
  return best;
}

double schur_bound(const Eigen::MatrixXcd& kernel, const std::vector<double>& measure, double theta, double p,
                   double c_inf) {
  if (kernel.rows() != kernel.cols() || static_cast<std::size_t>(kernel.rows()) != measure.size())
    throw Error(ErrorCode::InvalidInput, "kernel and measure sizes disagree");
  if (!(theta > 0)) throw Error(ErrorCode::DomainError, "theta must be positive");
  const double scale = std::max(kernel.cwiseAbs().maxCoeff(), 1e-300);
  if ((kernel - kernel.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw Error(ErrorCode::NonHermitian, "kernel is not hermitian");
  double best = 0.0;
  for (Eigen::Index y = 0; y < kernel.cols(); ++y) {
    double s = 0.0;
    for (Eigen::Index x = 0; x < kernel.rows(); ++x) s += std::abs(kernel(x, y)) * measure[x];
    best = std::max(best, s);
  }
  return theta * std::pow(c_inf, p - 1.0) * best;
}

}  // namespace tfsieve

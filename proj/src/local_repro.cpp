#include "tfsieve/local_repro.hpp"

#include <cmath>
#include <numbers>

#include "tfsieve/error.hpp"
#include "tfsieve/special_fn.hpp"

namespace tfsieve {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegenerate = 1e-10;

double checked_constant(int j, int r, double R) {
  const double c = c_constant(j, r, R);
  if (std::abs(c) < kDegenerate)
    throw Error(ErrorCode::DegenerateConstant, "C_{" + std::to_string(j) + "," + std::to_string(r) + "}(R) vanishes");
  return c;
}

// sum over the disc of W(w) values(w) k(w).
template <class Values, class KernelFn>
cplx disc_sum(const PhaseGrid& grid, const Values& values, PhasePoint z, double R, KernelFn k) {
  const PatchWeights W = disc_weights(grid, z, R);
  cplx acc = 0.0;
  for (int i = 0; i < W.ni; ++i)
    for (int q = 0; q < W.nk; ++q) {
      const double w = W.w[static_cast<std::size_t>(i) * W.nk + q];
      if (w == 0.0) continue;
      const int gi = W.i0 + i, gk = W.k0 + q;
      acc += w * values(gi, gk) * k(grid.at(gi, gk));
    }
  return acc;
}

}  // namespace

DiscPatch DiscPatch::extract(const TFField& F, PhasePoint center, double radius, int m) {
  if (!(radius > 0)) throw Error(ErrorCode::DomainError, "patch radius must be positive");
  const PhaseGrid& g = F.grid();
  // The same index box the disc weights use.
  const long i0 = g.time.nearest(center.time - radius) - 1 - m, i1 = g.time.nearest(center.time + radius) + 1 + m;
  const long k0 = g.freq.nearest(center.freq - radius) - 1 - m, k1 = g.freq.nearest(center.freq + radius) + 1 + m;
  if (i0 < 0 || k0 < 0 || i1 >= g.nx() || k1 >= g.nxi())
    throw Error(ErrorCode::PatchOutsideGrid, "disc patch leaves the grid");
  const TimeAxis tx{g.time.at(static_cast<int>(i0)), g.time.step, static_cast<int>(i1 - i0 + 1)};
  const TimeAxis ty{g.freq.at(static_cast<int>(k0)), g.freq.step, static_cast<int>(k1 - k0 + 1)};
  TFField sub(PhaseGrid(tx, ty));
  for (int i = 0; i < tx.count; ++i)
    for (int k = 0; k < ty.count; ++k) sub(i, k) = F(static_cast<int>(i0) + i, static_cast<int>(k0) + k);
  return DiscPatch{center, radius, std::move(sub)};
}

LocalReproduction local_reproduce(const TFField& F, int r, int j, double R, PhasePoint z) {
  const double c = checked_constant(j, r, R);
  const KernelSpec spec = KernelSpec::single(j);
  const cplx s = disc_sum(F.grid(), F, z, R, [&](PhasePoint w) { return kernel(spec, z, w); });
  return {s / c, 1.0 / std::abs(c)};
}

Signal LocalInversion::synthesize(const TimeAxis& axis) const {
  return shifted_hermite_combination(coefficients, center, axis);
}

LocalInversion local_invert(const DiscPatch& patch, int r, int J) {
  if (J < 0 || r < 0) throw Error(ErrorCode::DomainError, "orders must be nonnegative");
  if (!(patch.radius > 0)) throw Error(ErrorCode::DomainError, "patch radius must be positive");
  checked_constant(r, r, patch.radius);
  // The j-th coefficient is normalised by the disc mass of |V_{h_r} h_j|^2.
  LocalInversion out;
  out.center = patch.center;
  out.coefficients.assign(J + 1, cplx(0.0));
  out.flagged.assign(J + 1, false);
  out.conditioning = 0.0;
  const PhaseGrid& grid = patch.samples.grid();
  const PatchWeights W = disc_weights(grid, patch.center, patch.radius);
  for (int j = 0; j <= J; ++j) {
    const double c = inversion_constant(j, r, patch.radius);
    if (std::abs(c) < kDegenerate) {
      out.flagged[j] = true;
      continue;
    }
    cplx acc = 0.0;
    for (int i = 0; i < W.ni; ++i)
      for (int q = 0; q < W.nk; ++q) {
        const double w = W.w[static_cast<std::size_t>(i) * W.nk + q];
        if (w == 0.0) continue;
        const int gi = W.i0 + i, gk = W.k0 + q;
        acc += w * patch.samples(gi, gk) * hermite_atom_inner(r, grid.at(gi, gk), j, patch.center);
      }
    out.coefficients[j] = acc / c;
    out.conditioning = std::max(out.conditioning, 1.0 / std::abs(c));
  }
  return out;
}

LocalReproduction poly_local_reproduce(const FockField& F, int j, int r, double R, PhasePoint z) {
  const double c = checked_constant(j, r, R);
  const cplx zc(z.time, z.freq);
  auto k = [&](PhasePoint w) {
    const cplx wc(w.time, w.freq);
    const double d2 = std::norm(zc - wc);
    const double s = kPi * d2;
    return laguerre(r, 0, s) * std::polar(std::exp(-0.5 * s), kPi * std::imag(zc * std::conj(wc)));
  };
  const cplx s = disc_sum(F.grid(), [&](int i, int q) { return F.weighted(i, q); }, z, R, k);
  return {s / c, 1.0 / std::abs(c)};
}

}  // namespace tfsieve

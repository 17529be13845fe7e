#pragma once

#include <vector>

#include "tfsieve/disc_quadrature.hpp"
#include "tfsieve/poly_multiplex.hpp"
#include "tfsieve/tf_grid.hpp"

namespace tfsieve {

// Samples of a field around a disc. The stored sub-grid keeps a margin of
// quadrature-stencil cells beyond the radius.
struct DiscPatch {
  PhasePoint center;
  double radius = 0.0;
  TFField samples;

  static DiscPatch extract(const TFField& F, PhasePoint center, double radius, int m = kDefaultQuadratureOrder);
};

struct LocalReproduction {
  cplx value;
  double conditioning = 1.0;  // 1 / |C_{j,r}(R)|
};

LocalReproduction local_reproduce(const TFField& F, int r, int j, double R, PhasePoint z);

struct LocalInversion {
  PhasePoint center;
  std::vector<cplx> coefficients;  // relative to pi(center) h_j
  std::vector<bool> flagged;       // constant too small, coefficient set to zero
  double conditioning = 1.0;       // max 1 / inversion_constant(j, r, R) over unflagged j

  Signal synthesize(const TimeAxis& axis) const;
};

inline constexpr int kDefaultInversionOrder = 16;

LocalInversion local_invert(const DiscPatch& patch, int r, int J = kDefaultInversionOrder);

// Reproduction in the weighted Fock picture; F holds e^{-pi|z|^2/2} B^{j+1} f.
LocalReproduction poly_local_reproduce(const FockField& F, int j, int r, double R, PhasePoint z);

}  // namespace tfsieve

#pragma once

// Quadrature weights on grid nodes for integrals over discs and rectangles.
// Each cell of the shape is integrated exactly against the local Lagrange
// interpolant of degree 2m through the (2m+1)^2 surrounding nodes, so smooth
// integrands see a boundary error of high order instead of O(step).

#include <vector>

#include "tfsieve/tf_grid.hpp"

namespace tfsieve {

inline constexpr int kDefaultQuadratureOrder = 3;

struct PatchWeights {
  int i0 = 0, k0 = 0;  // grid index of the first row/column
  int ni = 0, nk = 0;
  std::vector<double> w;  // ni x nk, row-major

  double at(int i, int k) const { return w[static_cast<std::size_t>(i - i0) * nk + (k - k0)]; }
  double sum() const;
  bool empty() const { return ni == 0 || nk == 0; }
};

// Throws PatchOutsideGrid if the stencil would leave the grid.
PatchWeights disc_weights(const PhaseGrid& grid, PhasePoint center, double radius, int m = kDefaultQuadratureOrder);
PatchWeights rect_weights(const PhaseGrid& grid, PhasePoint lo, PhasePoint hi, int m = kDefaultQuadratureOrder);

}  // namespace tfsieve

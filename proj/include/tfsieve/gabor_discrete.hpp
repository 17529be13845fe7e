#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "tfsieve/region_density.hpp"
#include "tfsieve/tf_grid.hpp"

namespace tfsieve {

struct Lattice {
  Eigen::Matrix2d generator = Eigen::Matrix2d::Identity();  // columns are the basis vectors
  int window_order = 0;
  PhasePoint box_min{-6.0, -6.0};
  PhasePoint box_max{6.0, 6.0};

  void validate() const;
  double density() const { return 1.0 / std::abs(generator.determinant()); }
  // Lattice points inside the truncation box.
  PointSet points() const;
  PointSet points_in(PhasePoint lo, PhasePoint hi) const;
};

// V_{h_r} f at each point by a direct sum over the signal samples.
std::vector<cplx> sample_stft(const Signal& f, int r, const PointSet& points);

struct DiscreteSieveBound {
  double a_density = 0.0;
  double nyquist_density = 0.0;
  double c_constant = 1.0;
  double frame_lower = 1.0;
  double bound_a = 0.0;    // A^d / (m C)
  double bound_rho = 0.0;  // rho^d / (m C)
};

DiscreteSieveBound discrete_sieve_bound(const PointSet& delta, int r, double R, double frame_lower);

// sum_lambda |V f(lambda)|^p / ||V f||_p^p for f = sum c_j h_j.
double frame_ratio(const PointSet& points, int r, double p, const std::vector<cplx>& coeffs, const TimeAxis& axis,
                   const PhaseGrid& grid);

struct FrameEstimate {
  double estimate = 0.0;
  bool near_zero = false;
  int trials = 0;
  double tail = 0.0;  // relative lattice mass just outside the box, worst candidate
  const char* label = "empirical";
};

// Below this estimate per unit lattice density the system is flagged as
// having no usable lower frame bound.
inline constexpr double kNearZeroFrameBound = 0.15;

// Minimum of frame_ratio over random f in span{h_0..h_M}; for p = 2 the
// minimizing eigenvector of the sampled Gram matrix is tried as well.
FrameEstimate empirical_frame_lower_bound(const Lattice& lattice, double p, int trials, int model_size,
                                          const TimeAxis& axis, const PhaseGrid& grid, std::uint64_t seed = 1);

}  // namespace tfsieve

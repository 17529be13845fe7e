#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "tfsieve/region_density.hpp"
#include "tfsieve/tf_grid.hpp"

namespace tfsieve {

struct SieveCertificate {
  int order = 0;
  double radius = 0.0;
  double p = 1.0;
  double a_density = 0.0;
  double nyquist_density = 0.0;
  double c_constant = 1.0;
  double bound_a = 0.0;
  double bound_rho = 0.0;
  double a_error = 0.0;
  double rho_error = 0.0;
  bool edge_effect = false;
};

SieveCertificate sieve_bound(const Region& region, int r, double R, const PhaseGrid& grid, double p = 1.0,
                             const DensityOptions& opts = {});

// Certificate with the smallest bound_a over the candidate radii.
SieveCertificate best_sieve_bound(const Region& region, int r, const std::vector<double>& radii, const PhaseGrid& grid,
                                  double p = 1.0, const DensityOptions& opts = {});

// 0.25 * 2^(k/4), k = 0..16.
std::vector<double> default_radius_ladder();

// ||V_g f chi||_p^p / ||V_g f||_p^p on the grid.
double empirical_concentration(const Signal& f, const Signal& g, const Region& region, double p, const PhaseGrid& grid);

struct KernelSplit {
  double radius = 0.0;
  double nyquist_density = 0.0;  // sup_z |Delta cap (z + D_R)|
  double epsilon = 0.0;          // kernel mass outside D_R
  double bound = 0.0;            // nyquist_density + epsilon
};

struct KernelBound {
  double bound = 0.0;
  std::optional<KernelSplit> split;
  std::vector<std::string> warnings;
};

// sup_z int_Delta |K_g(z, w)| dw over grid centres, with |K_g(z, w)| = |V_g g(w - z)|.
KernelBound general_kernel_bound(const Signal& g, const Region& region, const PhaseGrid& grid,
                                 std::optional<double> split_radius = std::nullopt);

// Same integral with the sup restricted to z in Delta.
double selberg_bound(const Signal& g, const Region& region, const PhaseGrid& grid);

// theta * c_inf^(p-1) * sup_y sum_x |K(x, y)| mu(x) for a kernel sampled on a finite point set.
double schur_bound(const Eigen::MatrixXcd& kernel, const std::vector<double>& measure, double theta, double p = 1.0,
                   double c_inf = 1.0);

}  // namespace tfsieve

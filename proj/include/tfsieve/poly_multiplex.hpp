#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "tfsieve/region_density.hpp"
#include "tfsieve/tf_grid.hpp"

namespace tfsieve {

struct SignalVector {
  std::vector<Signal> components;

  SignalVector() = default;
  explicit SignalVector(std::vector<Signal> fs);
  int order() const { return static_cast<int>(components.size()) - 1; }
};

// Fock-picture values stored as e^{-pi|z|^2/2} F(z) with z = x + i xi.
class FockField {
 public:
  FockField() = default;
  FockField(const PhaseGrid& grid, std::vector<cplx> weighted);

  const PhaseGrid& grid() const { return grid_; }
  const std::vector<cplx>& weighted_values() const { return weighted_; }
  cplx weighted(int i, int k) const { return weighted_[grid_.index(i, k)]; }
  // Unweighted value; overflows to infinity far from the origin.
  cplx value(int i, int k) const;
  // (int |F|^p e^{-p pi |z|^2 / 2})^{1/p}
  double lp_norm(double p) const;

 private:
  PhaseGrid grid_;
  std::vector<cplx> weighted_;
};

FockField bargmann(const Signal& f, const PhaseGrid& grid);
FockField true_poly_bargmann(const Signal& f, int r, const PhaseGrid& grid);

// sum_k V_{h_k} f_k.
TFField super_stft(const SignalVector& fs, const PhaseGrid& grid);

// V_{h_k}^* F for 0 <= k <= n, sampled on axis.
Signal demultiplex(const TFField& F, int k, int n, const TimeAxis& axis);

struct MultiplexBound {
  double bound = 0.0;          // max_m C_{m,0}(R)^{-1} A_0(Delta, R)
  double max_inverse_c = 0.0;
  double a_density = 0.0;
  double norm_equivalence = 0.0;  // empirical, not part of bound
};

MultiplexBound multiplex_sieve_bound(const Region& region, int n, double R, const PhaseGrid& grid,
                                     const TimeAxis& axis, int trials = 8, std::uint64_t seed = 1,
                                     const DensityOptions& opts = {});

struct EigenEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Largest eigenvalue of a hermitian positive semidefinite matrix.
EigenEstimate power_iteration(const Eigen::MatrixXcd& A, double tol = 1e-8, int max_iter = 10000);

struct ConcentrationEstimate {
  double value = 0.0;       // sup ||V_g f chi||^2 / ||V_g f||^2 over the model
  double power_value = 0.0;  // power-iteration cross-check
  bool power_converged = false;
  double tail_mass = 0.0;   // top-eigenvector mass on the last tenth of the model
};

// Concentration of V_g over span{h_0..h_M} for a region on the grid.
ConcentrationEstimate max_concentration(const Region& region, const Signal& g, const PhaseGrid& grid, int model_size);

struct DecouplingRow {
  double separation = 0.0;
  double combined = 0.0;
  double max_component = 0.0;
  double gap = 0.0;
  double tail_mass = 0.0;
  bool converged = true;
};

// Components are laid out left to right along the time axis, the centres of
// consecutive bounding boxes the given distance apart, centred on the origin.
std::vector<DecouplingRow> decoupling_experiment(const std::vector<Region>& components,
                                                 const std::vector<double>& separations, const Signal& g,
                                                 const PhaseGrid& grid, int model_size);

}  // namespace tfsieve

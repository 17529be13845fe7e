#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "tfsieve/region_density.hpp"
#include "tfsieve/tf_grid.hpp"

namespace tfsieve {

// span{h_0..h_N} seen through V_{h_r} on a grid.
class HermiteModel {
 public:
  inline static constexpr int kDefaultSize = 24;

  HermiteModel(int window_order, int model_size, const PhaseGrid& grid, const TimeAxis& axis);

  int window_order() const { return order_; }
  int size() const { return static_cast<int>(atoms_.cols()); }
  const PhaseGrid& grid() const { return grid_; }
  const TimeAxis& axis() const { return axis_; }
  // Column j holds V_{h_r} h_j on the grid, x-major.
  const Eigen::MatrixXcd& atoms() const { return atoms_; }
  // max |<atom_p, atom_q> - delta_pq| in the grid inner product.
  double orthogonality_defect() const { return defect_; }

  TFField synthesize(const Eigen::VectorXcd& c) const;
  Signal signal(const Eigen::VectorXcd& c) const;

 private:
  int order_;
  PhaseGrid grid_;
  TimeAxis axis_;
  Eigen::MatrixXcd atoms_;
  double defect_ = 0.0;
};

enum class Verdict { PerfectRecovery, StableInpainting, NoGuarantee };

const char* verdict_name(Verdict v);

struct RecoveryCertificate {
  Verdict verdict = Verdict::NoGuarantee;
  int order = 0;
  double radius = 0.0;
  double a_density = 0.0;
  double c_constant = 1.0;
  // 2 C / (C - A) when A < C, else infinity.
  double stability_factor = 0.0;

  double stability_bound(double epsilon) const { return stability_factor * epsilon; }
};

RecoveryCertificate certify(const Region& region, int r, const std::vector<double>& radii, const PhaseGrid& grid,
                            const DensityOptions& opts = {});

// Internal state of the splitting iteration, for warm starts.
struct SolverState {
  Eigen::VectorXcd coefficients;
  Eigen::VectorXcd split;  // residual variable
  Eigen::VectorXcd dual;  // scaled by 1 / rho
  double rho = 0.0;       // augmented Lagrangian parameter; 0 picks the data-scaled default
};

struct SolverConfig {
  double tol = 1e-6;
  int max_iter = 20000;
  // Multiplies the data-scaled augmented Lagrangian parameter.
  double penalty = 1.0;
  std::optional<SolverState> warm_start;
};

struct SolveResult {
  Eigen::VectorXcd coefficients;
  int iterations = 0;
  bool converged = false;
  double objective = 0.0;
  // Objective of the returned sequence (best iterate so far), one entry per iteration.
  std::vector<double> objective_trace;
  SolverState state;
};

SolveResult solve_l1_sparse(const TFField& G, const HermiteModel& model, const SolverConfig& cfg = {});
SolveResult solve_inpaint_l1(const TFField& H, const Region& region, const HermiteModel& model,
                             const SolverConfig& cfg = {});
SolveResult solve_inpaint_l2(const TFField& H, const Region& region, const HermiteModel& model);

}  // namespace tfsieve

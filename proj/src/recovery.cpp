#include "tfsieve/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tfsieve/error.hpp"
#include "tfsieve/kernels.hpp"
#include "tfsieve/special_fn.hpp"

namespace tfsieve {

namespace {

Eigen::Map<const Eigen::VectorXcd> as_vector(const TFField& F) {
  return Eigen::Map<const Eigen::VectorXcd>(F.values().data(), static_cast<Eigen::Index>(F.values().size()));
}

void check_grid(const TFField& F, const HermiteModel& model) {
  if (!F.grid().same_as(model.grid())) throw Error(ErrorCode::GridMismatch, "data and model live on different grids");
}

std::vector<double> observed_weights(const Region& region, const PhaseGrid& grid) {
  const Mask m = rasterize(region, grid);
  std::vector<double> o(grid.size());
  for (std::size_t n = 0; n < o.size(); ++n) o[n] = m.cells()[n] ? 0.0 : 1.0;
  return o;
}

inline cplx soft_threshold(cplx v, double t) {
  const double a = std::abs(v);
  return a <= t ? cplx(0.0) : v * ((a - t) / a);
}

// min_c sum_n obs_n |G_n - (A c)_n| dA by scaled ADMM on the split y = G - A c.
SolveResult weighted_l1(const TFField& G, const std::vector<double>& obs, const HermiteModel& model,
                        const SolverConfig& cfg) {
  check_grid(G, model);
  if (!(cfg.tol > 0) || cfg.max_iter < 1 || !(cfg.penalty > 0))
    throw Error(ErrorCode::InvalidInput, "solver tolerance, iteration cap and penalty must be positive");
  const double dA = model.grid().cell_area();
  const double s = std::sqrt(dA);
  const Eigen::MatrixXcd A = model.atoms() * s;
  const Eigen::VectorXcd g = as_vector(G) * s;
  const Eigen::Index n = g.size();
  const Eigen::Map<const Eigen::VectorXd> o(obs.data(), n);

  Eigen::MatrixXcd gram(A.cols(), A.cols());
  kernels::parallel::gram(A.data(), static_cast<std::size_t>(n), static_cast<int>(A.cols()),
                          std::vector<double>(n, 1.0).data(), gram.data());
  const Eigen::LLT<Eigen::MatrixXcd> llt(gram);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::SingularSystem, "model atoms are linearly dependent");

  const double nobs = o.sum();
  const double rms = nobs > 0 ? (g.cwiseProduct(o.cast<cplx>())).norm() / std::sqrt(nobs) : 0.0;
  double rho = cfg.penalty / (rms > 0 ? rms : 1.0);

  auto objective = [&](const Eigen::VectorXcd& Ac) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < n; ++k)
      if (o(k) != 0.0) acc += o(k) * std::abs(g(k) - Ac(k));
    return acc * s;
  };

  SolveResult res;
  Eigen::VectorXcd c, y, u, best;
  if (cfg.warm_start) {
    c = cfg.warm_start->coefficients;
    y = cfg.warm_start->split;
    u = cfg.warm_start->dual;
    if (c.size() != A.cols() || y.size() != n || u.size() != n)
      throw Error(ErrorCode::InvalidInput, "warm start does not match the model");
    if (cfg.warm_start->rho > 0) rho = cfg.warm_start->rho;
  } else {
    c = Eigen::VectorXcd::Zero(A.cols());
    y = g;
    u = Eigen::VectorXcd::Zero(n);
  }
  best = c;
  double best_obj = objective(A * c);
  const double gnorm = g.norm();

  // Track A^H y and A^H u so each sweep needs one product with A and one with A^H.
  const Eigen::VectorXcd Ag = A.adjoint() * g;
  Eigen::VectorXcd Ay = A.adjoint() * y, Au = A.adjoint() * u;
  Eigen::VectorXcd Ac(n), Ay_prev(A.cols());
  for (int it = 1; it <= cfg.max_iter; ++it) {
    const Eigen::VectorXcd c_prev = c;
    Ay_prev = Ay;
    c = llt.solve(Ag - Ay + Au);
    Ac.noalias() = A * c;
    const double thresh = 1.0 / rho;
    for (Eigen::Index k = 0; k < n; ++k) {
      const cplx q = g(k) - Ac(k) + u(k);
      y(k) = o(k) != 0.0 ? soft_threshold(q, thresh * o(k)) : q;
    }
    const Eigen::VectorXcd r = g - Ac - y;
    u += r;
    Ay.noalias() = A.adjoint() * y;
    Au += Ag - gram * c - Ay;
    // Residual balancing; u is the scaled dual, so it rescales with rho.
    const double rn = r.norm(), sn = rho * (Ay - Ay_prev).norm();
    if (rn > 10.0 * sn) {
      rho *= 2.0;
      u /= 2.0;
      Au /= 2.0;
    } else if (sn > 10.0 * rn) {
      rho /= 2.0;
      u *= 2.0;
      Au *= 2.0;
    }

    const double obj = objective(Ac);
    if (obj < best_obj) {
      best_obj = obj;
      best = c;
    }
    res.objective_trace.push_back(best_obj);
    res.iterations = it;
    // Fixed point in c, plus primal and dual residuals under the usual
    // absolute-plus-relative tolerances.
    const double dc = (c - c_prev).norm();
    const double eps_pri = cfg.tol * (std::sqrt(static_cast<double>(n)) + std::max({Ac.norm(), y.norm(), gnorm}));
    const double eps_dual = cfg.tol * (std::sqrt(static_cast<double>(A.cols())) + rho * Au.norm());
    if (dc <= cfg.tol * std::max(1.0, c.norm()) && rn <= eps_pri && sn <= eps_dual) {
      res.converged = true;
      break;
    }
  }
  res.coefficients = best;
  res.objective = best_obj;
  res.state = SolverState{c, y, u, rho};
  return res;
}

}  // namespace

HermiteModel::HermiteModel(int window_order, int model_size, const PhaseGrid& grid, const TimeAxis& axis)
    : order_(window_order), grid_(grid), axis_(axis) {
  if (window_order < 0 || model_size < 0) throw Error(ErrorCode::DomainError, "model orders must be nonnegative");
  const Signal g = hermite_signal(window_order, axis);
  atoms_.resize(static_cast<Eigen::Index>(grid.size()), model_size + 1);
  for (int j = 0; j <= model_size; ++j) {
    const TFField V = stft(hermite_signal(j, axis), g, grid);
    check_truncation(V, 1.0);
    std::copy(V.values().begin(), V.values().end(), atoms_.col(j).data());
  }
  Eigen::MatrixXcd gram(atoms_.cols(), atoms_.cols());
  kernels::parallel::gram(atoms_.data(), grid.size(), static_cast<int>(atoms_.cols()),
                          std::vector<double>(grid.size(), grid.cell_area()).data(), gram.data());
  defect_ = (gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  if (defect_ > 1e-5) throw Error(ErrorCode::TruncationRisk, "model atoms are not orthonormal on this grid");
}

TFField HermiteModel::synthesize(const Eigen::VectorXcd& c) const {
  if (c.size() != atoms_.cols()) throw Error(ErrorCode::InvalidInput, "coefficient vector has the wrong length");
  const Eigen::VectorXcd v = atoms_ * c;
  return TFField(grid_, std::vector<cplx>(v.data(), v.data() + v.size()));
}

Signal HermiteModel::signal(const Eigen::VectorXcd& c) const {
  return hermite_combination(std::vector<cplx>(c.data(), c.data() + c.size()), axis_);
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::PerfectRecovery: return "PerfectRecovery";
    case Verdict::StableInpainting: return "StableInpainting";
    case Verdict::NoGuarantee: return "NoGuarantee";
  }
  return "NoGuarantee";
}

RecoveryCertificate certify(const Region& region, int r, const std::vector<double>& radii, const PhaseGrid& grid,
                            const DensityOptions& opts) {
  if (radii.empty()) throw Error(ErrorCode::InvalidInput, "no candidate radii");
  RecoveryCertificate best;
  double best_ratio = std::numeric_limits<double>::infinity();
  for (double R : radii) {
    const double C = c_constant(r, r, R);
    const double A = a_density(region, r, R, grid, opts).value;
    if (A / C < best_ratio) {
      best_ratio = A / C;
      best.order = r;
      best.radius = R;
      best.a_density = A;
      best.c_constant = C;
    }
  }
  if (best_ratio < 0.5)
    best.verdict = Verdict::PerfectRecovery;
  else if (best_ratio < 1.0)
    best.verdict = Verdict::StableInpainting;
  else
    best.verdict = Verdict::NoGuarantee;
  best.stability_factor = best_ratio < 1.0 ? 2.0 * best.c_constant / (best.c_constant - best.a_density)
                                           : std::numeric_limits<double>::infinity();
  return best;
}

SolveResult solve_l1_sparse(const TFField& G, const HermiteModel& model, const SolverConfig& cfg) {
  return weighted_l1(G, std::vector<double>(model.grid().size(), 1.0), model, cfg);
}

SolveResult solve_inpaint_l1(const TFField& H, const Region& region, const HermiteModel& model, const SolverConfig& cfg) {
  return weighted_l1(H, observed_weights(region, model.grid()), model, cfg);
}

SolveResult solve_inpaint_l2(const TFField& H, const Region& region, const HermiteModel& model) {
  check_grid(H, model);
  const std::vector<double> obs = observed_weights(region, model.grid());
  const double dA = model.grid().cell_area();
  const Eigen::MatrixXcd& A = model.atoms();
  Eigen::MatrixXcd gram(A.cols(), A.cols());
  std::vector<double> w(obs.size());
  for (std::size_t n = 0; n < w.size(); ++n) w[n] = obs[n] * dA;
  kernels::parallel::gram(A.data(), obs.size(), static_cast<int>(A.cols()), w.data(), gram.data());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
  const double lmax = es.eigenvalues().maxCoeff();
  if (!(lmax > 0) || es.eigenvalues().minCoeff() < 1e-10 * std::max(lmax, 1.0))
    throw Error(ErrorCode::SingularSystem, "observed atoms are rank deficient");
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(A.cols());
  const auto h = as_vector(H);
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    cplx acc = 0.0;
    for (Eigen::Index n = 0; n < h.size(); ++n)
      if (w[n] != 0.0) acc += std::conj(A(n, j)) * w[n] * h(n);
    rhs(j) = acc;
  }
  SolveResult res;
  res.coefficients = es.eigenvectors() * (es.eigenvalues().cwiseInverse().cast<cplx>().asDiagonal() *
                                          (es.eigenvectors().adjoint() * rhs));
  const Eigen::VectorXcd resid = h - A * res.coefficients;
  double obj = 0.0;
  for (Eigen::Index n = 0; n < h.size(); ++n) obj += w[n] * std::norm(resid(n));
  res.objective = obj;
  res.objective_trace = {obj};
  res.iterations = 1;
  res.converged = true;
  res.state.coefficients = res.coefficients;
  return res;
}

}  // namespace tfsieve

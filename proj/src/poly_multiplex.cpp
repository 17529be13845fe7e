#include "tfsieve/poly_multiplex.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "tfsieve/error.hpp"
#include "tfsieve/kernels.hpp"
#include "tfsieve/special_fn.hpp"

namespace tfsieve {

namespace {

constexpr double kPi = std::numbers::pi;

struct XRange {
  double lo, hi;
};

XRange time_extent(const Region& region) {
  if (region.is_mask()) {
    const Mask& m = region.mask();
    const PhaseGrid& g = m.grid();
    int lo = g.nx(), hi = -1;
    for (int i = 0; i < g.nx(); ++i)
      for (int k = 0; k < g.nxi(); ++k)
        if (m.at(i, k)) {
          lo = std::min(lo, i);
          hi = std::max(hi, i);
        }
    if (hi < 0) return {0.0, 0.0};
    return {g.time.at(lo) - 0.5 * g.time.step, g.time.at(hi) + 0.5 * g.time.step};
  }
  if (region.complement()) throw Error(ErrorCode::InvalidInput, "decoupling components must be bounded");
  XRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const Shape& s : region.shapes()) {
    if (const Disc* d = std::get_if<Disc>(&s)) {
      r.lo = std::min(r.lo, d->center.time - d->radius);
      r.hi = std::max(r.hi, d->center.time + d->radius);
    } else {
      r.lo = std::min(r.lo, std::get<Rect>(s).min.time);
      r.hi = std::max(r.hi, std::get<Rect>(s).max.time);
    }
  }
  if (r.hi < r.lo) return {0.0, 0.0};
  return r;
}

Region union_of(const std::vector<Region>& parts) {
  bool all_shapes = std::all_of(parts.begin(), parts.end(), [](const Region& r) { return !r.is_mask(); });
  if (all_shapes) {
    std::vector<Shape> shapes;
    for (const Region& r : parts) shapes.insert(shapes.end(), r.shapes().begin(), r.shapes().end());
    return Region::from_shapes(std::move(shapes));
  }
  const PhaseGrid& g = parts.front().is_mask() ? parts.front().mask().grid() : parts.back().mask().grid();
  Mask m(g);
  for (int i = 0; i < g.nx(); ++i)
    for (int k = 0; k < g.nxi(); ++k) {
      bool in = false;
      for (const Region& r : parts) in = in || r.contains(g.at(i, k));
      m.set(i, k, in);
    }
  return Region::from_mask(std::move(m));
}

Eigen::MatrixXcd stft_atoms(const Signal& g, const PhaseGrid& grid, int model_size) {
  Eigen::MatrixXcd A(static_cast<Eigen::Index>(grid.size()), model_size + 1);
  for (int j = 0; j <= model_size; ++j) {
    const TFField V = stft(hermite_signal(j, g.axis), g, grid);
    std::copy(V.values().begin(), V.values().end(), A.col(j).data());
  }
  return A;
}

Eigen::MatrixXcd weighted_gram(const Eigen::MatrixXcd& A, const std::vector<double>& w) {
  Eigen::MatrixXcd G(A.cols(), A.cols());
  kernels::parallel::gram(A.data(), static_cast<std::size_t>(A.rows()), static_cast<int>(A.cols()), w.data(), G.data());
  return G;
}

ConcentrationEstimate concentration_from_atoms(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& full,
                                               const Region& region, const PhaseGrid& grid) {
  const RegionWeights rw = region_weights(region, grid);
  const Eigen::MatrixXcd G = weighted_gram(A, rw.w);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(G, full);
  if (ges.info() != Eigen::Success) throw Error(ErrorCode::SingularSystem, "model Gram matrix is not positive definite");
  ConcentrationEstimate est;
  const Eigen::Index top = G.cols() - 1;
  est.value = ges.eigenvalues()(top);
  const Eigen::VectorXcd v = ges.eigenvectors().col(top);
  const Eigen::Index tail_start = G.cols() - std::max<Eigen::Index>(1, G.cols() / 10);
  est.tail_mass = v.tail(G.cols() - tail_start).squaredNorm() / v.squaredNorm();

  const Eigen::LLT<Eigen::MatrixXcd> llt(full);
  const Eigen::MatrixXcd Linv = llt.matrixL().solve(Eigen::MatrixXcd::Identity(G.rows(), G.cols()));
  const Eigen::MatrixXcd C = Linv * G * Linv.adjoint();
  const EigenEstimate pw = power_iteration(0.5 * (C + C.adjoint()));
  est.power_value = pw.value;
  est.power_converged = pw.converged;
  return est;
}

}  // namespace

SignalVector::SignalVector(std::vector<Signal> fs) : components(std::move(fs)) {
  if (components.empty()) throw Error(ErrorCode::InvalidInput, "signal vector needs at least one component");
  for (const Signal& s : components)
    if (!s.axis.same_as(components.front().axis)) throw Error(ErrorCode::AxisMismatch, "components live on different axes");
}

FockField::FockField(const PhaseGrid& grid, std::vector<cplx> weighted) : grid_(grid), weighted_(std::move(weighted)) {
  if (weighted_.size() != grid_.size()) throw Error(ErrorCode::InvalidInput, "Fock field size does not match its grid");
}

cplx FockField::value(int i, int k) const {
  const PhasePoint z = grid_.at(i, k);
  return weighted(i, k) * std::exp(0.5 * kPi * norm2(z));
}

double FockField::lp_norm(double p) const {
  if (!(p >= 1.0)) throw Error(ErrorCode::DomainError, "p must be at least 1");
  double s = 0.0;
  for (const cplx& v : weighted_) s += std::pow(std::abs(v), p);
  return std::pow(s * grid_.cell_area(), 1.0 / p);
}

FockField true_poly_bargmann(const Signal& f, int r, const PhaseGrid& grid) {
  const TimeAxis flipped{-grid.freq.stop(), grid.freq.step, grid.freq.count};
  const TFField V = stft(f, hermite_signal(r, f.axis), PhaseGrid(grid.time, flipped));
  std::vector<cplx> w(grid.size());
  for (int i = 0; i < grid.nx(); ++i)
    for (int k = 0; k < grid.nxi(); ++k) {
      const PhasePoint z = grid.at(i, k);
      w[grid.index(i, k)] = std::polar(1.0, -kPi * z.time * z.freq) * V(i, grid.nxi() - 1 - k);
    }
  return FockField(grid, std::move(w));
}

FockField bargmann(const Signal& f, const PhaseGrid& grid) { return true_poly_bargmann(f, 0, grid); }

TFField super_stft(const SignalVector& fs, const PhaseGrid& grid) {
  if (fs.components.empty()) throw Error(ErrorCode::InvalidInput, "signal vector is empty");
  TFField out(grid);
  for (int k = 0; k <= fs.order(); ++k) {
    const Signal& f = fs.components[k];
    if (!f.axis.same_as(fs.components.front().axis)) throw Error(ErrorCode::AxisMismatch, "components live on different axes");
    out += stft(f, hermite_signal(k, f.axis), grid);
  }
  return out;
}

Signal demultiplex(const TFField& F, int k, int n, const TimeAxis& axis) {
  if (k < 0 || k > n) throw Error(ErrorCode::IndexOutOfRange, "component index outside 0..n");
  return adjoint(F, hermite_signal(k, axis));
}

MultiplexBound multiplex_sieve_bound(const Region& region, int n, double R, const PhaseGrid& grid, const TimeAxis& axis,
                                     int trials, std::uint64_t seed, const DensityOptions& opts) {
  if (n < 0) throw Error(ErrorCode::DomainError, "multiplex order must be nonnegative");
  MultiplexBound mb;
  for (int m = 0; m <= n; ++m) {
    const double c = c_constant(m, 0, R);
    if (std::abs(c) < 1e-10) throw Error(ErrorCode::DegenerateConstant, "C_{m,0}(R) vanishes");
    mb.max_inverse_c = std::max(mb.max_inverse_c, 1.0 / std::abs(c));
  }
  mb.a_density = a_density(region, 0, R, grid, opts).value;
  mb.bound = mb.max_inverse_c * mb.a_density;

  constexpr int kSpan = 6;
  std::vector<std::vector<TFField>> atoms(n + 1);
  for (int k = 0; k <= n; ++k) {
    const Signal hk = hermite_signal(k, axis);
    for (int j = 0; j < kSpan; ++j) atoms[k].push_back(stft(hermite_signal(j, axis), hk, grid));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int t = 0; t < trials; ++t) {
    TFField sum(grid);
    double parts = 0.0;
    for (int k = 0; k <= n; ++k) {
      TFField part(grid);
      for (int j = 0; j < kSpan; ++j) {
        TFField a = atoms[k][j];
        a *= cplx(normal(rng), normal(rng));
        part += a;
      }
      parts += lp_norm(part, 1.0);
      sum += part;
    }
    mb.norm_equivalence = std::max(mb.norm_equivalence, parts / lp_norm(sum, 1.0));
  }
  return mb;
}

EigenEstimate power_iteration(const Eigen::MatrixXcd& A, double tol, int max_iter) {
  EigenEstimate est;
  const Eigen::Index n = A.rows();
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(1.0 + 0.01 * i, 0.001 * i);
  v.normalize();
  double prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    Eigen::VectorXcd w = A * v;
    const double lambda = std::real(v.dot(w));
    const double nw = w.norm();
    est.iterations = it;
    est.value = lambda;
    if (nw == 0.0) {
      est.converged = true;
      return est;
    }
    v = w / nw;
    if (it > 1 && std::abs(lambda - prev) <= tol * std::max(std::abs(lambda), 1e-300)) {
      est.converged = true;
      return est;
    }
    prev = lambda;
  }
  return est;
}

ConcentrationEstimate max_concentration(const Region& region, const Signal& g, const PhaseGrid& grid, int model_size) {
  if (model_size < 0) throw Error(ErrorCode::DomainError, "model size must be nonnegative");
  const Eigen::MatrixXcd A = stft_atoms(g, grid, model_size);
  const Eigen::MatrixXcd full = weighted_gram(A, std::vector<double>(grid.size(), grid.cell_area()));
  return concentration_from_atoms(A, full, region, grid);
}

std::vector<DecouplingRow> decoupling_experiment(const std::vector<Region>& components,
                                                 const std::vector<double>& separations, const Signal& g,
                                                 const PhaseGrid& grid, int model_size) {
  if (components.empty()) throw Error(ErrorCode::InvalidInput, "no components");
  const Eigen::MatrixXcd A = stft_atoms(g, grid, model_size);
  const Eigen::MatrixXcd full = weighted_gram(A, std::vector<double>(grid.size(), grid.cell_area()));
  std::vector<XRange> ext;
  for (const Region& c : components) ext.push_back(time_extent(c));
  std::vector<DecouplingRow> rows;
  for (double d : separations) {
    if (!(d >= 0)) throw Error(ErrorCode::DomainError, "separations must be nonnegative");
    const double first = -0.5 * d * (static_cast<double>(components.size()) - 1.0);
    std::vector<Region> placed;
    for (std::size_t c = 0; c < components.size(); ++c) {
      const double mid = 0.5 * (ext[c].lo + ext[c].hi);
      placed.push_back(components[c].translated({first + static_cast<double>(c) * d - mid, 0.0}));
    }
    for (const Region& p : placed) {
      const XRange e = time_extent(p);
      if (!grid.in_window({e.lo, 0.0}) || !grid.in_window({e.hi, 0.0}))
        throw Error(ErrorCode::PatchOutsideGrid, "separated components do not fit the grid");
    }
    DecouplingRow row;
    row.separation = d;
    const ConcentrationEstimate all = concentration_from_atoms(A, full, union_of(placed), grid);
    row.combined = all.value;
    row.tail_mass = all.tail_mass;
    row.converged = all.power_converged;
    for (const Region& p : placed) {
      const ConcentrationEstimate one = concentration_from_atoms(A, full, p, grid);
      row.max_component = std::max(row.max_component, one.value);
      row.converged = row.converged && one.power_converged;
    }
    row.gap = row.combined - row.max_component;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace tfsieve

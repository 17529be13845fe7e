#include "tfsieve/gabor_discrete.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "tfsieve/error.hpp"
#include "tfsieve/special_fn.hpp"

namespace tfsieve {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sum_pow(const Eigen::VectorXcd& v, double p) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::pow(std::abs(v(i)), p);
  return s;
}

}  // namespace

void Lattice::validate() const {
  if (!(std::abs(generator.determinant()) > 1e-12)) throw Error(ErrorCode::InvalidInput, "lattice generator is singular");
  if (!(box_min.time < box_max.time) || !(box_min.freq < box_max.freq))
    throw Error(ErrorCode::InvalidInput, "lattice box min must be below max");
  if (window_order < 0) throw Error(ErrorCode::DomainError, "window order must be nonnegative");
}

PointSet Lattice::points() const { return points_in(box_min, box_max); }

PointSet Lattice::points_in(PhasePoint lo, PhasePoint hi) const {
  validate();
  const Eigen::Matrix2d inv = generator.inverse();
  // Integer coordinates of the box corners bound the search range.
  double kmin[2] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  double kmax[2] = {-kmin[0], -kmin[1]};
  for (double x : {lo.time, hi.time})
    for (double y : {lo.freq, hi.freq}) {
      const Eigen::Vector2d k = inv * Eigen::Vector2d(x, y);
      for (int d = 0; d < 2; ++d) {
        kmin[d] = std::min(kmin[d], k(d));
        kmax[d] = std::max(kmax[d], k(d));
      }
    }
  std::vector<PhasePoint> pts;
  const double eps = 1e-12;
  for (long a = static_cast<long>(std::floor(kmin[0])) - 1; a <= static_cast<long>(std::ceil(kmax[0])) + 1; ++a)
    for (long b = static_cast<long>(std::floor(kmin[1])) - 1; b <= static_cast<long>(std::ceil(kmax[1])) + 1; ++b) {
      const Eigen::Vector2d v = generator * Eigen::Vector2d(static_cast<double>(a), static_cast<double>(b));
      if (v(0) >= lo.time - eps && v(0) <= hi.time + eps && v(1) >= lo.freq - eps && v(1) <= hi.freq + eps)
        pts.push_back({v(0), v(1)});
    }
  return PointSet(std::move(pts));
}

std::vector<cplx> sample_stft(const Signal& f, int r, const PointSet& points) {
  if (r < 0) throw Error(ErrorCode::DomainError, "window order must be nonnegative");
  const TimeAxis& ax = f.axis;
  const double nyq = 0.5 / ax.step;
  for (const PhasePoint& p : points.points)
    if (p.time < ax.start || p.time > ax.stop() || std::abs(p.freq) > nyq)
      throw Error(ErrorCode::PointOutsideWindow, "sample point outside the signal's time-frequency window");
  std::vector<cplx> out(points.points.size());
#pragma omp parallel for schedule(static)
  for (std::size_t q = 0; q < out.size(); ++q) {
    const PhasePoint z = points.points[q];
    std::vector<double> buf(r + 1);
    cplx acc = 0.0;
    for (int n = 0; n < ax.count; ++n) {
      const double t = ax.at(n);
      hermite_fn_all(r, t - z.time, buf.data());
      acc += f.samples[n] * buf[r] * std::polar(1.0, -kTwoPi * z.freq * t);
    }
    out[q] = acc * ax.step;
  }
  return out;
}

DiscreteSieveBound discrete_sieve_bound(const PointSet& delta, int r, double R, double frame_lower) {
  if (!(frame_lower > 0)) throw Error(ErrorCode::DomainError, "frame lower bound must be positive");
  DiscreteSieveBound b;
  b.frame_lower = frame_lower;
  b.c_constant = c_constant(r, r, R);
  b.a_density = discrete_a_density(delta, r, R);
  b.nyquist_density = discrete_nyquist(delta, R);
  b.bound_a = b.a_density / (frame_lower * b.c_constant);
  b.bound_rho = b.nyquist_density / (frame_lower * b.c_constant);
  return b;
}

double frame_ratio(const PointSet& points, int r, double p, const std::vector<cplx>& coeffs, const TimeAxis& axis,
                   const PhaseGrid& grid) {
  if (!(p >= 1.0)) throw Error(ErrorCode::DomainError, "p must be at least 1");
  const Signal f = hermite_combination(coeffs, axis);
  const std::vector<cplx> s = sample_stft(f, r, points);
  double num = 0.0;
  for (const cplx& v : s) num += std::pow(std::abs(v), p);
  const double den = std::pow(lp_norm(stft(f, hermite_signal(r, axis), grid), p), p);
  if (!(den > 0)) throw Error(ErrorCode::ZeroSignal, "test function vanishes");
  return num / den;
}

FrameEstimate empirical_frame_lower_bound(const Lattice& lattice, double p, int trials, int model_size,
                                          const TimeAxis& axis, const PhaseGrid& grid, std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorCode::InvalidInput, "at least one trial is required");
  if (!(p >= 1.0)) throw Error(ErrorCode::DomainError, "p must be at least 1");
  if (model_size < 0) throw Error(ErrorCode::DomainError, "model size must be nonnegative");
  const int r = lattice.window_order;
  const PointSet pts = lattice.points();
  const Eigen::Index M = model_size + 1;
  const Signal g = hermite_signal(r, axis);

  Eigen::MatrixXcd S(static_cast<Eigen::Index>(pts.points.size()), M);
  Eigen::MatrixXcd A(static_cast<Eigen::Index>(grid.size()), M);
  for (Eigen::Index j = 0; j < M; ++j) {
    const Signal hj = hermite_signal(static_cast<int>(j), axis);
    const std::vector<cplx> s = sample_stft(hj, r, pts);
    std::copy(s.begin(), s.end(), S.col(j).data());
    const TFField V = stft(hj, g, grid);
    std::copy(V.values().begin(), V.values().end(), A.col(j).data());
  }
  const double dA = grid.cell_area();
  auto ratio = [&](const Eigen::VectorXcd& c) { return sum_pow(S * c, p) / (sum_pow(A * c, p) * dA); };

  std::vector<Eigen::VectorXcd> candidates;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXcd c(M);
    for (Eigen::Index j = 0; j < M; ++j) c(j) = cplx(normal(rng), normal(rng));
    candidates.push_back(c);
  }
  if (p == 2.0) {
    const Eigen::MatrixXcd num = S.adjoint() * S;
    const Eigen::MatrixXcd den = (A.adjoint() * A) * dA;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(num, den);
    if (ges.info() == Eigen::Success) candidates.push_back(ges.eigenvectors().col(0));
  }

  FrameEstimate est;
  est.trials = trials;
  est.estimate = std::numeric_limits<double>::infinity();
  Eigen::VectorXcd arg;
  for (const Eigen::VectorXcd& c : candidates) {
    const double q = ratio(c);
    if (q < est.estimate) {
      est.estimate = q;
      arg = c;
    }
  }

  // Lattice mass in a ring just outside the box, from the closed form.
  const PhasePoint pad{3.0, 3.0};
  const PointSet outer = lattice.points_in(lattice.box_min - pad, lattice.box_max + pad);
  double inside = 0.0, ring = 0.0;
  for (const PhasePoint& z : outer.points) {
    cplx v = 0.0;
    for (Eigen::Index j = 0; j < M; ++j) v += arg(j) * hermite_stft(static_cast<int>(j), r, z);
    const double m = std::pow(std::abs(v), p);
    const bool in = z.time >= lattice.box_min.time - 1e-12 && z.time <= lattice.box_max.time + 1e-12 &&
                    z.freq >= lattice.box_min.freq - 1e-12 && z.freq <= lattice.box_max.freq + 1e-12;
    (in ? inside : ring) += m;
  }
  est.tail = inside > 0 ? ring / inside : 0.0;
  est.near_zero = est.estimate < kNearZeroFrameBound * lattice.density();
  return est;
}

}  // namespace tfsieve

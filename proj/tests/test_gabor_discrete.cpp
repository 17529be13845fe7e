#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "tfsieve/error.hpp"
#include "tfsieve/gabor_discrete.hpp"
#include "tfsieve/special_fn.hpp"

using namespace tfsieve;
using tfsieve::test::kPi;

namespace {

Lattice square(double step, int r = 0) {
  Lattice L;
  L.generator = step * Eigen::Matrix2d::Identity();
  L.window_order = r;
  return L;
}

}  // namespace

TEST_CASE("sample_stft: closed form and agreement with the grid transform") {
  const TimeAxis ax = default_time_axis();
  const PhaseGrid g = default_phase_grid();
  const PointSet origin({PhasePoint{0, 0}});
  CHECK(std::abs(sample_stft(hermite_signal(0, ax), 0, origin)[0] - 1.0) < 1e-12);

  std::mt19937_64 rng(91);
  const Signal f = hermite_combination(test::random_coeffs(rng, 6), ax);
  std::vector<PhasePoint> pts;
  for (int i = 20; i < g.nx(); i += 37)
    for (int k = 10; k < g.nxi(); k += 41) pts.push_back(g.at(i, k));
  for (int r : {0, 2}) {
    const TFField V = stft(f, hermite_signal(r, ax), g);
    const std::vector<cplx> s = sample_stft(f, r, PointSet(pts));
    for (std::size_t q = 0; q < pts.size(); ++q) {
      const int i = static_cast<int>(g.time.nearest(pts[q].time)), k = static_cast<int>(g.freq.nearest(pts[q].freq));
      CHECK(std::abs(s[q] - V(i, k)) < 1e-10);
    }
    // Off-grid points against the closed form.
    const PhasePoint z{0.37, -1.21};
    cplx want = 0.0;
    const auto c = test::random_coeffs(rng, 4);
    for (int j = 0; j <= 4; ++j) want += c[j] * hermite_stft(j, r, z);
    CHECK(std::abs(sample_stft(hermite_combination(c, ax), r, PointSet({z}))[0] - want) < 1e-6);
  }
  CHECK(sample_stft(f, 0, PointSet()).empty());
  try {
    sample_stft(f, 0, PointSet({PhasePoint{9.0, 0.0}}));
    FAIL("expected PointOutsideWindow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PointOutsideWindow);
  }
  CHECK_THROWS_AS(sample_stft(f, 0, PointSet({PhasePoint{0.0, 17.0}})), Error);
}

TEST_CASE("lattice points and validation") {
  const Lattice L = square(1.0);
  CHECK(L.points().points.size() == 169);
  CHECK(square(0.5).density() == doctest::Approx(4.0));
  Lattice sheared;
  sheared.generator << 1.0, 0.5, 0.0, 1.0;
  for (const PhasePoint& p : sheared.points_in({-2, -2}, {2, 2}).points) {
    CHECK(std::abs(p.freq - std::round(p.freq)) < 1e-12);
    CHECK(std::abs(p.time - 0.5 * p.freq - std::round(p.time - 0.5 * p.freq)) < 1e-12);
  }
  Lattice bad;
  bad.generator << 1.0, 2.0, 2.0, 4.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  Lattice box = square(1.0);
  box.box_max = {-7.0, 6.0};
  CHECK_THROWS_AS(box.validate(), Error);
  CHECK_THROWS_AS(square(1.0, -1).validate(), Error);
}

TEST_CASE("discrete_sieve_bound: small examples") {
  const PointSet one({PhasePoint{0, 0}});
  const DiscreteSieveBound b = discrete_sieve_bound(one, 0, 1.0, 2.0);
  CHECK(b.a_density == doctest::Approx(1.0));
  CHECK(b.nyquist_density == doctest::Approx(1.0));
  CHECK(b.bound_a == doctest::Approx(1.0 / (2.0 * c_constant(0, 0, 1.0))));

  const DiscreteSieveBound e = discrete_sieve_bound(PointSet(), 1, 1.0, 1.0);
  CHECK(e.bound_a == 0.0);
  CHECK(e.bound_rho == 0.0);
  CHECK_THROWS_AS(discrete_sieve_bound(one, 0, 1.0, 0.0), Error);

  const PointSet pts = square(0.5).points_in({-1, -1}, {1, 1});
  double prev = std::numeric_limits<double>::infinity();
  for (double m : {0.5, 1.0, 2.0, 4.0}) {
    const DiscreteSieveBound d = discrete_sieve_bound(pts, 1, 1.0, m);
    CHECK(d.bound_a < prev);
    CHECK(d.a_density <= d.nyquist_density + 1e-12);
    CHECK(d.bound_a <= d.bound_rho + 1e-12);
    prev = d.bound_a;
  }
}

TEST_CASE("frame_ratio is a single quotient") {
  const TimeAxis ax = default_time_axis();
  const PhaseGrid g = default_phase_grid();
  const PointSet pts = square(0.5).points_in({-3, -3}, {3, 3});
  std::mt19937_64 rng(92);
  const auto c = test::random_coeffs(rng, 3);
  for (double p : {1.0, 2.0}) {
    const Signal f = hermite_combination(c, ax);
    double num = 0.0;
    for (const cplx& v : sample_stft(f, 1, pts)) num += std::pow(std::abs(v), p);
    const double den = std::pow(lp_norm(stft(f, hermite_signal(1, ax), g), p), p);
    CHECK(frame_ratio(pts, 1, p, c, ax, g) == doctest::Approx(num / den).epsilon(1e-12));
  }
  CHECK_THROWS_AS(frame_ratio(pts, 0, 0.5, c, ax, g), Error);
  CHECK_THROWS_AS(frame_ratio(pts, 0, 2.0, {0.0, 0.0}, ax, g), Error);
}

TEST_CASE("frame estimates: critical and oversampled Gaussian lattices") {
  const TimeAxis ax = default_time_axis();
  const PhaseGrid g = default_phase_grid();
  const FrameEstimate critical = empirical_frame_lower_bound(square(1.0), 2.0, 8, 40, ax, g);
  CHECK(critical.near_zero);
  const FrameEstimate over = empirical_frame_lower_bound(square(0.5), 2.0, 8, 30, ax, g);
  CHECK_FALSE(over.near_zero);
  CHECK(over.estimate > kNearZeroFrameBound * 4.0);
  CHECK(over.estimate <= 4.0 * 1.01);
  CHECK(over.tail < 1e-6);
  CHECK(over.trials == 8);
  const FrameEstimate p1 = empirical_frame_lower_bound(square(0.5), 1.0, 8, 10, ax, g);
  CHECK(p1.estimate > 0.0);
  CHECK_THROWS_AS(empirical_frame_lower_bound(square(0.5), 2.0, 0, 10, ax, g), Error);
}

TEST_CASE("discrete sieve bounds are sound") {
  const TimeAxis ax = default_time_axis();
  const PhaseGrid g = default_phase_grid();
  std::mt19937_64 rng(93);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int t = 0; t < 8; ++t) {
    const PhasePoint c{u(rng), u(rng)};
    const double step = t % 2 ? 0.5 : 0.25;
    const PointSet delta = square(step).points_in({c.time - 0.6, c.freq - 0.6}, {c.time + 0.6, c.freq + 0.6});
    const int r = t % 3;
    for (double p : {1.0, 2.0}) {
      const DiscreteSieveBound b = discrete_sieve_bound(delta, r, 1.0, 1.0);
      const Signal f = hermite_combination(test::random_coeffs(rng, 6), ax);
      double mass = 0.0;
      for (const cplx& v : sample_stft(f, r, delta)) mass += std::pow(std::abs(v), p);
      CHECK(mass <= b.bound_a * std::pow(lp_norm(stft(f, hermite_signal(r, ax), g), p), p) * (1 + 1e-6));
    }
  }
}

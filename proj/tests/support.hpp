#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "tfsieve/region_density.hpp"
#include "tfsieve/tf_grid.hpp"

namespace tfsieve::test {

inline constexpr double kPi = std::numbers::pi;

inline std::vector<cplx> random_coeffs(std::mt19937_64& rng, int n, bool normalize = true) {
  std::normal_distribution<double> nd;
  std::vector<cplx> c(n + 1);
  double s = 0.0;
  for (auto& v : c) {
    v = cplx(nd(rng), nd(rng));
    s += std::norm(v);
  }
  if (normalize)
    for (auto& v : c) v /= std::sqrt(s);
  return c;
}

inline double l2_distance(const Signal& a, const Signal& b) {
  double s = 0.0;
  for (std::size_t n = 0; n < a.samples.size(); ++n) s += std::norm(a.samples[n] - b.samples[n]);
  return std::sqrt(s * a.axis.step);
}

// Raster with exactly `cells` cells, grown from a seed by random accretion.
inline Mask random_blob(const PhaseGrid& g, std::size_t cells, std::mt19937_64& rng, double spread) {
  Mask m(g);
  std::uniform_real_distribution<double> u(-spread, spread);
  const int ci = static_cast<int>(g.time.nearest(u(rng))), ck = static_cast<int>(g.freq.nearest(u(rng)));
  std::vector<std::pair<int, int>> frontier{{ci, ck}};
  std::size_t n = 0;
  while (n < cells && !frontier.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, frontier.size() - 1);
    const std::size_t idx = pick(rng);
    const auto [i, k] = frontier[idx];
    frontier[idx] = frontier.back();
    frontier.pop_back();
    if (i < 0 || k < 0 || i >= g.nx() || k >= g.nxi() || m.at(i, k)) continue;
    m.set(i, k, true);
    ++n;
    frontier.push_back({i + 1, k});
    frontier.push_back({i - 1, k});
    frontier.push_back({i, k + 1});
    frontier.push_back({i, k - 1});
  }
  return m;
}

// Raster of an arbitrary predicate trimmed or padded (by nearest outside
// cells to the origin) to exactly `cells` cells.
template <class Pred>
Mask exact_count_mask(const PhaseGrid& g, std::size_t cells, Pred inside) {
  std::vector<std::pair<double, std::size_t>> in, out;
  for (int i = 0; i < g.nx(); ++i)
    for (int k = 0; k < g.nxi(); ++k) {
      const PhasePoint p = g.at(i, k);
      (inside(p) ? in : out).push_back({norm2(p), g.index(i, k)});
    }
  std::sort(in.begin(), in.end());
  std::sort(out.begin(), out.end());
  std::vector<std::uint8_t> c(g.size(), 0);
  std::size_t n = 0;
  for (const auto& v : in)
    if (n < cells) c[v.second] = 1, ++n;
  for (const auto& v : out)
    if (n < cells) c[v.second] = 1, ++n;
  return Mask(g, std::move(c));
}

inline Mask scattered_mask(const PhaseGrid& g, std::size_t cells, double half_box, std::mt19937_64& rng) {
  std::vector<std::size_t> pool;
  for (int i = 0; i < g.nx(); ++i)
    for (int k = 0; k < g.nxi(); ++k) {
      const PhasePoint p = g.at(i, k);
      if (std::abs(p.time) <= half_box && std::abs(p.freq) <= half_box) pool.push_back(g.index(i, k));
    }
  std::shuffle(pool.begin(), pool.end(), rng);
  std::vector<std::uint8_t> c(g.size(), 0);
  for (std::size_t n = 0; n < std::min(cells, pool.size()); ++n) c[pool[n]] = 1;
  return Mask(g, std::move(c));
}

// The ten region families of the soundness suite, randomized.
inline Region region_archetype(int kind, const PhaseGrid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto ur = [&](double a, double b) { return a + (b - a) * 0.5 * (u(rng) + 1.0); };
  switch (kind % 10) {
    case 0:
      return disc_region({ur(-2, 2), ur(-2, 2)}, ur(0.3, 2.0));
    case 1: {
      const PhasePoint lo{ur(-3, 0), ur(-3, 0)};
      return Region::from_shapes({Rect{lo, {lo.time + ur(0.3, 3), lo.freq + ur(0.3, 3)}}});
    }
    case 2:
      return Region::from_shapes({Disc{{ur(-3, -1), ur(-1, 1)}, ur(0.3, 1)}, Disc{{ur(1, 3), ur(-1, 1)}, ur(0.3, 1)}});
    case 3:
      return Region::from_shapes({Disc{{ur(-1, 1), ur(-1, 1)}, ur(0.5, 1.5)},
                                  Rect{{ur(-2, 0), ur(-2, 0)}, {ur(0.2, 2), ur(0.2, 2)}}});
    case 4: {
      const double x = ur(-2, 2), w = ur(0.1, 0.4);
      return Region::from_shapes({Rect{{x, -4.0}, {x + w, 4.0}}});
    }
    case 5:
      return Region::from_shapes({Disc{{ur(-0.5, 0.5), ur(-0.5, 0.5)}, ur(2.0, 4.0)}}, true);
    case 6: {
      const double r0 = ur(0.5, 1.5), r1 = r0 + ur(0.2, 1.0);
      Mask m(g);
      for (int i = 0; i < g.nx(); ++i)
        for (int k = 0; k < g.nxi(); ++k) {
          const double d = std::sqrt(norm2(g.at(i, k)));
          m.set(i, k, d >= r0 && d <= r1);
        }
      return Region::from_mask(std::move(m));
    }
    case 7: {
      const double box = ur(1.0, 3.0);
      const std::size_t cells = static_cast<std::size_t>(ur(0.1, 0.5) * 4 * box * box / g.cell_area());
      return Region::from_mask(scattered_mask(g, cells, box, rng));
    }
    case 8: {
      const double s = ur(0.3, 1.0);
      Mask m(g);
      for (int i = 0; i < g.nx(); ++i)
        for (int k = 0; k < g.nxi(); ++k) {
          const PhasePoint p = g.at(i, k);
          if (std::abs(p.time) > 3 || std::abs(p.freq) > 3) continue;
          m.set(i, k, (static_cast<long>(std::floor(p.time / s)) + static_cast<long>(std::floor(p.freq / s))) % 2 == 0);
        }
      return Region::from_mask(std::move(m));
    }
    default: {
      std::vector<Shape> ds;
      const PhasePoint c{ur(-1, 1), ur(-1, 1)};
      for (int n = 0; n < 3; ++n) ds.emplace_back(Disc{{c.time + ur(-1.5, 1.5), c.freq + ur(-1.5, 1.5)}, ur(0.2, 0.6)});
      return Region::from_shapes(std::move(ds));
    }
  }
}

}  // namespace tfsieve::test

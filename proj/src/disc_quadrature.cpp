#include "tfsieve/disc_quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tfsieve/error.hpp"

namespace tfsieve {

namespace {

constexpr int kGaussPoints = 16;

struct GaussRule {
  std::vector<double> x, w;  // on [-1, 1]
  GaussRule() {
    using G = boost::math::quadrature::gauss<double, kGaussPoints>;
    const auto& a = G::abscissa();
    const auto& wt = G::weights();
    for (std::size_t i = 0; i < a.size(); ++i) {
      x.push_back(a[i]);
      w.push_back(wt[i]);
      if (a[i] != 0.0) {
        x.push_back(-a[i]);
        w.push_back(wt[i]);
      }
    }
  }
};

const GaussRule& gauss_rule() {
  static const GaussRule rule;
  return rule;
}

double horner(const std::vector<double>& c, double u) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + *it;
  return acc;
}

// Lagrange basis on integer nodes -m..m in the scaled variable u = (x - node) / step.
struct LagrangeBasis {
  int m;
  std::vector<std::vector<double>> poly, antideriv;
  std::vector<double> full;  // integral over the cell [-1/2, 1/2]

  explicit LagrangeBasis(int order) : m(order) {
    for (int a = -m; a <= m; ++a) {
      std::vector<double> c{1.0};
      for (int b = -m; b <= m; ++b) {
        if (b == a) continue;
        std::vector<double> next(c.size() + 1, 0.0);
        const double inv = 1.0 / (a - b);
        for (std::size_t k = 0; k < c.size(); ++k) {
          next[k] += -b * inv * c[k];
          next[k + 1] += inv * c[k];
        }
        c = std::move(next);
      }
      std::vector<double> ic(c.size() + 1, 0.0);
      for (std::size_t k = 0; k < c.size(); ++k) ic[k + 1] = c[k] / (k + 1.0);
      poly.push_back(c);
      full.push_back(horner(ic, 0.5) - horner(ic, -0.5));
      antideriv.push_back(std::move(ic));
    }
  }
  int width() const { return 2 * m + 1; }
};

void check_order(int m) {
  if (m < 0 || m > 6) throw Error(ErrorCode::InvalidInput, "quadrature order must be in [0, 6]");
}

PatchWeights make_patch(const PhaseGrid& grid, int i0, int i1, int k0, int k1) {
  if (i0 < 0 || k0 < 0 || i1 >= grid.nx() || k1 >= grid.nxi())
    throw Error(ErrorCode::PatchOutsideGrid, "quadrature stencil leaves the grid");
  PatchWeights p;
  p.i0 = i0;
  p.k0 = k0;
  p.ni = i1 - i0 + 1;
  p.nk = k1 - k0 + 1;
  p.w.assign(static_cast<std::size_t>(p.ni) * p.nk, 0.0);
  return p;
}

// Weights along one axis for the interval [a, b], indexed from the returned offset.
std::vector<double> interval_weights(const TimeAxis& ax, double a, double b, const LagrangeBasis& L, int& first) {
  const double h = ax.step;
  const long lo = ax.nearest(a) - 1, hi = ax.nearest(b) + 1;
  first = static_cast<int>(lo) - L.m;
  std::vector<double> w(static_cast<std::size_t>(hi - lo + 1 + 2 * L.m), 0.0);
  for (long i = lo; i <= hi; ++i) {
    const double x = ax.start + i * h;
    const double ca = std::max(a, x - 0.5 * h), cb = std::min(b, x + 0.5 * h);
    if (cb <= ca) continue;
    const double ua = (ca - x) / h, ub = (cb - x) / h;
    for (int c = 0; c < L.width(); ++c)
      w[static_cast<std::size_t>(i - lo + c)] += (horner(L.antideriv[c], ub) - horner(L.antideriv[c], ua)) * h;
  }
  return w;
}

}  // namespace

double PatchWeights::sum() const { return std::accumulate(w.begin(), w.end(), 0.0); }

PatchWeights disc_weights(const PhaseGrid& grid, PhasePoint center, double radius, int m) {
  check_order(m);
  if (!(radius > 0)) throw Error(ErrorCode::DomainError, "disc radius must be positive");
  const LagrangeBasis L(m);
  const int W = L.width();
  const double hx = grid.time.step, hy = grid.freq.step;
  const double cx = center.time, cy = center.freq, R = radius, R2 = radius * radius;

  const long ilo = grid.time.nearest(cx - R) - 1, ihi = grid.time.nearest(cx + R) + 1;
  const long klo = grid.freq.nearest(cy - R) - 1, khi = grid.freq.nearest(cy + R) + 1;
  PatchWeights P = make_patch(grid, static_cast<int>(ilo) - m, static_cast<int>(ihi) + m, static_cast<int>(klo) - m,
                              static_cast<int>(khi) + m);
  const GaussRule& G = gauss_rule();
  std::vector<double> lx(W), ly(W), local(static_cast<std::size_t>(W) * W);

  for (long i = ilo; i <= ihi; ++i) {
    const double x0 = grid.time.at(static_cast<int>(i));
    const double dxc = std::abs(x0 - cx);
    for (long k = klo; k <= khi; ++k) {
      const double y0 = grid.freq.at(static_cast<int>(k));
      const double dyc = std::abs(y0 - cy);
      const double nx = std::max(dxc - 0.5 * hx, 0.0), ny = std::max(dyc - 0.5 * hy, 0.0);
      if (nx * nx + ny * ny >= R2) continue;
      const double fx = dxc + 0.5 * hx, fy = dyc + 0.5 * hy;
      std::fill(local.begin(), local.end(), 0.0);
      if (fx * fx + fy * fy <= R2) {
        for (int a = 0; a < W; ++a)
          for (int b = 0; b < W; ++b) local[a * W + b] = L.full[a] * L.full[b] * hx * hy;
      } else {
        const double xa = x0 - 0.5 * hx, xb = x0 + 0.5 * hx, ya = y0 - 0.5 * hy, yb = y0 + 0.5 * hy;
        const double lo = std::max(xa, cx - R), hi = std::min(xb, cx + R);
        if (lo >= hi) continue;
        const double ta = std::asin(std::clamp((lo - cx) / R, -1.0, 1.0));
        const double tb = std::asin(std::clamp((hi - cx) / R, -1.0, 1.0));
        std::vector<double> bps{ta, tb};
        for (double yy : {ya, yb}) {
          const double c = std::abs(yy - cy) / R;
          if (c < 1.0) {
            const double t = std::acos(c);
            for (double s : {t, -t})
              if (s > ta && s < tb) bps.push_back(s);
          }
        }
        std::sort(bps.begin(), bps.end());
        for (std::size_t p = 0; p + 1 < bps.size(); ++p) {
          const double a = bps[p], b = bps[p + 1];
          if (b <= a) continue;
          for (std::size_t g = 0; g < G.x.size(); ++g) {
            const double th = 0.5 * (b - a) * G.x[g] + 0.5 * (a + b);
            const double wt = 0.5 * (b - a) * G.w[g];
            const double x = cx + R * std::sin(th);
            const double half = R * std::cos(th);
            const double yl = std::max(ya, cy - half), yu = std::min(yb, cy + half);
            if (yu <= yl) continue;
            const double dx = half * wt;
            const double ux = (x - x0) / hx, ul = (yl - y0) / hy, uu = (yu - y0) / hy;
            for (int c = 0; c < W; ++c) {
              lx[c] = horner(L.poly[c], ux) * dx;
              ly[c] = (horner(L.antideriv[c], uu) - horner(L.antideriv[c], ul)) * hy;
            }
            for (int c = 0; c < W; ++c)
              for (int e = 0; e < W; ++e) local[c * W + e] += lx[c] * ly[e];
          }
        }
      }
      for (int a = 0; a < W; ++a)
        for (int b = 0; b < W; ++b) {
          const std::size_t idx = static_cast<std::size_t>(i - m + a - P.i0) * P.nk + (k - m + b - P.k0);
          P.w[idx] += local[a * W + b];
        }
    }
  }
  return P;
}

PatchWeights rect_weights(const PhaseGrid& grid, PhasePoint lo, PhasePoint hi, int m) {
  check_order(m);
  if (!(lo.time < hi.time) || !(lo.freq < hi.freq)) throw Error(ErrorCode::DomainError, "rectangle min must be below max");
  const LagrangeBasis L(m);
  int fx = 0, fy = 0;
  const std::vector<double> wx = interval_weights(grid.time, lo.time, hi.time, L, fx);
  const std::vector<double> wy = interval_weights(grid.freq, lo.freq, hi.freq, L, fy);
  PatchWeights P = make_patch(grid, fx, fx + static_cast<int>(wx.size()) - 1, fy, fy + static_cast<int>(wy.size()) - 1);
  for (int a = 0; a < P.ni; ++a)
    for (int b = 0; b < P.nk; ++b) P.w[static_cast<std::size_t>(a) * P.nk + b] = wx[a] * wy[b];
  return P;
}

}  // namespace tfsieve

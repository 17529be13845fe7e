#include "tfsieve/region_density.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>

#include "tfsieve/error.hpp"
#include "tfsieve/kernels.hpp"
#include "tfsieve/special_fn.hpp"

namespace tfsieve {

namespace {

constexpr double kPi = std::numbers::pi;

bool shape_contains(const Shape& s, PhasePoint p) {
  if (const Disc* d = std::get_if<Disc>(&s)) return norm2(p - d->center) <= d->radius * d->radius;
  const Rect& r = std::get<Rect>(s);
  return p.time >= r.min.time && p.time <= r.max.time && p.freq >= r.min.freq && p.freq <= r.max.freq;
}

void validate_shape(const Shape& s) {
  if (const Disc* d = std::get_if<Disc>(&s)) {
    if (!(d->radius > 0) || !std::isfinite(d->radius)) throw Error(ErrorCode::InvalidInput, "disc radius must be positive");
    return;
  }
  const Rect& r = std::get<Rect>(s);
  if (!(r.min.time < r.max.time) || !(r.min.freq < r.max.freq))
    throw Error(ErrorCode::InvalidInput, "rectangle min must be below max componentwise");
}

struct Box {
  double x0, x1, y0, y1;
};

Box bounds(const Shape& s) {
  if (const Disc* d = std::get_if<Disc>(&s))
    return {d->center.time - d->radius, d->center.time + d->radius, d->center.freq - d->radius, d->center.freq + d->radius};
  const Rect& r = std::get<Rect>(s);
  return {r.min.time, r.max.time, r.min.freq, r.max.freq};
}

bool disjoint(const Shape& a, const Shape& b) {
  const Disc* da = std::get_if<Disc>(&a);
  const Disc* db = std::get_if<Disc>(&b);
  if (da && db) return std::sqrt(norm2(da->center - db->center)) >= da->radius + db->radius;
  if (da || db) {
    const Disc& d = da ? *da : *db;
    const Rect& r = std::get<Rect>(da ? b : a);
    const double dx = std::max({r.min.time - d.center.time, 0.0, d.center.time - r.max.time});
    const double dy = std::max({r.min.freq - d.center.freq, 0.0, d.center.freq - r.max.freq});
    return dx * dx + dy * dy >= d.radius * d.radius;
  }
  const Box x = bounds(a), y = bounds(b);
  return x.x1 <= y.x0 || y.x1 <= x.x0 || x.y1 <= y.y0 || y.y1 <= x.y0;
}

std::vector<double> binary_weights(const Region& region, const PhaseGrid& grid) {
  const Mask m = rasterize(region, grid);
  std::vector<double> w(grid.size());
  for (std::size_t n = 0; n < w.size(); ++n) w[n] = m.cells()[n] ? grid.cell_area() : 0.0;
  return w;
}

// F(s) = int_0^s profile(u) u du, tabulated with its derivative and read
// back by cubic Hermite interpolation.
class RadialMass {
 public:
  RadialMass(double support, const std::function<double(double)>& profile, const std::vector<double>& kinks)
      : support_(support), profile_(profile) {
    constexpr int kNodes = 4096;
    h_ = support / kNodes;
    F_.assign(kNodes + 1, 0.0);
    dF_.assign(kNodes + 1, 0.0);
    using G = boost::math::quadrature::gauss<double, 15>;
    auto integrand = [&](double u) { return profile_(u) * u; };
    for (int n = 1; n <= kNodes; ++n) {
      double a = (n - 1) * h_, acc = 0.0;
      const double b = n * h_;
      for (double c : kinks)
        if (c > a && c < b) {
          acc += G::integrate(integrand, a, c);
          a = c;
        }
      F_[n] = F_[n - 1] + acc + G::integrate(integrand, a, b);
    }
    for (int n = 0; n <= kNodes; ++n) dF_[n] = integrand(n * h_);
  }

  double operator()(double s) const {
    if (s <= 0.0) return 0.0;
    if (s >= support_) return F_.back();
    const double u = s / h_;
    const int n = std::min(static_cast<int>(u), static_cast<int>(F_.size()) - 2);
    const double t = u - n, t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * F_[n] + (t3 - 2 * t2 + t) * h_ * dF_[n] + (-2 * t3 + 3 * t2) * F_[n + 1] +
           (t3 - t2) * h_ * dF_[n + 1];
  }

 private:
  double support_, h_;
  std::function<double(double)> profile_;
  std::vector<double> F_, dF_;
};

using Interval = std::pair<double, double>;

void ray_shape(const Shape& sh, PhasePoint z, double ux, double uy, double R, std::vector<Interval>& out) {
  if (const Disc* d = std::get_if<Disc>(&sh)) {
    const double px = z.time - d->center.time, py = z.freq - d->center.freq;
    const double b = ux * px + uy * py, c = px * px + py * py - d->radius * d->radius;
    const double disc = b * b - c;
    if (disc <= 0) return;
    const double q = std::sqrt(disc);
    const double lo = std::max(0.0, -b - q), hi = std::min(R, -b + q);
    if (lo < hi) out.push_back({lo, hi});
    return;
  }
  const Rect& r = std::get<Rect>(sh);
  double lo = 0.0, hi = R;
  const double o[2] = {z.time, z.freq}, u[2] = {ux, uy}, mn[2] = {r.min.time, r.min.freq}, mx[2] = {r.max.time, r.max.freq};
  for (int a = 0; a < 2; ++a) {
    if (std::abs(u[a]) < 1e-300) {
      if (o[a] < mn[a] || o[a] > mx[a]) return;
      continue;
    }
    double t0 = (mn[a] - o[a]) / u[a], t1 = (mx[a] - o[a]) / u[a];
    if (t0 > t1) std::swap(t0, t1);
    lo = std::max(lo, t0);
    hi = std::min(hi, t1);
  }
  if (lo < hi) out.push_back({lo, hi});
}

// Mass of Delta cap window cap (z + D_R) under the radial profile, by the
// periodic trapezoid rule in angle and exact ray intervals in radius.
double polar_mass(const Region& region, const Rect& window, PhasePoint z, double R, const RadialMass& F, int nangles) {
  std::vector<Interval> iv, merged;
  double total = 0.0;
  for (int a = 0; a < nangles; ++a) {
    const double th = 2.0 * kPi * (a + 0.5) / nangles;
    const double ux = std::cos(th), uy = std::sin(th);
    iv.clear();
    for (const Shape& sh : region.shapes()) ray_shape(sh, z, ux, uy, R, iv);
    std::sort(iv.begin(), iv.end());
    merged.clear();
    for (const Interval& v : iv) {
      if (!merged.empty() && v.first <= merged.back().second)
        merged.back().second = std::max(merged.back().second, v.second);
      else
        merged.push_back(v);
    }
    if (region.complement()) {
      std::vector<Interval> comp;
      double cur = 0.0;
      for (const Interval& v : merged) {
        if (v.first > cur) comp.push_back({cur, v.first});
        cur = std::max(cur, v.second);
      }
      if (cur < R) comp.push_back({cur, R});
      merged.swap(comp);
    }
    std::vector<Interval> win;
    ray_shape(window, z, ux, uy, R, win);
    if (win.empty()) continue;
    double ray = 0.0;
    for (const Interval& v : merged) {
      const double lo = std::max(v.first, win[0].first), hi = std::min(v.second, win[0].second);
      if (lo < hi) ray += F(hi) - F(lo);
    }
    total += ray;
  }
  return total * 2.0 * kPi / nangles;
}

struct Refined {
  double value = 0.0;
  double error = 0.0;
  PhasePoint argmax;
};

// Compass search for the sup of polar_mass from the given starting centres.
Refined refine_sup(const Region& region, const PhaseGrid& grid, const std::vector<PhasePoint>& starts, double h0,
                   double R, const RadialMass& F) {
  const Rect window{{grid.time.start - 0.5 * grid.time.step, grid.freq.start - 0.5 * grid.freq.step},
                    {grid.time.stop() + 0.5 * grid.time.step, grid.freq.stop() + 0.5 * grid.freq.step}};
  constexpr int kAngles = 2048;
  std::vector<Refined> best(starts.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t c = 0; c < starts.size(); ++c) {
    PhasePoint z = starts[c];
    double v = polar_mass(region, window, z, R, F, kAngles);
    double step = h0;
    int evals = 0;
    while (step > 1e-3 * h0 && evals < 400) {
      bool moved = false;
      for (int d = 0; d < 8 && !moved; ++d) {
        const double th = kPi * d / 4.0;
        const PhasePoint y{z.time + step * std::cos(th), z.freq + step * std::sin(th)};
        if (!grid.in_window(y)) continue;
        const double vy = polar_mass(region, window, y, R, F, kAngles);
        ++evals;
        if (vy > v + 1e-14) {
          z = y;
          v = vy;
          moved = true;
        }
      }
      if (!moved) step *= 0.5;
    }
    best[c].value = v;
    best[c].argmax = z;
    // Angular rule error plus the variation left at the final search scale.
    double drop = 0.0;
    for (int d = 0; d < 8; ++d) {
      const double th = kPi * d / 4.0;
      const PhasePoint y{z.time + 2 * step * std::cos(th), z.freq + 2 * step * std::sin(th)};
      if (grid.in_window(y)) drop = std::max(drop, v - polar_mass(region, window, y, R, F, kAngles));
    }
    best[c].error = std::abs(v - polar_mass(region, window, z, R, F, kAngles / 2)) + drop + 1e-12;
  }
  Refined out;
  for (const Refined& b : best)
    if (b.value > out.value) out = b;
  return out;
}

// sup over fine-grid centres of sum_w mask(w) profile(|z - w|) dA.
DensityResult sliding_sup(const Region& region, const PhaseGrid& grid, int oversample, double support,
                          const std::function<double(double)>& profile, double lipschitz,
                          const std::vector<double>& kinks) {
  if (oversample < 1) throw Error(ErrorCode::InvalidInput, "oversample must be positive");
  const PhaseGrid fine = grid.refined(oversample);
  const Mask mask = rasterize(region, fine);
  const int nx = fine.nx(), ny = fine.nxi();
  int bi0 = nx, bi1 = -1, bk0 = ny, bk1 = -1;
  for (int i = 0; i < nx; ++i)
    for (int k = 0; k < ny; ++k)
      if (mask.at(i, k)) {
        bi0 = std::min(bi0, i);
        bi1 = std::max(bi1, i);
        bk0 = std::min(bk0, k);
        bk1 = std::max(bk1, k);
      }
  DensityResult res;
  if (bi1 < 0) return res;

  const double hx = fine.time.step, hy = fine.freq.step;
  const int half = static_cast<int>(std::max(std::floor(support / hx + 1e-9), std::floor(support / hy + 1e-9)));
  const int w = 2 * half + 1;
  std::vector<double> stencil(static_cast<std::size_t>(w) * w, 0.0);
  const double lim = support * (1.0 + 1e-12);
  for (int a = -half; a <= half; ++a)
    for (int b = -half; b <= half; ++b) {
      const double d = std::hypot(a * hx, b * hy);
      if (d <= lim) stencil[static_cast<std::size_t>(a + half) * w + (b + half)] = profile(d);
    }

  const int i0 = std::max(0, bi0 - half), i1 = std::min(nx - 1, bi1 + half);
  const int k0 = std::max(0, bk0 - half), k1 = std::min(ny - 1, bk1 + half);
  const int n0 = i1 - i0 + 1, n1 = k1 - k0 + 1;
  std::vector<double> img(static_cast<std::size_t>(n0) * n1), out(img.size());
  for (int i = 0; i < n0; ++i)
    for (int k = 0; k < n1; ++k) img[static_cast<std::size_t>(i) * n1 + k] = mask.at(i0 + i, k0 + k) ? 1.0 : 0.0;
  kernels::correlate(img.data(), n0, n1, stencil.data(), half, out.data());

  std::size_t best = 0;
  for (std::size_t n = 1; n < out.size(); ++n)
    if (out[n] > out[best] + 1e-9) best = n;
  const int bi = static_cast<int>(best / n1), bk = static_cast<int>(best % n1);
  res.value = std::max(out[best], 0.0) * hx * hy;
  res.argmax = fine.at(i0 + bi, k0 + bk);
  res.edge_effect = bi0 - half < 0 || bk0 - half < 0 || bi1 + half >= nx || bk1 + half >= ny;

  // Raster error: half a cell per boundary cell of the region inside the
  // window and of the window disc itself, plus the centre-sampling error.
  const double kmax = *std::max_element(stencil.begin(), stencil.end());
  std::size_t edge_cells = 0;
  const int ci = i0 + bi, ck = k0 + bk;
  for (int a = -half; a <= half; ++a)
    for (int b = -half; b <= half; ++b) {
      const int i = ci + a, k = ck + b;
      if (i < 1 || k < 1 || i >= nx - 1 || k >= ny - 1) continue;
      if (stencil[static_cast<std::size_t>(a + half) * w + (b + half)] == 0.0 || !mask.at(i, k)) continue;
      if (!mask.at(i - 1, k) || !mask.at(i + 1, k) || !mask.at(i, k - 1) || !mask.at(i, k + 1)) ++edge_cells;
    }
  const double diag = std::hypot(hx, hy);
  const double ring = 2.0 * kPi * support / std::min(hx, hy);
  res.error_estimate = 0.5 * (static_cast<double>(edge_cells) + ring) * hx * hy * kmax +
                       0.5 * diag * lipschitz * std::min(res.value / std::max(kmax, 1e-300), kPi * support * support);
  if (region.is_mask()) return res;

  // Shape regions: the raster picks candidate centres, the polar rule
  // evaluates them without raster error.
  std::vector<std::pair<double, std::size_t>> cand;
  const double floor_value = out[best] - 2.0 * res.error_estimate / (hx * hy);
  for (int i = 0; i < n0; ++i)
    for (int k = 0; k < n1; ++k) {
      const std::size_t n = static_cast<std::size_t>(i) * n1 + k;
      if (out[n] < floor_value) continue;
      bool peak = true;
      for (int a = -1; a <= 1 && peak; ++a)
        for (int b = -1; b <= 1 && peak; ++b) {
          const int ii = i + a, kk = k + b;
          if ((a || b) && ii >= 0 && kk >= 0 && ii < n0 && kk < n1 && out[static_cast<std::size_t>(ii) * n1 + kk] > out[n])
            peak = false;
        }
      if (peak) cand.push_back({out[n], n});
    }
  std::sort(cand.begin(), cand.end(), [](const auto& x, const auto& y) { return x.first > y.first || (x.first == y.first && x.second < y.second); });
  std::vector<PhasePoint> starts;
  for (const auto& c : cand) {
    const PhasePoint p = fine.at(i0 + static_cast<int>(c.second / n1), k0 + static_cast<int>(c.second % n1));
    bool near = false;
    for (const PhasePoint& q : starts) near = near || norm2(p - q) < 4.0 * diag * diag;
    if (!near) starts.push_back(p);
    if (starts.size() >= 6) break;
  }
  const RadialMass F(support, profile, kinks);
  const Refined ref = refine_sup(region, grid, starts, std::min(hx, hy), support, F);
  res.value = ref.value;
  res.argmax = ref.argmax;
  res.error_estimate = ref.error;
  return res;
}

}  // namespace

Mask::Mask(const PhaseGrid& grid) : grid_(grid), cells_(grid.size(), 0) {}

Mask::Mask(const PhaseGrid& grid, std::vector<std::uint8_t> cells) : grid_(grid), cells_(std::move(cells)) {
  if (cells_.size() != grid_.size()) throw Error(ErrorCode::InvalidInput, "mask size does not match its grid");
  for (auto& c : cells_) {
    if (c > 1) throw Error(ErrorCode::InvalidInput, "mask values must be 0 or 1");
  }
}

std::size_t Mask::count() const { return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), 1)); }

Region Region::from_shapes(std::vector<Shape> shapes, bool complement) {
  for (const Shape& s : shapes) validate_shape(s);
  Region r;
  r.shapes_ = std::move(shapes);
  r.complement_ = complement;
  return r;
}

Region Region::from_mask(Mask mask) {
  Region r;
  r.mask_ = std::move(mask);
  return r;
}

bool Region::contains(PhasePoint p) const {
  if (mask_) {
    const PhaseGrid& g = mask_->grid();
    const long i = g.time.nearest(p.time), k = g.freq.nearest(p.freq);
    if (i < 0 || k < 0 || i >= g.nx() || k >= g.nxi()) return false;
    return mask_->at(static_cast<int>(i), static_cast<int>(k));
  }
  bool in = false;
  for (const Shape& s : shapes_) {
    if (shape_contains(s, p)) {
      in = true;
      break;
    }
  }
  return in != complement_;
}

Region Region::translated(PhasePoint offset) const {
  if (mask_) {
    const PhaseGrid& g = mask_->grid();
    const long di = std::lround(offset.time / g.time.step), dk = std::lround(offset.freq / g.freq.step);
    Mask m(g);
    for (int i = 0; i < g.nx(); ++i)
      for (int k = 0; k < g.nxi(); ++k) {
        const long si = i - di, sk = k - dk;
        if (si >= 0 && sk >= 0 && si < g.nx() && sk < g.nxi()) m.set(i, k, mask_->at(static_cast<int>(si), static_cast<int>(sk)));
      }
    return from_mask(std::move(m));
  }
  std::vector<Shape> moved;
  for (const Shape& s : shapes_) {
    if (const Disc* d = std::get_if<Disc>(&s))
      moved.emplace_back(Disc{d->center + offset, d->radius});
    else {
      const Rect& r = std::get<Rect>(s);
      moved.emplace_back(Rect{r.min + offset, r.max + offset});
    }
  }
  return from_shapes(std::move(moved), complement_);
}

Region disc_region(PhasePoint center, double radius) { return Region::from_shapes({Disc{center, radius}}); }

PointSet::PointSet(std::vector<PhasePoint> pts) : points(std::move(pts)) {
  std::set<std::pair<double, double>> seen;
  for (const PhasePoint& p : points) {
    if (!std::isfinite(p.time) || !std::isfinite(p.freq)) throw Error(ErrorCode::InvalidInput, "point set has a non-finite point");
    if (!seen.insert({p.time, p.freq}).second) throw Error(ErrorCode::InvalidInput, "point set has duplicate points");
  }
}

Mask rasterize(const Region& region, const PhaseGrid& grid) {
  Mask m(grid);
  for (int i = 0; i < grid.nx(); ++i)
    for (int k = 0; k < grid.nxi(); ++k) m.set(i, k, region.contains(grid.at(i, k)));
  return m;
}

RegionWeights region_weights(const Region& region, const PhaseGrid& grid, int m) {
  RegionWeights out;
  bool ok = !region.is_mask();
  if (ok) {
    const auto& shapes = region.shapes();
    for (std::size_t a = 0; a < shapes.size() && ok; ++a)
      for (std::size_t b = a + 1; b < shapes.size() && ok; ++b) ok = disjoint(shapes[a], shapes[b]);
  }
  if (ok) {
    std::vector<double> w(grid.size(), 0.0);
    try {
      for (const Shape& s : region.shapes()) {
        PatchWeights p;
        if (const Disc* d = std::get_if<Disc>(&s))
          p = disc_weights(grid, d->center, d->radius, m);
        else
          p = rect_weights(grid, std::get<Rect>(s).min, std::get<Rect>(s).max, m);
        for (int i = 0; i < p.ni; ++i)
          for (int k = 0; k < p.nk; ++k) w[grid.index(p.i0 + i, p.k0 + k)] += p.w[static_cast<std::size_t>(i) * p.nk + k];
      }
      if (region.complement())
        for (double& v : w) v = grid.cell_area() - v;
      out.w = std::move(w);
      out.high_order = true;
      return out;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PatchOutsideGrid) throw;
    }
  }
  out.w = binary_weights(region, grid);
  return out;
}

double kernel_cutoff_radius(int r) {
  if (r < 0) throw Error(ErrorCode::DomainError, "kernel order must be nonnegative");
  const KernelSpec spec = KernelSpec::single(r);
  for (double d = 12.0 + r; d > 0; d -= 0.01)
    if (kernel_abs(spec, d) > 1e-14) return d + 0.01;
  return 0.01;
}

DensityResult max_nyquist_density(const Region& region, double R, const PhaseGrid& grid, const DensityOptions& opts) {
  if (!(R > 0) || !std::isfinite(R)) throw Error(ErrorCode::DomainError, "density radius must be positive");
  return sliding_sup(region, grid, opts.oversample, R, [](double) { return 1.0; }, 0.0, {});
}

DensityResult a_density(const Region& region, int r, double R, const PhaseGrid& grid, const DensityOptions& opts) {
  if (!(R > 0) || !std::isfinite(R)) throw Error(ErrorCode::DomainError, "density radius must be positive");
  if (r < 0) throw Error(ErrorCode::DomainError, "kernel order must be nonnegative");
  const KernelSpec spec = KernelSpec::single(r);
  const double support = std::min(R, kernel_cutoff_radius(r));
  double lip = 0.0;
  for (double d = 0.0; d < support; d += 1e-3)
    lip = std::max(lip, std::abs(kernel_abs(spec, d + 1e-3) - kernel_abs(spec, d)) / 1e-3);
  // Zeros of L_r(pi d^2), where the modulus has kinks.
  std::vector<double> kinks;
  const double dd = 1e-3;
  for (double d = dd; d < support; d += dd) {
    double a = d - dd, b = d;
    if (laguerre(r, 0, kPi * a * a) * laguerre(r, 0, kPi * b * b) >= 0) continue;
    for (int it = 0; it < 60; ++it) {
      const double m = 0.5 * (a + b);
      if (laguerre(r, 0, kPi * a * a) * laguerre(r, 0, kPi * m * m) <= 0)
        b = m;
      else
        a = m;
    }
    kinks.push_back(0.5 * (a + b));
  }
  return sliding_sup(region, grid, opts.oversample, support, [spec](double d) { return kernel_abs(spec, d); }, lip,
                     kinks);
}

namespace {

double discrete_sup(const PointSet& ps, double R, const std::function<double(double)>& weight) {
  if (!(R > 0) || !std::isfinite(R)) throw Error(ErrorCode::DomainError, "density radius must be positive");
  const auto& pts = ps.points;
  if (pts.empty()) return 0.0;
  double gap = std::numeric_limits<double>::infinity();
  double x0 = pts[0].time, x1 = x0, y0 = pts[0].freq, y1 = y0;
  for (std::size_t a = 0; a < pts.size(); ++a) {
    x0 = std::min(x0, pts[a].time);
    x1 = std::max(x1, pts[a].time);
    y0 = std::min(y0, pts[a].freq);
    y1 = std::max(y1, pts[a].freq);
    for (std::size_t b = a + 1; b < pts.size(); ++b) gap = std::min(gap, std::sqrt(norm2(pts[a] - pts[b])));
  }
  std::vector<PhasePoint> centers = pts;
  if (std::isfinite(gap)) {
    double step = 0.5 * gap;
    const double wx = x1 - x0 + 2 * R, wy = y1 - y0 + 2 * R;
    // Keep the refinement lattice below about a million centres.
    step = std::max(step, std::sqrt(wx * wy / 1e6));
    const int nx = static_cast<int>(std::ceil(wx / step)), ny = static_cast<int>(std::ceil(wy / step));
    for (int i = 0; i <= nx; ++i)
      for (int k = 0; k <= ny; ++k) centers.push_back({x0 - R + i * step, y0 - R + k * step});
  }
  const double lim = R * R * (1.0 + 1e-12);
  double best = 0.0;
#pragma omp parallel for reduction(max : best) schedule(static)
  for (std::size_t c = 0; c < centers.size(); ++c) {
    double s = 0.0;
    for (const PhasePoint& p : pts) {
      const double d2 = norm2(p - centers[c]);
      if (d2 <= lim) s += weight(std::sqrt(d2));
    }
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

double discrete_nyquist(const PointSet& points, double R) {
  return discrete_sup(points, R, [](double) { return 1.0; });
}

double discrete_a_density(const PointSet& points, int r, double R) {
  if (r < 0) throw Error(ErrorCode::DomainError, "kernel order must be nonnegative");
  const KernelSpec spec = KernelSpec::single(r);
  return discrete_sup(points, R, [spec](double d) { return kernel_abs(spec, d); });
}

}  // namespace tfsieve

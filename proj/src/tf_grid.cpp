#include "tfsieve/tf_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tfsieve/error.hpp"
#include "tfsieve/kernels.hpp"
#include "tfsieve/special_fn.hpp"

namespace tfsieve {

namespace {

constexpr double kPi = std::numbers::pi;

bool close(double a, double b, double scale) { return std::abs(a - b) <= 1e-9 * scale; }

kernels::StftLayout make_layout(const TimeAxis& t, const PhaseGrid& grid) {
  kernels::StftLayout L;
  L.nt = t.count;
  L.t0 = t.start;
  L.dt = t.step;
  L.nx = grid.nx();
  L.nxi = grid.nxi();
  L.xi0 = grid.freq.start;
  L.dxi = grid.freq.step;
  L.shift.resize(L.nx);
  for (int i = 0; i < L.nx; ++i) {
    // g(t_n - x) sits at sample n - x / dt.
    const double s = grid.time.at(i) / t.step;
    const double rs = std::round(s);
    if (std::abs(s - rs) > 1e-6)
      throw Error(ErrorCode::GridMismatch, "phase-grid time nodes must be whole multiples of the time step");
    L.shift[i] = static_cast<long>(rs);
  }
  const double fmax = std::max(std::abs(grid.freq.start), std::abs(grid.freq.stop()));
  if (fmax > 0.5 / t.step * (1.0 + 1e-12))
    throw Error(ErrorCode::AliasingRisk, "frequency extent exceeds the Nyquist limit of the time axis");
  const double n = 1.0 / (t.step * grid.freq.step);
  const double rn = std::round(n);
  if (std::abs(n - rn) < 1e-9 * n && rn >= grid.nxi()) L.fft_len = static_cast<int>(rn);
  return L;
}

}  // namespace

void TimeAxis::validate() const {
  if (!(step > 0) || !std::isfinite(step) || !std::isfinite(start))
    throw Error(ErrorCode::InvalidInput, "time axis step must be positive and finite");
  if (count < 2) throw Error(ErrorCode::InvalidInput, "time axis needs at least two nodes");
}

bool TimeAxis::same_as(const TimeAxis& o) const {
  const double scale = std::max({std::abs(start), std::abs(o.start), step * count});
  return count == o.count && close(step, o.step, step) && close(start, o.start, scale);
}

long TimeAxis::nearest(double t) const { return std::lround((t - start) / step); }

TimeAxis TimeAxis::centered(double half_width, double step) {
  if (!(step > 0) || !(half_width > 0)) throw Error(ErrorCode::InvalidInput, "axis extent and step must be positive");
  const long k = static_cast<long>(std::floor(half_width / step + 1e-9));
  TimeAxis a{-k * step, step, static_cast<int>(2 * k + 1)};
  a.validate();
  return a;
}

Signal::Signal(const TimeAxis& a) : axis(a), samples(a.count, cplx(0.0)) { a.validate(); }

Signal::Signal(const TimeAxis& a, std::vector<cplx> s) : axis(a), samples(std::move(s)) {
  a.validate();
  if (samples.size() != static_cast<std::size_t>(a.count))
    throw Error(ErrorCode::InvalidInput, "signal length does not match its axis");
}

double Signal::l2_norm() const {
  double s = 0.0;
  for (const cplx& v : samples) s += std::norm(v);
  return std::sqrt(s * axis.step);
}

cplx inner(const Signal& f, const Signal& g) {
  if (!f.axis.same_as(g.axis)) throw Error(ErrorCode::AxisMismatch, "signals live on different axes");
  cplx s = 0.0;
  for (std::size_t n = 0; n < f.samples.size(); ++n) s += f.samples[n] * std::conj(g.samples[n]);
  return s * f.axis.step;
}

PhaseGrid::PhaseGrid(const TimeAxis& t, const TimeAxis& f) : time(t), freq(f) {
  time.validate();
  freq.validate();
}

bool PhaseGrid::in_window(PhasePoint p) const {
  const double eps = 1e-12;
  return p.time >= time.start - 0.5 * time.step - eps && p.time <= time.stop() + 0.5 * time.step + eps &&
         p.freq >= freq.start - 0.5 * freq.step - eps && p.freq <= freq.stop() + 0.5 * freq.step + eps;
}

PhaseGrid PhaseGrid::centered(double half_width, double step) {
  const TimeAxis a = TimeAxis::centered(half_width, step);
  return PhaseGrid(a, a);
}

PhaseGrid PhaseGrid::refined(int factor) const {
  if (factor < 1) throw Error(ErrorCode::InvalidInput, "refinement factor must be positive");
  auto refine = [factor](const TimeAxis& a) {
    const double h = a.step / factor;
    return TimeAxis{a.start - 0.5 * a.step + 0.5 * h, h, a.count * factor};
  };
  return PhaseGrid(refine(time), refine(freq));
}

TFField::TFField(const PhaseGrid& grid) : grid_(grid), values_(grid.size(), cplx(0.0)) {}

TFField::TFField(const PhaseGrid& grid, std::vector<cplx> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw Error(ErrorCode::InvalidInput, "field size does not match its grid");
}

TFField& TFField::operator+=(const TFField& o) {
  if (!grid_.same_as(o.grid_)) throw Error(ErrorCode::GridMismatch, "fields live on different grids");
  for (std::size_t n = 0; n < values_.size(); ++n) values_[n] += o.values_[n];
  return *this;
}

TFField& TFField::operator*=(cplx c) {
  for (cplx& v : values_) v *= c;
  return *this;
}

double TFField::max_abs() const {
  double m = 0.0;
  for (const cplx& v : values_) m = std::max(m, std::abs(v));
  return m;
}

TimeAxis default_time_axis() { return TimeAxis::centered(8.0, 1.0 / 32.0); }

PhaseGrid default_phase_grid() { return PhaseGrid::centered(6.0, 1.0 / 16.0); }

TFField stft(const Signal& f, const Signal& g, const PhaseGrid& grid) {
  if (!f.axis.same_as(g.axis)) throw Error(ErrorCode::AxisMismatch, "signal and window live on different axes");
  const kernels::StftLayout L = make_layout(f.axis, grid);
  TFField out(grid);
  if (L.fft_len > 0)
    kernels::parallel::stft_fft(L, f.samples.data(), g.samples.data(), out.values().data());
  else
    kernels::parallel::stft_direct(L, f.samples.data(), g.samples.data(), out.values().data());
  return out;
}

Signal adjoint(const TFField& F, const Signal& g) {
  const kernels::StftLayout L = make_layout(g.axis, F.grid());
  Signal out(g.axis);
  if (L.fft_len > 0)
    kernels::parallel::adjoint_fft(L, F.values().data(), g.samples.data(), F.grid().cell_area(), out.samples.data());
  else
    kernels::serial::adjoint_direct(L, F.values().data(), g.samples.data(), F.grid().cell_area(), out.samples.data());
  return out;
}

double lp_norm(const TFField& F, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorCode::DomainError, "lp_norm requires p >= 1");
  double s = 0.0;
  if (p == 2.0) {
    for (const cplx& v : F.values()) s += std::norm(v);
  } else if (p == 1.0) {
    for (const cplx& v : F.values()) s += std::abs(v);
  } else {
    for (const cplx& v : F.values()) s += std::pow(std::abs(v), p);
  }
  return std::pow(s * F.grid().cell_area(), 1.0 / p);
}

cplx inner(const TFField& F, const TFField& G) {
  if (!F.grid().same_as(G.grid())) throw Error(ErrorCode::GridMismatch, "fields live on different grids");
  cplx s = 0.0;
  for (std::size_t n = 0; n < F.values().size(); ++n) s += F.values()[n] * std::conj(G.values()[n]);
  return s * F.grid().cell_area();
}

double boundary_mass_fraction(const TFField& F, double p) {
  const PhaseGrid& g = F.grid();
  double total = 0.0, edge = 0.0;
  for (int i = 0; i < g.nx(); ++i)
    for (int k = 0; k < g.nxi(); ++k) {
      const double m = std::pow(std::abs(F(i, k)), p);
      total += m;
      if (i == 0 || k == 0 || i == g.nx() - 1 || k == g.nxi() - 1) edge += m;
    }
  return total > 0 ? edge / total : 0.0;
}

void check_truncation(const TFField& F, double p, double tol) {
  const double frac = boundary_mass_fraction(F, p);
  if (frac > tol)
    throw Error(ErrorCode::TruncationRisk, "field carries " + std::to_string(frac) + " of its mass on the grid boundary");
}

Signal hermite_signal(int r, const TimeAxis& axis) {
  if (r < 0) throw Error(ErrorCode::DomainError, "hermite order must be nonnegative");
  axis.validate();
  Signal s(axis);
  std::vector<double> buf(r + 1);
  for (int n = 0; n < axis.count; ++n) {
    hermite_fn_all(r, axis.at(n), buf.data());
    s.samples[n] = buf[r];
  }
  // Mass of h_r beyond the axis, summed on the same step out to where it is negligible.
  double tail = 0.0;
  const int extra = axis.count + static_cast<int>(std::ceil(8.0 / axis.step));
  for (int n = 1; n <= extra; ++n) {
    for (double t : {axis.start - n * axis.step, axis.stop() + n * axis.step}) {
      hermite_fn_all(r, t, buf.data());
      tail += buf[r] * buf[r] * axis.step;
    }
  }
  if (tail > 1e-12) throw Error(ErrorCode::TruncationRisk, "time axis too short for h_" + std::to_string(r));
  return s;
}

Signal hermite_combination(const std::vector<cplx>& c, const TimeAxis& axis) {
  return shifted_hermite_combination(c, PhasePoint{0.0, 0.0}, axis);
}

Signal shifted_hermite_combination(const std::vector<cplx>& c, PhasePoint z, const TimeAxis& axis) {
  axis.validate();
  Signal s(axis);
  if (c.empty()) return s;
  const int rmax = static_cast<int>(c.size()) - 1;
  std::vector<double> buf(rmax + 1);
  for (int n = 0; n < axis.count; ++n) {
    const double t = axis.at(n);
    hermite_fn_all(rmax, t - z.time, buf.data());
    cplx v = 0.0;
    for (int j = 0; j <= rmax; ++j) v += c[j] * buf[j];
    s.samples[n] = std::polar(1.0, 2.0 * kPi * z.freq * t) * v;
  }
  return s;
}

}  // namespace tfsieve

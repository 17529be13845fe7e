#pragma once

#include <cstddef>
#include <vector>

#include "tfsieve/types.hpp"

namespace tfsieve {

struct TimeAxis {
  double start = 0.0;
  double step = 1.0;
  int count = 2;

  double at(int i) const { return start + i * step; }
  double stop() const { return at(count - 1); }
  void validate() const;
  bool same_as(const TimeAxis& o) const;
  // Nearest node index; may fall outside [0, count).
  long nearest(double t) const;

  // Nodes k*step for |k*step| <= half_width.
  static TimeAxis centered(double half_width, double step);
};

struct Signal {
  TimeAxis axis;
  std::vector<cplx> samples;

  Signal() = default;
  explicit Signal(const TimeAxis& a);
  Signal(const TimeAxis& a, std::vector<cplx> s);

  double l2_norm() const;
};

cplx inner(const Signal& f, const Signal& g);

struct PhaseGrid {
  TimeAxis time;
  TimeAxis freq;

  PhaseGrid() = default;
  PhaseGrid(const TimeAxis& t, const TimeAxis& f);

  double cell_area() const { return time.step * freq.step; }
  int nx() const { return time.count; }
  int nxi() const { return freq.count; }
  std::size_t size() const { return static_cast<std::size_t>(time.count) * freq.count; }
  std::size_t index(int i, int k) const { return static_cast<std::size_t>(i) * freq.count + k; }
  PhasePoint at(int i, int k) const { return {time.at(i), freq.at(k)}; }
  bool same_as(const PhaseGrid& o) const { return time.same_as(o.time) && freq.same_as(o.freq); }
  // True if p lies in the union of the grid's cells.
  bool in_window(PhasePoint p) const;

  static PhaseGrid centered(double half_width, double step);
  // Each cell split into factor x factor subcells.
  PhaseGrid refined(int factor) const;
};

class TFField {
 public:
  TFField() = default;
  explicit TFField(const PhaseGrid& grid);
  TFField(const PhaseGrid& grid, std::vector<cplx> values);

  const PhaseGrid& grid() const { return grid_; }
  const std::vector<cplx>& values() const { return values_; }
  std::vector<cplx>& values() { return values_; }
  cplx operator()(int i, int k) const { return values_[grid_.index(i, k)]; }
  cplx& operator()(int i, int k) { return values_[grid_.index(i, k)]; }

  TFField& operator+=(const TFField& o);
  TFField& operator*=(cplx c);
  double max_abs() const;

 private:
  PhaseGrid grid_;
  std::vector<cplx> values_;
};

TimeAxis default_time_axis();
PhaseGrid default_phase_grid();

TFField stft(const Signal& f, const Signal& g, const PhaseGrid& grid);
Signal adjoint(const TFField& F, const Signal& g);

double lp_norm(const TFField& F, double p);
cplx inner(const TFField& F, const TFField& G);

// Fraction of the p-mass of F carried by the outermost ring of cells.
double boundary_mass_fraction(const TFField& F, double p);
// Throws TruncationRisk if boundary_mass_fraction exceeds tol.
void check_truncation(const TFField& F, double p, double tol = 1e-6);

Signal hermite_signal(int r, const TimeAxis& axis);
// Sum of c[j] h_j.
Signal hermite_combination(const std::vector<cplx>& c, const TimeAxis& axis);
// pi(z) f on the same axis, evaluated for f given by Hermite coefficients.
Signal shifted_hermite_combination(const std::vector<cplx>& c, PhasePoint z, const TimeAxis& axis);

}  // namespace tfsieve

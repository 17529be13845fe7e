#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "tfsieve/disc_quadrature.hpp"
#include "tfsieve/tf_grid.hpp"

namespace tfsieve {

struct Disc {
  PhasePoint center;
  double radius = 1.0;
};

struct Rect {
  PhasePoint min;
  PhasePoint max;
};

using Shape = std::variant<Disc, Rect>;

class Mask {
 public:
  Mask() = default;
  explicit Mask(const PhaseGrid& grid);
  Mask(const PhaseGrid& grid, std::vector<std::uint8_t> cells);

  const PhaseGrid& grid() const { return grid_; }
  const std::vector<std::uint8_t>& cells() const { return cells_; }
  bool at(int i, int k) const { return cells_[grid_.index(i, k)] != 0; }
  void set(int i, int k, bool v) { cells_[grid_.index(i, k)] = v ? 1 : 0; }
  std::size_t count() const;
  double area() const { return static_cast<double>(count()) * grid_.cell_area(); }

 private:
  PhaseGrid grid_;
  std::vector<std::uint8_t> cells_;
};

// Union of shapes (optionally complemented), or a raster mask.
class Region {
 public:
  Region() = default;
  static Region from_shapes(std::vector<Shape> shapes, bool complement = false);
  static Region from_mask(Mask mask);

  bool is_mask() const { return mask_.has_value(); }
  const std::vector<Shape>& shapes() const { return shapes_; }
  bool complement() const { return complement_; }
  const Mask& mask() const { return *mask_; }

  bool contains(PhasePoint p) const;
  // Masks shift by the nearest whole number of cells.
  Region translated(PhasePoint offset) const;

 private:
  std::vector<Shape> shapes_;
  bool complement_ = false;
  std::optional<Mask> mask_;
};

Region disc_region(PhasePoint center, double radius);

struct PointSet {
  std::vector<PhasePoint> points;

  PointSet() = default;
  explicit PointSet(std::vector<PhasePoint> pts);
};

// Cell-centre membership.
Mask rasterize(const Region& region, const PhaseGrid& grid);

struct RegionWeights {
  std::vector<double> w;  // quadrature weight per grid cell
  bool high_order = false;
};

// Weights for integrating smooth fields over the region. Single discs and
// rectangles, their disjoint unions and complements get boundary-corrected
// weights; anything else falls back to cell-area times the raster mask.
RegionWeights region_weights(const Region& region, const PhaseGrid& grid, int m = kDefaultQuadratureOrder);

struct DensityOptions {
  // Each grid cell is split into oversample^2 cells before rasterizing.
  int oversample = 4;
};

struct DensityResult {
  double value = 0.0;
  double error_estimate = 0.0;
  PhasePoint argmax;
  // The region reaches within R of the window edge, so windows beyond the
  // grid were not examined.
  bool edge_effect = false;
};

DensityResult max_nyquist_density(const Region& region, double R, const PhaseGrid& grid, const DensityOptions& opts = {});
DensityResult a_density(const Region& region, int r, double R, const PhaseGrid& grid, const DensityOptions& opts = {});

// Radius beyond which the order-r kernel modulus stays below 1e-14.
double kernel_cutoff_radius(int r);

double discrete_nyquist(const PointSet& points, double R);
double discrete_a_density(const PointSet& points, int r, double R);

}  // namespace tfsieve

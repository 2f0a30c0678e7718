#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace dcsim {

/// Point in up to three dimensions; unused trailing components are zero.
using Coord = std::array<double, 3>;

/// Uniform axis-aligned cell-centred mesh of a box in 1 or 2 dimensions.
///
/// Cells are stored x-fastest: index = i + cells[0] * j.
class Grid {
 public:
  Grid() = default;

  /// Equal cell count and extent on every axis.
  Grid(int dim, int cells_per_axis, double extent, double origin = 0.0);

  /// Per-axis description. Spacing must come out equal on all axes.
  Grid(int dim, std::array<int, 2> cells, std::array<double, 2> extent,
       std::array<double, 2> origin = {0.0, 0.0});

  int dim() const { return dim_; }
  int cells(int axis) const { return cells_[axis]; }
  double extent(int axis) const { return extent_[axis]; }
  double origin(int axis) const { return origin_[axis]; }
  double spacing() const { return h_; }
  std::size_t size() const;

  /// h^dim, the measure of one cell.
  double cell_volume() const;

  double center(int axis, int index) const { return origin_[axis] + (index + 0.5) * h_; }
  Coord cell_center(std::size_t flat) const;

  /// Length of the box diagonal.
  double diameter() const;

  bool operator==(const Grid&) const = default;

 private:
  int dim_ = 1;
  std::array<int, 2> cells_{4, 1};
  std::array<double, 2> extent_{1.0, 0.0};
  std::array<double, 2> origin_{0.0, 0.0};
  double h_ = 0.25;
};

/// One scalar quantity sampled at cell centres.
struct Field {
  Grid grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::span<double> span() { return values; }
  std::span<const double> span() const { return values; }

  double max() const;
  double min() const;
  /// Sum of values times cell volume.
  double integral() const;
  double mean() const;
  bool all_finite() const;
};

double squared_distance(const Coord& a, const Coord& b);

}  // namespace dcsim

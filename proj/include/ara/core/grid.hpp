#pragma once

#include <cstddef>
#include <vector>

namespace ara {

// One grid axis: either lo..hi by step (endpoints included) or an explicit
// value list (discrete conditioning variables).
struct GridDim {
  double lo = 0.0;
  double hi = 1.0;
  double step = 0.1;
  std::vector<double> explicit_values;

  static GridDim range(double lo, double hi, double step);
  static GridDim list(std::vector<double> values);

  std::size_t count() const;
  std::vector<double> values() const;
  bool is_range() const { return explicit_values.empty(); }
};

struct GridSpec {
  std::vector<GridDim> dims;
  std::size_t point_count() const;
};

// Lexicographic cartesian product, first dimension slowest.
std::vector<std::vector<double>> make_grid(const GridSpec& spec);

// Multilinear interpolation weights of x on a regular grid. Points outside
// the hull are clamped. Returns (flat index, weight) pairs.
std::vector<std::pair<std::size_t, double>> interpolation_stencil(const GridSpec& spec, const double* x);

}  // namespace ara

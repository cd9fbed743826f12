#include "ara/core/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ara {

GridDim GridDim::range(double lo, double hi, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
  if (!(hi >= lo)) throw std::invalid_argument("grid needs hi >= lo");
  const double n = (hi - lo) / step;
  if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n))
    throw std::invalid_argument("grid step does not divide the range");
  GridDim d;
  d.lo = lo;
  d.hi = hi;
  d.step = step;
  return d;
}

GridDim GridDim::list(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("empty grid axis");
  GridDim d;
  d.lo = *std::min_element(values.begin(), values.end());
  d.hi = *std::max_element(values.begin(), values.end());
  d.step = 0.0;
  d.explicit_values = std::move(values);
  return d;
}

std::size_t GridDim::count() const {
  if (!explicit_values.empty()) return explicit_values.size();
  return static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
}

std::vector<double> GridDim::values() const {
  if (!explicit_values.empty()) return explicit_values;
  const auto n = count();
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = (i + 1 == n) ? hi : lo + static_cast<double>(i) * step;
  return v;
}

std::size_t GridSpec::point_count() const {
  std::size_t n = 1;
  for (const auto& d : dims) n *= d.count();
  return n;
}

std::vector<std::vector<double>> make_grid(const GridSpec& spec) {
  std::vector<std::vector<double>> axes;
  for (const auto& d : spec.dims) {
    if (d.is_range()) GridDim::range(d.lo, d.hi, d.step);  // validates
    axes.push_back(d.values());
  }
  std::vector<std::vector<double>> out;
  out.reserve(spec.point_count());
  std::vector<std::size_t> idx(axes.size(), 0);
  for (std::size_t p = 0; p < spec.point_count(); ++p) {
    std::vector<double> x(axes.size());
    for (std::size_t k = 0; k < axes.size(); ++k) x[k] = axes[k][idx[k]];
    out.push_back(std::move(x));
    for (std::size_t k = axes.size(); k-- > 0;) {
      if (++idx[k] < axes[k].size()) break;
      idx[k] = 0;
    }
  }
  return out;
}

std::vector<std::pair<std::size_t, double>> interpolation_stencil(const GridSpec& spec, const double* x) {
  std::vector<std::pair<std::size_t, double>> out{{0, 1.0}};
  for (std::size_t k = 0; k < spec.dims.size(); ++k) {
    const auto& d = spec.dims[k];
    const auto n = d.count();
    std::size_t i0 = 0, i1 = 0;
    double t = 0.0;
    if (d.is_range()) {
      if (n > 1) {
        const double u = std::clamp((x[k] - d.lo) / d.step, 0.0, static_cast<double>(n - 1));
        i0 = std::min(static_cast<std::size_t>(u), n - 2);
        i1 = i0 + 1;
        t = u - static_cast<double>(i0);
      }
    } else {
      // Nearest listed value; discrete axes are never interpolated.
      double best = INFINITY;
      for (std::size_t i = 0; i < n; ++i) {
        const double e = std::abs(d.explicit_values[i] - x[k]);
        if (e < best) {
          best = e;
          i0 = i1 = i;
        }
      }
    }
    std::vector<std::pair<std::size_t, double>> next;
    next.reserve(out.size() * 2);
    for (auto [flat, w] : out) {
      if (t > 0.0) {
        next.emplace_back(flat * n + i0, w * (1.0 - t));
        next.emplace_back(flat * n + i1, w * t);
      } else {
        next.emplace_back(flat * n + i0, w);
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace ara

#include "ara/aps/mode.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "ara/core/errors.hpp"

namespace ara::aps {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

double quantile_sorted(const std::vector<double>& s, double q) {
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  const double t = pos - static_cast<double>(i);
  return i + 1 < s.size() ? s[i] * (1.0 - t) + s[i + 1] * t : s[i];
}

ModeEstimate discrete_mode(const std::vector<double>& samples, const baid::Domain& dom) {
  std::map<double, std::size_t> counts;
  for (double x : samples) {
    auto idx = dom.index_of(x);
    if (!idx) throw std::invalid_argument("sample outside its discrete domain");
    ++counts[dom.value(*idx)];
  }
  ModeEstimate m;
  std::size_t top = 0;
  for (const auto& [v, c] : counts)  // ascending values, so ties keep the smaller one
    if (c > top) {
      top = c;
      m.value = v;
    }
  double spacing = 1.0;
  if (dom.size() > 1) {
    auto vals = dom.values();
    std::sort(vals.begin(), vals.end());
    spacing = INFINITY;
    for (std::size_t i = 1; i < vals.size(); ++i) spacing = std::min(spacing, vals[i] - vals[i - 1]);
  }
  m.bandwidth = spacing;
  m.density_at_mode = static_cast<double>(top) / static_cast<double>(samples.size());
  m.sample_count = samples.size();
  return m;
}

// Reflected Gaussian KDE (unnormalized) on the evaluation grid.
std::vector<double> kde_on_grid(const std::vector<double>& samples, double lo, double hi, double delta, double bw,
                                std::size_t m) {
  std::vector<double> dens(m, 0.0);
  const long last = static_cast<long>(m) - 1;
  if (bw < 2.0 * delta) {
    // Narrow kernel: direct evaluation over the few grid points it touches.
    const double reach = 8.0 * bw;
    for (double x : samples)
      for (double c : {x, 2.0 * lo - x, 2.0 * hi - x}) {
        const auto j0 = static_cast<long>(std::ceil((c - reach - lo) / delta));
        const auto j1 = static_cast<long>(std::floor((c + reach - lo) / delta));
        for (long j = std::max(0L, j0); j <= std::min(last, j1); ++j) {
          const double z = (lo + static_cast<double>(j) * delta - c) / bw;
          dens[static_cast<std::size_t>(j)] += std::exp(-0.5 * z * z);
        }
      }
    return dens;
  }
  // Linear binning onto the grid, then a discrete convolution that adds
  // the mirror images about both ends.
  std::vector<double> counts(m, 0.0);
  for (double x : samples) {
    const double u = std::clamp((x - lo) / delta, 0.0, static_cast<double>(last));
    const auto i = std::min(static_cast<std::size_t>(u), m - 2);
    const double t = u - static_cast<double>(i);
    counts[i] += 1.0 - t;
    counts[i + 1] += t;
  }
  const auto reach = static_cast<long>(std::ceil(8.0 * bw / delta));
  std::vector<double> kern(static_cast<std::size_t>(reach) + 1);
  for (long k = 0; k <= reach; ++k) {
    const double z = static_cast<double>(k) * delta / bw;
    kern[static_cast<std::size_t>(k)] = std::exp(-0.5 * z * z);
  }
  auto K = [&](long k) { return k <= reach ? kern[static_cast<std::size_t>(k)] : 0.0; };
  for (long j = 0; j <= last; ++j) {
    double s = 0.0;
    for (long i = std::max(0L, j - reach); i <= std::min(last, j + reach); ++i)
      s += counts[static_cast<std::size_t>(i)] * K(std::abs(j - i));
    for (long i = 0; i <= std::min(last, reach - j); ++i) s += counts[static_cast<std::size_t>(i)] * K(j + i);
    for (long i = std::max(0L, 2 * last - j - reach); i <= last; ++i)
      s += counts[static_cast<std::size_t>(i)] * K(2 * last - j - i);
    dens[static_cast<std::size_t>(j)] = s;
  }
  return dens;
}

}  // namespace

double silverman_bandwidth(const std::vector<double>& samples) {
  const auto n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / std::max(1.0, n - 1.0));
  auto s = samples;
  std::sort(s.begin(), s.end());
  const double iqr = quantile_sorted(s, 0.75) - quantile_sorted(s, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = sd;
  return 0.9 * spread * std::pow(n, -0.2);
}

ModeEstimate estimate_mode(const std::vector<double>& samples, const baid::Domain& dom) {
  if (samples.size() < kMinModeSamples)
    throw InsufficientSamplesError("mode estimation needs at least " + std::to_string(kMinModeSamples) +
                                   " samples, got " + std::to_string(samples.size()));
  if (dom.is_discrete()) return discrete_mode(samples, dom);

  const double lo = dom.lo(), hi = dom.hi(), w = dom.width();
  for (double x : samples)
    if (!dom.contains(x, 1e-9 * w)) throw std::invalid_argument("sample outside its interval domain");

  const std::size_t m = kModeGridPoints;
  const double delta = w / static_cast<double>(m - 1);
  ModeEstimate est;
  est.sample_count = samples.size();

  const double bw = silverman_bandwidth(samples);
  if (!(bw > 0.0)) {
    // Point mass: every sample is the same value.
    est.value = samples.front();
    est.bandwidth = delta;
    est.density_at_mode = 1.0 / delta;
    return est;
  }
  est.bandwidth = bw;
  const auto dens = kde_on_grid(samples, lo, hi, delta, bw, m);
  std::size_t top = 0;
  for (std::size_t j = 1; j < m; ++j)
    if (dens[j] > dens[top]) top = j;
  est.value = top + 1 == m ? hi : lo + static_cast<double>(top) * delta;
  est.density_at_mode = dens[top] * kInvSqrt2Pi / (static_cast<double>(samples.size()) * bw);
  return est;
}

}  // namespace ara::aps

#include "ara/core/random.hpp"

#include <algorithm>
#include <cmath>

namespace ara {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = splitmix(base);
  for (auto p : parts) h = splitmix(h ^ splitmix(p + 0x632be59bd9b4e019ULL));
  return h;
}

double uniform01(Rng& rng) {
  // 53 random bits, never returns 1.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

double standard_normal(Rng& rng) {
  return rng.normal(static_cast<std::mt19937_64&>(rng));
}

double sample_gamma(Rng& rng, double shape) {
  // Marsaglia-Tsang, with the usual boost for shape < 1.
  if (shape < 1.0) {
    double u = uniform01(rng);
    while (u == 0.0) u = uniform01(rng);
    return sample_gamma(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01(rng);
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double sample_beta(Rng& rng, double a, double b) {
  const double x = sample_gamma(rng, a);
  const double y = sample_gamma(rng, b);
  const double s = x + y;
  if (s <= 0.0) return a >= b ? 1.0 : 0.0;  // both underflowed, tiny shapes
  return x / s;
}

std::int64_t sample_binomial(Rng& rng, std::int64_t n, double p) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  const double q = 1.0 - p;
  const double nd = static_cast<double>(n);
  if (nd * std::min(p, q) < kBinomialNormalThreshold) {
    std::binomial_distribution<std::int64_t> bin(n, p);
    return bin(rng);
  }
  const double x = std::floor(nd * p + std::sqrt(nd * p * q) * standard_normal(rng) + 0.5);
  return static_cast<std::int64_t>(std::clamp(x, 0.0, nd));
}

std::uint64_t label_hash(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
  return h;
}

}  // namespace ara

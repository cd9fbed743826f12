#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

#include <boost/random/normal_distribution.hpp>

namespace ara {

// Mersenne Twister that also carries its own (ziggurat) normal generator.
class Rng : public std::mt19937_64 {
 public:
  using std::mt19937_64::mt19937_64;
  boost::random::normal_distribution<double> normal;
};

// Stable 64-bit mixing so per-point streams do not depend on scheduling.
std::uint64_t mix_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts);

// FNV-1a of a label, for deriving named sub-seeds.
std::uint64_t label_hash(std::string_view s);

inline Rng make_rng(std::uint64_t base, std::initializer_list<std::uint64_t> parts) {
  return Rng(mix_seed(base, parts));
}

double uniform01(Rng& rng);
double uniform(Rng& rng, double lo, double hi);
double standard_normal(Rng& rng);
double sample_gamma(Rng& rng, double shape);
double sample_beta(Rng& rng, double a, double b);

// Exact draw while n*min(p,1-p) is small, normal approximation with
// continuity correction otherwise.
std::int64_t sample_binomial(Rng& rng, std::int64_t n, double p);

// Threshold on n*min(p,1-p) above which the normal approximation is used.
inline constexpr double kBinomialNormalThreshold = 50.0;

}  // namespace ara

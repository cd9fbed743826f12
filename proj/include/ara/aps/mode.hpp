#pragma once

#include <vector>

#include "ara/aps/chain.hpp"

namespace ara::aps {

inline constexpr std::size_t kMinModeSamples = 100;
inline constexpr std::size_t kModeGridPoints = 1001;

// Continuous domains: reflected Gaussian KDE with Silverman's bandwidth,
// maximized over a 1001-point grid (smallest value wins ties). The density
// is evaluated by linear binning onto a fine grid followed by a discrete
// convolution. Discrete domains: most frequent value.
ModeEstimate estimate_mode(const std::vector<double>& samples, const baid::Domain& domain);

double silverman_bandwidth(const std::vector<double>& samples);

}  // namespace ara::aps

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ara/core/random.hpp"

namespace ara::aps {

using Values = std::span<const double>;

// A conditional distribution bound to an ordered parent list. `density` is
// only needed when the node enters an augmented distribution as a
// likelihood term.
struct Factor {
  std::function<double(Values parents, Rng& rng)> sample;
  std::function<double(double x, Values parents)> density;
};

using UtilityFn = std::function<double(Values parents)>;

// The Defender's own assessments: a factor for every chance node in her
// diagram (attacker decisions excluded; those come from forecasts) and her
// utility over the utility node's parents.
struct DefenderModel {
  std::map<std::string, Factor> factors;
  UtilityFn utility;
};

// One ω-realization of the Defender's random model of the Attacker.
struct AttackerDraw {
  std::uint64_t index = 0;
  // Uniform variate tied to this ω, used to realize fitted random value
  // functions by their quantile (a comonotone realization).
  double value_quantile = 0.5;
  std::map<std::string, Factor> factors;  // attacker chance nodes and P_A over defender decisions
  UtilityFn utility;
};

struct AttackerModel {
  std::function<AttackerDraw(std::uint64_t index, Rng& rng)> draw;
};

// Current (inherited) Defender utility ψ_D over an ordered parent list.
struct ValueFunction {
  std::vector<std::string> parents;
  UtilityFn eval;
};

// p_D(a | parents) for a treated attacker decision.
struct Forecast {
  std::vector<std::string> parents;
  Factor factor;
};

// Ψ_A over an ordered parent list, realized per ω.
struct RandomValueFunction {
  std::vector<std::string> parents;
  std::function<UtilityFn(const AttackerDraw&)> realize;
};

}  // namespace ara::aps

#pragma once

#include <string>
#include <vector>

#include "ara/aps/solver.hpp"
#include "ara/core/random.hpp"
#include "ara/oracle/game.hpp"

namespace ara::oracle {

// Exact optimal policy for one decision by enumeration. Configurations
// follow config_index over the decision's informational parents.
struct ExactPolicy {
  std::string decision;
  std::vector<std::string> parents;
  std::vector<std::size_t> choice;                     // domain index per configuration
  std::vector<std::vector<double>> expected_utility;  // per configuration, per action
  double optimal_value(std::size_t config) const { return expected_utility[config][choice[config]]; }
};

using Solution = std::vector<ExactPolicy>;  // one entry per decision, in path order

// p_D(a | parents) for every attacker decision: the scenario weights of the
// actions chosen by the per-scenario optimal policies.
struct ExactForecast {
  std::string decision;
  std::vector<std::string> parents;
  std::vector<std::vector<double>> probabilities;  // per configuration, per action
};

// Backward induction for the Attacker under one scenario.
Solution solve_attacker_scenario(const DiscreteGame& g, std::size_t scenario);
std::vector<ExactForecast> exact_forecasts(const DiscreteGame& g);

// Backward induction for the Defender using the exact forecasts. Ties go to
// the smallest domain index.
Solution enumerate_defender(const DiscreteGame& g);

// Empirical distribution of A* for one decision at one parent configuration
// from m scenario draws.
std::vector<double> sample_attacker_exact(const DiscreteGame& g, const std::string& decision, std::size_t config,
                                          std::size_t m, Rng& rng);

const ExactPolicy& policy_for(const Solution& s, const std::string& decision);

// Runs the APS solver on the game and compares every DAPS optimum and every
// AAPS draw with the exact solution. AAPS draws are matched to the scenario
// their ω selected.
struct Agreement {
  std::size_t daps_points = 0;
  std::size_t daps_mismatches = 0;
  std::size_t aaps_draws = 0;
  std::size_t aaps_mismatches = 0;
  std::vector<std::string> details;  // first few mismatches
  bool exact() const { return daps_mismatches == 0 && aaps_mismatches == 0; }
};

Agreement compare_with_engine(const DiscreteGame& g, const aps::SolveOptions& options);

}  // namespace ara::oracle

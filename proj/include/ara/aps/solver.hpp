#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ara/aps/artifact.hpp"
#include "ara/aps/chain.hpp"
#include "ara/baid/baid.hpp"

namespace ara::aps {

struct StageSettings {
  ChainSettings chain;
  double grid_step = 0.05;            // interval-valued conditioning variables
  std::size_t draws_per_point = 100;  // K, attacker reductions only
  std::size_t value_draws = 10000;    // Monte Carlo size of value estimates
};

struct SolveOptions {
  StageSettings defaults;
  std::map<std::string, StageSettings> per_decision;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  // When set, P_A(dᵢ|·) is replaced after DAPS_red by a Beta centered at
  // dᵢ*(·) with this concentration.
  std::optional<double> recenter_concentration;
  double recenter_delta = 1e-3;
  // How stage outputs are carried backwards; unset means lookup grids.
  std::function<ValueFunction(const PolicyArtifact&)> value_model;
  std::function<Forecast(const PolicyArtifact&)> forecast_model;
  std::function<RandomValueFunction(const PolicyArtifact&)> random_value_model;

  const StageSettings& stage(const std::string& decision) const;
};

struct Step {
  enum class Kind { daps, aaps };
  Kind kind = Kind::daps;
  std::string label;  // DAPS1, AAPS1, ...
  baid::ReductionSet reduction;
  const std::string& decision() const { return reduction.decision; }
};

// Multi-stage driver. The plan is fixed at construction from the graph
// alone; reductions run against whatever has been installed so far, which
// lets a pipeline restore earlier stages from disk.
class BaidSolver {
 public:
  BaidSolver(baid::Baid baid, DefenderModel defender, AttackerModel attacker, SolveOptions options);

  const std::vector<Step>& plan() const { return plan_; }
  const Step& step(const std::string& decision) const;
  const baid::Baid& baid() const { return baid_; }
  const SolveOptions& options() const { return options_; }

  GridSpec default_grid(const Step& step) const;

  PolicyArtifact daps_reduce(const Step& step, const GridSpec& grid) const;
  PolicyArtifact aaps_reduce(const Step& step, const GridSpec& grid) const;
  PolicyArtifact reduce(const Step& step) const;

  // Belief updates after a reduction.
  void install_daps(const Step& step, const PolicyArtifact& a, ValueFunction value);
  void install_aaps(const Step& step, const PolicyArtifact& a, Forecast forecast, RandomValueFunction value);
  void install(const Step& step, const PolicyArtifact& a);  // via the options' models

  std::vector<PolicyArtifact> solve();

  // The ω-draws shared by every attacker reduction (common random numbers).
  AttackerDraw attacker_draw(std::uint64_t k) const;

  // Compiled augmented distributions, exposed for tests.
  Problem defender_problem(const Step& step) const;
  Problem attacker_problem(const Step& step, const AttackerDraw& draw) const;

  std::uint64_t stage_seed(const Step& step) const;

 private:
  baid::Baid baid_;
  DefenderModel defender_;
  AttackerModel attacker_;
  SolveOptions options_;
  std::vector<Step> plan_;

  ValueFunction defender_value_;
  RandomValueFunction attacker_value_;
  std::map<std::string, Forecast> forecasts_;
  std::map<std::string, Forecast> recentered_;
};

// Full backward solve with lookup grids (or the options' models).
std::vector<PolicyArtifact> solve_baid(const baid::Baid& baid, const DefenderModel& defender,
                                       const AttackerModel& attacker, const SolveOptions& options);

}  // namespace ara::aps

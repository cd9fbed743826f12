#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ara/aps/model.hpp"
#include "ara/baid/baid.hpp"
#include "ara/core/grid.hpp"

namespace ara::aps {

enum class Representation { lookup_grid, fitted_model };

// Output of one reduction. DAPS artifacts carry the optimal decision and a
// value estimate per grid point; AAPS artifacts carry K attack draws and K
// realized optimal values per grid point (column k belongs to ω_k).
struct PolicyArtifact {
  std::string decision;
  baid::Agent agent = baid::Agent::defender;
  baid::Domain decision_domain = baid::Domain::interval(0.0, 1.0);
  std::vector<std::string> conditioning;
  GridSpec grid;
  std::vector<std::vector<double>> points;

  std::vector<double> optimal;                // DAPS
  std::vector<std::vector<double>> draws;     // AAPS, K per point
  std::vector<std::vector<double>> values;    // 1 (DAPS) or K (AAPS) per point

  // DAPS: E[x] at the optimum for each node of 𝒳_c, per point.
  std::vector<std::string> expectation_nodes;
  std::vector<std::vector<double>> expectations;

  std::vector<double> trace;  // decision chain, kept for single-point DAPS grids

  Representation representation = Representation::lookup_grid;
  std::string model_ref;
  std::size_t convergence_warnings = 0;
  nlohmann::json settings;

  bool is_daps() const { return agent == baid::Agent::defender; }
  std::size_t draws_per_point() const { return draws.empty() ? 0 : draws.front().size(); }
};

// Lookup-grid backed functions. Continuous axes interpolate multilinearly,
// discrete axes use the nearest listed value.
ValueFunction lookup_value_function(const PolicyArtifact& a);
double lookup_optimal(const PolicyArtifact& a, Values x);
Forecast lookup_forecast(const PolicyArtifact& a);
RandomValueFunction lookup_random_value(const PolicyArtifact& a);

// Beta-family conditional centered at d*(·), for the Attacker's updated
// beliefs about a reduced Defender decision.
struct BetaShape {
  double alpha = 1.0;
  double beta = 1.0;
};
BetaShape recenter_beta(double d_star, double concentration, double delta);
Factor recenter_attacker_beliefs(const PolicyArtifact& policy, double concentration, double delta = 1e-3);

// CSV with a JSON sidecar. Columns: conditioning variables, decision (and
// draw index for AAPS), value, expectations.
void save_artifact(const std::filesystem::path& csv, const PolicyArtifact& a);
PolicyArtifact load_artifact(const std::filesystem::path& csv);

}  // namespace ara::aps

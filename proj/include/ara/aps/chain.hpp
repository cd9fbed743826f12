#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ara/aps/model.hpp"
#include "ara/baid/domain.hpp"

namespace ara::aps {

struct ChainSettings {
  std::size_t iterations = 20000;
  std::size_t burn_in = 4000;
  int augmentation = 1;
  double proposal_scale = 0.1;  // fraction of the interval width
  std::uint64_t seed = 0;

  static ChainSettings with_iterations(std::size_t n, int h = 1);
  void validate() const;  // throws std::invalid_argument
};

// Accepts with probability min{1, ratio · ∏ proposed[t]/current[t]}.
bool mh_accept(Values proposed_utilities, Values current_utilities, double proposal_ratio, Rng& rng);

struct BoundFactor {
  std::size_t slot = 0;
  std::vector<std::size_t> parents;
  Factor factor;
};

// An augmented distribution compiled to slot indices (one slot per diagram
// node). Conditioning slots are filled by the caller.
struct Problem {
  std::size_t slot_count = 0;
  std::size_t decision_slot = 0;
  baid::Domain decision_domain = baid::Domain::interval(0.0, 1.0);
  std::vector<BoundFactor> sampled;     // ancestral order
  std::vector<BoundFactor> likelihood;  // evaluated through density
  std::vector<std::size_t> utility_parents;
  UtilityFn utility;
};

struct AugmentedSample {
  std::vector<double> assignment;  // copy 0 of the accepted state, all slots
  std::vector<double> utilities;   // the h utility values of the accepted state
};

struct ModeEstimate {
  double value = 0.0;
  double bandwidth = 0.0;
  double density_at_mode = 0.0;
  std::size_t sample_count = 0;
};

struct ChainResult {
  std::vector<double> decisions;  // post burn-in
  std::vector<AugmentedSample> states;
  ModeEstimate mode;
  double acceptance_rate = 0.0;
  std::optional<std::string> warning;
};

// Metropolis-Hastings on π^h: h ancestral copies of every sampled node are
// redrawn with each proposal.
ChainResult run_chain(const Problem& problem, std::vector<double> assignment, const ChainSettings& settings, Rng& rng,
                      bool record_states = false);

struct ValueEstimate {
  double value = 0.0;
  std::vector<double> node_means;  // E[x] for each sampled factor, same order
};

// Monte Carlo estimate of the expected utility at the assignment's decision.
// Likelihood terms are handled by self-normalized weighting.
ValueEstimate estimate_value(const Problem& problem, std::vector<double> assignment, std::size_t draws, Rng& rng);

// Geweke-style z score: first 10% vs last 50%, batch-means variances.
double geweke_z(const std::vector<double>& x);

}  // namespace ara::aps

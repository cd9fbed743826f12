#pragma once

#include <cstdint>

#include "ara/aps/model.hpp"
#include "ara/baid/baid.hpp"
#include "ara/disinfo/params.hpp"

namespace ara::disinfo {

struct Theta1Params {
  double mu = 0.0;
  double tau1 = 0.0;
  double tau2 = 0.0;
  bool degenerate_zero = false;  // no attack, no recognition
};

// Mean-μ Beta with shapes α·μ·(φ+ε), α·(1−μ)·(φ+ε), φ = max(1/μ, 1/(1−μ)).
Theta1Params beta_by_mean(double mu, double alpha, double eps);

Theta1Params theta1_params(double d1, double a1, double a2, const CaseParams& p);

struct Binomial {
  std::int64_t n_trials = 0;
  double p = 0.0;
  double mean() const { return static_cast<double>(n_trials) * p; }
};

Binomial theta2_dist(double d2, double a2, double theta1, const CaseParams& p);

// Health cost, with the private-transfer branch above capacity.
double health_cost(double theta2, double r, double c, double l);

// Throws PositivityError when the result is not strictly positive.
double u_D(double d1, double d2, double theta2, const CaseParams& p);

// Defender's guess at her own counter-campaign, as the Attacker would make it.
double mu_d2(double d1, double theta1, double a2, const CaseParams& p);

// One realization of the random quantities in the Attacker model.
struct AttackerInstance {
  double kappa_theta1 = 1.0;
  double kappa_d2 = 1.0;
  double kappa_d1 = 1.0;
  double phi2_factor = 1.0;
  double y2 = 0.0;
  double r1 = 0.0;
  double c = 0.0;
  double l = 0.0;
  double value_quantile = 0.5;
};

AttackerInstance sample_attacker_instance(const CaseParams& p, Rng& rng);

double u_A(const AttackerInstance& w, double a1, double a2, double theta2, const CaseParams& p);

// Corner minima: decisions in {0,1}, θ₂ in {0, c, n}.
double min_defender_utility(const CaseParams& p);
double min_attacker_utility(const CaseParams& p);  // worst case over the δ-bands

// Builds the realized attacker problem; checks the realized utility on the
// corner set.
aps::AttackerDraw realize(const AttackerInstance& w, const CaseParams& p, std::uint64_t index);
aps::AttackerDraw draw_attacker_instance(const CaseParams& p, Rng& rng, std::uint64_t index = 0);

// Node ids used by the case diagram.
baid::Baid case_baid();
aps::DefenderModel defender_model(const CaseParams& p);
aps::AttackerModel attacker_model(const CaseParams& p);

}  // namespace ara::disinfo

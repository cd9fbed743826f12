#include "ara/disinfo/model.hpp"

#include <algorithm>
#include <cmath>

#include "ara/core/errors.hpp"

namespace ara::disinfo {

using aps::Factor;
using aps::Values;

Theta1Params beta_by_mean(double mu, double alpha, double eps) {
  Theta1Params t;
  t.mu = mu;
  const double phi = std::max(1.0 / mu, 1.0 / (1.0 - mu));
  t.tau1 = alpha * mu * (phi + eps);
  t.tau2 = alpha * (1.0 - mu) * (phi + eps);
  return t;
}

Theta1Params theta1_params(double d1, double a1, double a2, const CaseParams& p) {
  if (a2 <= 0.0) {
    Theta1Params t;
    t.degenerate_zero = true;
    return t;
  }
  const double mu = std::min(a2 * (d1 + p.t_d) / (a1 + p.t_a), 1.0 - p.delta);
  return beta_by_mean(mu, p.alpha_theta1, p.epsilon);
}

Binomial theta2_dist(double d2, double a2, double theta1, const CaseParams& p) {
  Binomial b;
  b.n_trials = static_cast<std::int64_t>(std::floor(a2 * p.n));
  b.p = std::clamp(a2 - p.omega_d2 * theta1 * d2, 0.0, 1.0);
  return b;
}

double health_cost(double theta2, double r, double c, double l) {
  return r * theta2 + std::max(0.0, theta2 - c) * l;
}

double u_D(double d1, double d2, double theta2, const CaseParams& p) {
  const double m1 = p.b_d1 * d1 + p.d1_0;
  const double m2 = p.b_d2 * d2;
  const double u = -m1 - m2 - health_cost(theta2, p.r, p.c, p.l) + p.gamma_D;
  if (!(u > 0.0)) throw PositivityError("u_D = " + std::to_string(u) + " is not positive; gamma_D is too small");
  return u;
}

double mu_d2(double d1, double theta1, double a2, const CaseParams& p) {
  if (a2 <= 0.0 || theta1 <= 0.0) return 0.0;
  return std::min(theta1 * a2 / (a2 + (1.0 - d1)), 1.0 - p.delta);
}

AttackerInstance sample_attacker_instance(const CaseParams& p, Rng& rng) {
  AttackerInstance w;
  w.kappa_theta1 = uniform(rng, p.kappa_theta1_lo, p.kappa_theta1_hi);
  w.kappa_d2 = uniform(rng, p.kappa_d2_lo, p.kappa_d2_hi);
  w.kappa_d1 = uniform(rng, p.kappa_d1_lo, p.kappa_d1_hi);
  w.phi2_factor = uniform(rng, 1.0 - p.half_phi2, 1.0 + p.half_phi2);
  w.y2 = p.y2A * uniform(rng, 1.0 - p.half_y2A, 1.0 + p.half_y2A);
  w.r1 = p.r * uniform(rng, 1.0 - p.half_r1A, 1.0 + p.half_r1A);
  w.c = p.c * uniform(rng, 1.0 - p.half_cA, 1.0 + p.half_cA);
  w.l = p.l * uniform(rng, 1.0 - p.half_lA, 1.0 + p.half_lA);
  w.value_quantile = uniform01(rng);
  return w;
}

double u_A(const AttackerInstance& w, double a1, double a2, double theta2, const CaseParams& p) {
  return -p.b_a1 * a1 - w.y2 * a2 + health_cost(theta2, w.r1, w.c, w.l) + p.gamma_A;
}

double min_defender_utility(const CaseParams& p) {
  double best = INFINITY;
  for (double d1 : {0.0, 1.0})
    for (double d2 : {0.0, 1.0})
      for (double t : {0.0, p.c, p.n})
        best = std::min(best, -(p.b_d1 * d1 + p.d1_0) - p.b_d2 * d2 - health_cost(t, p.r, p.c, p.l) + p.gamma_D);
  return best;
}

double min_attacker_utility(const CaseParams& p) {
  // Health gains are non-negative, so the worst case is full investment, no
  // damage and the largest campaign cost in the band.
  return -p.b_a1 - p.y2A * (1.0 + p.half_y2A) + p.gamma_A;
}

aps::AttackerDraw realize(const AttackerInstance& w, const CaseParams& p, std::uint64_t index) {
  for (double a1 : {0.0, 1.0})
    for (double a2 : {0.0, 1.0})
      for (double t : {0.0, w.c, p.n})
        if (!(u_A(w, a1, a2, t, p) > 0.0)) throw PositivityError("realized U_A is not positive on the corner set");

  aps::AttackerDraw draw;
  draw.index = index;
  draw.value_quantile = w.value_quantile;

  draw.factors["theta1"] = Factor{[p, w](Values x, Rng& rng) {
                                    // parents: d1, a1, a2
                                    const auto t = theta1_params(x[0], x[1], x[2], p);
                                    if (t.degenerate_zero) return 0.0;
                                    return sample_beta(rng, w.kappa_theta1 * t.tau1, w.kappa_theta1 * t.tau2);
                                  },
                                  {}};
  draw.factors["d2"] = Factor{[p, w](Values x, Rng& rng) {
                                // parents: d1, a2, theta1
                                const double mu = mu_d2(x[0], x[2], x[1], p);
                                if (mu <= 0.0) return 0.0;
                                const auto b = beta_by_mean(mu, p.alpha_d2, p.epsilon);
                                return sample_beta(rng, w.kappa_d2 * b.tau1, w.kappa_d2 * b.tau2);
                              },
                              {}};
  draw.factors["d1"] = Factor{[p, w](Values, Rng& rng) {
                                return sample_beta(rng, w.kappa_d1 * p.mu_d1, w.kappa_d1 * (1.0 - p.mu_d1));
                              },
                              {}};
  draw.factors["theta2"] = Factor{[p, w](Values x, Rng& rng) {
                                    // parents: d2, a2, theta1
                                    const auto trials = static_cast<std::int64_t>(std::floor(x[1] * p.n));
                                    const double phi2 = std::max(0.0, x[1] - p.omega_d2 * x[2] * x[0]);
                                    const double prob = std::clamp(w.phi2_factor * phi2, 0.0, 1.0);
                                    return static_cast<double>(sample_binomial(rng, trials, prob));
                                  },
                                  {}};
  draw.utility = [p, w](Values x) { return u_A(w, x[0], x[1], x[2], p); };
  return draw;
}

aps::AttackerDraw draw_attacker_instance(const CaseParams& p, Rng& rng, std::uint64_t index) {
  return realize(sample_attacker_instance(p, rng), p, index);
}

baid::Baid case_baid() {
  using baid::Agent;
  using baid::Domain;
  using baid::Node;
  using baid::NodeKind;
  auto decision = [](std::string id, std::string label, Agent a, std::vector<std::string> parents, int stage) {
    Node n;
    n.id = std::move(id);
    n.label = std::move(label);
    n.kind = NodeKind::decision;
    n.agent = a;
    n.domain = Domain::interval(0.0, 1.0);
    n.parents = std::move(parents);
    n.stage = stage;
    return n;
  };
  auto chance = [](std::string id, std::string label, Domain d, std::vector<std::string> parents) {
    Node n;
    n.id = id;
    n.label = std::move(label);
    n.kind = NodeKind::chance;
    n.owner = baid::Owner::shared;
    n.domain = std::move(d);
    n.parents = std::move(parents);
    n.binding = id;
    return n;
  };
  auto utility = [](std::string id, std::string label, Agent a, std::vector<std::string> parents, std::string bind) {
    Node n;
    n.id = std::move(id);
    n.label = std::move(label);
    n.kind = NodeKind::utility;
    n.agent = a;
    n.parents = std::move(parents);
    n.binding = std::move(bind);
    return n;
  };
  return baid::Baid(
      "disinformation-war",
      {decision("d1", "D1 pre-bunking investment", Agent::defender, {}, 1),
       decision("a1", "A1 disinformation infrastructure", Agent::attacker, {}, 1),
       decision("a2", "A2 campaign intensity", Agent::attacker, {"d1", "a1"}, 2),
       chance("theta1", "Theta1 recognition of the campaign", Domain::interval(0.0, 1.0), {"d1", "a1", "a2"}),
       decision("d2", "D2 counter-campaign intensity", Agent::defender, {"d1", "a2", "theta1"}, 3),
       chance("theta2", "Theta2 people affected", Domain::integers(0, 180000), {"d2", "a2", "theta1"}),
       utility("uD", "Defender utility", Agent::defender, {"d1", "d2", "theta2"}, "u_D"),
       utility("uA", "Attacker utility", Agent::attacker, {"a1", "a2", "theta2"}, "u_A")});
}

aps::DefenderModel defender_model(const CaseParams& p) {
  aps::DefenderModel m;
  m.factors["theta1"] = Factor{[p](Values x, Rng& rng) {
                                 const auto t = theta1_params(x[0], x[1], x[2], p);
                                 if (t.degenerate_zero) return 0.0;
                                 return sample_beta(rng, t.tau1, t.tau2);
                               },
                               {}};
  m.factors["theta2"] = Factor{[p](Values x, Rng& rng) {
                                 const auto b = theta2_dist(x[0], x[1], x[2], p);
                                 return static_cast<double>(sample_binomial(rng, b.n_trials, b.p));
                               },
                               {}};
  m.utility = [p](Values x) { return u_D(x[0], x[1], x[2], p); };
  return m;
}

aps::AttackerModel attacker_model(const CaseParams& p) {
  return {[p](std::uint64_t index, Rng& rng) { return draw_attacker_instance(p, rng, index); }};
}

}  // namespace ara::disinfo

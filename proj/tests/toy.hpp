#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ara/aps/chain.hpp"
#include "ara/baid/baid.hpp"

namespace ara::test {

inline baid::Node decision(std::string id, baid::Agent a, std::vector<std::string> parents, std::optional<int> stage = {},
                           baid::Domain dom = baid::Domain::discrete({0, 1})) {
  baid::Node n;
  n.id = std::move(id);
  n.kind = baid::NodeKind::decision;
  n.agent = a;
  n.domain = std::move(dom);
  n.parents = std::move(parents);
  n.stage = stage;
  return n;
}

inline baid::Node chance(std::string id, std::vector<std::string> parents, baid::Owner o = baid::Owner::shared,
                         baid::Domain dom = baid::Domain::discrete({0, 1})) {
  baid::Node n;
  n.id = std::move(id);
  n.kind = baid::NodeKind::chance;
  n.owner = o;
  n.domain = std::move(dom);
  n.parents = std::move(parents);
  return n;
}

inline baid::Node utility(std::string id, baid::Agent a, std::vector<std::string> parents) {
  baid::Node n;
  n.id = std::move(id);
  n.kind = baid::NodeKind::utility;
  n.agent = a;
  n.parents = std::move(parents);
  return n;
}

inline double bernoulli(double p, Rng& rng) { return uniform01(rng) < p ? 1.0 : 0.0; }

// D, A, θ all binary: p(a=1) = pa, p(θ=1|d,a) = 0.9 if d = a else 0.2,
// u(d,θ) = 1 + θ. Slots: 0 = D, 1 = A, 2 = θ.
inline aps::Problem toy_defender_problem(double pa) {
  aps::Problem p;
  p.slot_count = 3;
  p.decision_slot = 0;
  p.decision_domain = baid::Domain::discrete({0, 1});
  aps::BoundFactor a;
  a.slot = 1;
  a.factor.sample = [pa](aps::Values, Rng& rng) { return bernoulli(pa, rng); };
  aps::BoundFactor t;
  t.slot = 2;
  t.parents = {0, 1};
  t.factor.sample = [](aps::Values x, Rng& rng) { return bernoulli(x[0] == x[1] ? 0.9 : 0.2, rng); };
  p.sampled = {a, t};
  p.utility_parents = {2};
  p.utility = [](aps::Values x) { return 1.0 + x[0]; };
  return p;
}

// Exact expected utility of the toy problem.
inline double toy_psi(double d, double pa) {
  auto pt = [&](double a) { return d == a ? 0.9 : 0.2; };
  return pa * (1.0 + pt(1.0)) + (1.0 - pa) * (1.0 + pt(0.0));
}

}  // namespace ara::test

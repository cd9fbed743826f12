#include "ara/oracle/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ara/core/errors.hpp"

namespace ara::oracle {

using baid::Agent;
using baid::NodeKind;

namespace {

// Probability table of one node in an agent's diagram; null means the factor
// is constant (an opponent decision that every own decision observes).
struct Term {
  std::size_t node;
  std::vector<std::size_t> parents;
  const std::vector<double>* table;
};

std::size_t config_of(const baid::Baid& b, const std::vector<std::size_t>& parents, const std::vector<std::size_t>& x) {
  std::size_t flat = 0;
  for (auto p : parents) flat = flat * b.node(p).domain->size() + x[p];
  return flat;
}

// Backward induction over the agent's decision path by full enumeration of
// the joint configurations of its diagram.
Solution solve_agent(const baid::Baid& b, Agent agent, const std::map<std::string, const std::vector<double>*>& tables) {
  const auto path = baid::decision_path(b, agent).nodes;
  std::vector<std::size_t> own;
  for (const auto& id : path) own.push_back(b.index(id));
  for (std::size_t k = 0; k < own.size(); ++k)
    for (std::size_t j = 0; j < k; ++j) {
      const auto& ps = b.parent_indices(own[k]);
      if (std::find(ps.begin(), ps.end(), own[j]) == ps.end())
        throw std::invalid_argument("oracle needs every decision to observe the agent's earlier decisions");
    }

  std::vector<std::size_t> vars;
  std::vector<Term> terms;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (!b.in_view(i, agent) || b.node(i).kind == NodeKind::utility) continue;
    vars.push_back(i);
    const auto& n = b.node(i);
    if (n.kind == NodeKind::decision && n.agent == agent) continue;
    auto it = tables.find(n.id);
    if (it == tables.end()) {
      if (n.kind == NodeKind::chance) throw DataError("oracle: no table for " + n.id);
      for (auto d : own) {
        const auto& ps = b.parent_indices(d);
        if (std::find(ps.begin(), ps.end(), i) == ps.end())
          throw DataError("oracle: no table for " + n.id + ", which " + b.node(d).id + " does not observe");
      }
    }
    terms.push_back({i, b.parent_indices(i), it == tables.end() ? nullptr : it->second});
  }
  const auto u_node = *b.utility_of(agent);
  const auto& u_table = *tables.at(b.node(u_node).id);
  const auto& u_parents = b.parent_indices(u_node);

  // Joint configurations with their weight and utility.
  struct Cell {
    std::vector<std::size_t> x;
    double weight;
    double utility;
  };
  std::vector<Cell> cells;
  std::vector<std::size_t> x(b.size(), 0);
  auto next = [&] {
    for (std::size_t v = vars.size(); v-- > 0;) {
      if (++x[vars[v]] < b.node(vars[v]).domain->size()) return true;
      x[vars[v]] = 0;
    }
    return false;
  };
  do {
    double w = 1.0;
    for (const auto& t : terms)
      if (t.table) w *= (*t.table)[config_of(b, t.parents, x) * b.node(t.node).domain->size() + x[t.node]];
    if (w > 0.0) cells.push_back({x, w, u_table[config_of(b, u_parents, x)]});
  } while (next());

  Solution sol(own.size());
  for (std::size_t k = own.size(); k-- > 0;) {
    const auto d = own[k];
    auto& pol = sol[k];
    pol.decision = b.node(d).id;
    for (auto p : b.parent_indices(d)) pol.parents.push_back(b.node(p).id);
    const auto configs = config_count(b, b.parent_indices(d));
    const auto actions = b.node(d).domain->size();
    std::vector<std::vector<double>> num(configs, std::vector<double>(actions, 0.0));
    std::vector<std::vector<double>> den = num;
    for (const auto& c : cells) {
      bool follows = true;
      for (std::size_t j = k + 1; j < own.size() && follows; ++j)
        follows = c.x[own[j]] == sol[j].choice[config_of(b, b.parent_indices(own[j]), c.x)];
      if (!follows) continue;
      const auto cfg = config_of(b, b.parent_indices(d), c.x);
      num[cfg][c.x[d]] += c.weight * c.utility;
      den[cfg][c.x[d]] += c.weight;
    }
    pol.choice.assign(configs, 0);
    pol.expected_utility.assign(configs, std::vector<double>(actions, 0.0));
    for (std::size_t cfg = 0; cfg < configs; ++cfg) {
      for (std::size_t a = 0; a < actions; ++a)
        pol.expected_utility[cfg][a] = den[cfg][a] > 0.0 ? num[cfg][a] / den[cfg][a] : 0.0;
      const auto& eu = pol.expected_utility[cfg];
      std::size_t best = 0;
      for (std::size_t a = 1; a < actions; ++a)
        if (eu[a] > eu[best] * (1.0 + 1e-12)) best = a;
      pol.choice[cfg] = best;
    }
  }
  return sol;
}

std::map<std::string, const std::vector<double>*> pointers(const Tables& t) {
  std::map<std::string, const std::vector<double>*> out;
  for (const auto& [k, v] : t) out[k] = &v;
  return out;
}

}  // namespace

const ExactPolicy& policy_for(const Solution& s, const std::string& decision) {
  for (const auto& p : s)
    if (p.decision == decision) return p;
  throw std::out_of_range("no policy for " + decision);
}

Solution solve_attacker_scenario(const DiscreteGame& g, std::size_t scenario) {
  return solve_agent(g.baid, Agent::attacker, pointers(g.attacker.at(scenario).tables));
}

std::vector<ExactForecast> exact_forecasts(const DiscreteGame& g) {
  double total = 0.0;
  for (const auto& s : g.attacker) total += s.weight;
  std::vector<ExactForecast> out;
  for (std::size_t s = 0; s < g.attacker.size(); ++s) {
    const auto sol = solve_attacker_scenario(g, s);
    if (out.empty())
      for (const auto& p : sol)
        out.push_back({p.decision, p.parents,
                       std::vector<std::vector<double>>(p.choice.size(),
                                                        std::vector<double>(g.baid.node(p.decision).domain->size(), 0.0))});
    for (std::size_t k = 0; k < sol.size(); ++k)
      for (std::size_t c = 0; c < sol[k].choice.size(); ++c)
        out[k].probabilities[c][sol[k].choice[c]] += g.attacker[s].weight / total;
  }
  return out;
}

Solution enumerate_defender(const DiscreteGame& g) {
  const auto forecasts = exact_forecasts(g);
  std::vector<std::vector<double>> flat;
  for (const auto& f : forecasts) {
    std::vector<double> t;
    for (const auto& row : f.probabilities) t.insert(t.end(), row.begin(), row.end());
    flat.push_back(std::move(t));
  }
  auto tables = pointers(g.defender);
  for (std::size_t k = 0; k < forecasts.size(); ++k) tables[forecasts[k].decision] = &flat[k];
  return solve_agent(g.baid, Agent::defender, tables);
}

std::vector<double> sample_attacker_exact(const DiscreteGame& g, const std::string& decision, std::size_t config,
                                          std::size_t m, Rng& rng) {
  if (m == 0) throw std::invalid_argument("need at least one draw");
  std::vector<std::size_t> choice;
  for (std::size_t s = 0; s < g.attacker.size(); ++s)
    choice.push_back(policy_for(solve_attacker_scenario(g, s), decision).choice.at(config));
  std::vector<double> freq(g.baid.node(decision).domain->size(), 0.0);
  for (std::size_t i = 0; i < m; ++i) freq[choice[scenario_of(g, uniform01(rng))]] += 1.0;
  for (auto& f : freq) f /= static_cast<double>(m);
  return freq;
}

namespace {

// Artifact point matching an oracle configuration of the decision's parents.
std::size_t point_for(const baid::Baid& b, const ExactPolicy& pol, const aps::PolicyArtifact& a, std::size_t config) {
  std::vector<double> values(pol.parents.size());
  for (std::size_t k = pol.parents.size(); k-- > 0;) {
    const auto& dom = *b.node(pol.parents[k]).domain;
    values[k] = dom.value(config % dom.size());
    config /= dom.size();
  }
  std::vector<double> want;
  for (const auto& c : a.conditioning) {
    const auto it = std::find(pol.parents.begin(), pol.parents.end(), c);
    if (it == pol.parents.end()) throw std::logic_error(c + " conditions " + a.decision + " without being observed");
    want.push_back(values[static_cast<std::size_t>(it - pol.parents.begin())]);
  }
  for (std::size_t p = 0; p < a.points.size(); ++p) {
    bool same = true;
    for (std::size_t j = 0; j < want.size() && same; ++j) same = std::abs(a.points[p][j] - want[j]) <= 1e-9;
    if (same) return p;
  }
  throw std::logic_error("no grid point of " + a.decision + " matches an oracle configuration");
}

}  // namespace

Agreement compare_with_engine(const DiscreteGame& g, const aps::SolveOptions& options) {
  aps::BaidSolver solver(g.baid, defender_model(g), attacker_model(g), options);
  const auto artifacts = solver.solve();
  const auto defender = enumerate_defender(g);
  std::vector<Solution> scenarios;
  for (std::size_t s = 0; s < g.attacker.size(); ++s) scenarios.push_back(solve_attacker_scenario(g, s));

  Agreement out;
  auto note = [&](const std::string& msg) {
    if (out.details.size() < 10) out.details.push_back(msg);
  };
  for (const auto& a : artifacts) {
    const auto& dom = *g.baid.node(a.decision).domain;
    if (a.is_daps()) {
      const auto& pol = policy_for(defender, a.decision);
      for (std::size_t c = 0; c < pol.choice.size(); ++c) {
        const auto p = point_for(g.baid, pol, a, c);
        ++out.daps_points;
        if (a.optimal[p] != dom.value(pol.choice[c])) {
          ++out.daps_mismatches;
          note(a.decision + " config " + std::to_string(c) + ": engine " + std::to_string(a.optimal[p]) + ", oracle " +
               std::to_string(dom.value(pol.choice[c])));
        }
      }
      continue;
    }
    for (std::size_t k = 0; k < a.draws_per_point(); ++k) {
      const auto s = scenario_of(g, solver.attacker_draw(k).value_quantile);
      const auto& pol = policy_for(scenarios[s], a.decision);
      for (std::size_t c = 0; c < pol.choice.size(); ++c) {
        const auto p = point_for(g.baid, pol, a, c);
        ++out.aaps_draws;
        if (a.draws[p][k] != dom.value(pol.choice[c])) {
          ++out.aaps_mismatches;
          note(a.decision + " config " + std::to_string(c) + " draw " + std::to_string(k) + " (scenario " +
               std::to_string(s) + "): engine " + std::to_string(a.draws[p][k]) + ", oracle " +
               std::to_string(dom.value(pol.choice[c])));
        }
      }
    }
  }
  return out;
}

}  // namespace ara::oracle

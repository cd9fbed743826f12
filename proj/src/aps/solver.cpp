#include "ara/aps/solver.hpp"

#include <algorithm>
#include <numeric>

#include "ara/core/errors.hpp"
#include "ara/core/parallel.hpp"

namespace ara::aps {

using baid::Agent;
using baid::NodeKind;

const StageSettings& SolveOptions::stage(const std::string& decision) const {
  auto it = per_decision.find(decision);
  return it == per_decision.end() ? defaults : it->second;
}

namespace {

bool subset(const std::vector<std::string>& a, const std::set<std::string>& b) {
  return std::all_of(a.begin(), a.end(), [&](const auto& x) { return b.count(x) > 0; });
}

struct Source {
  std::vector<std::string> parents;
  Factor factor;
};

// Compiles a reduction into slot form: sampled nodes in an order where each
// factor's parents are already known.
Problem compile(const baid::Baid& g, const baid::ReductionSet& rs, const std::function<Source(const std::string&)>& source,
                const std::vector<std::string>& utility_parents, UtilityFn utility) {
  Problem p;
  p.slot_count = g.size();
  p.decision_slot = g.index(rs.decision);
  p.decision_domain = *g.node(rs.decision).domain;

  std::set<std::string> known(rs.inherited_parents.begin(), rs.inherited_parents.end());
  known.insert(rs.decision);

  std::vector<std::pair<std::string, Source>> pending;
  for (const auto& x : rs.chance_nodes) pending.emplace_back(x, source(x));
  while (!pending.empty()) {
    auto it = std::find_if(pending.begin(), pending.end(), [&](const auto& e) { return subset(e.second.parents, known); });
    if (it == pending.end()) {
      std::string names;
      for (const auto& e : pending) names += " " + e.first;
      throw BindingError("reduction of " + rs.decision + " cannot be sampled ancestrally from the original factors (" +
                         names + " )");
    }
    BoundFactor b;
    b.slot = g.index(it->first);
    for (const auto& q : it->second.parents) b.parents.push_back(g.index(q));
    b.factor = std::move(it->second.factor);
    if (!b.factor.sample) throw BindingError("no sampler bound for " + it->first);
    p.sampled.push_back(std::move(b));
    known.insert(it->first);
    pending.erase(it);
  }
  for (const auto& y : rs.likelihood_nodes) {
    auto s = source(y);
    if (!subset(s.parents, known) || !known.count(y))
      throw BindingError("likelihood term for " + y + " is not computable in the reduction of " + rs.decision);
    if (!s.factor.density) throw BindingError("no density bound for likelihood node " + y);
    BoundFactor b;
    b.slot = g.index(y);
    for (const auto& q : s.parents) b.parents.push_back(g.index(q));
    b.factor = std::move(s.factor);
    p.likelihood.push_back(std::move(b));
  }
  if (!subset(utility_parents, known)) throw BindingError("utility arguments not available when reducing " + rs.decision);
  for (const auto& q : utility_parents) p.utility_parents.push_back(g.index(q));
  p.utility = std::move(utility);
  return p;
}

}  // namespace

BaidSolver::BaidSolver(baid::Baid g, DefenderModel defender, AttackerModel attacker, SolveOptions options)
    : baid_(std::move(g)), defender_(std::move(defender)), attacker_(std::move(attacker)), options_(std::move(options)) {
  const auto report = baid::validate_proper(baid_);
  if (!report.proper()) {
    std::string msg = "diagram is not a proper BAID:";
    for (const auto& v : report.violations) msg += "\n  " + v;
    throw ValidationError(msg);
  }
  const auto dseq = baid::reduction_sequence(baid_, Agent::defender);
  const auto aseq = baid::reduction_sequence(baid_, Agent::attacker);
  std::set<std::string> treated;
  std::size_t i = 0, j = 0;
  int nd = 0, na = 0;
  while (i < dseq.size()) {
    if (subset(dseq[i].requires_untreated, treated)) {
      plan_.push_back({Step::Kind::daps, "DAPS" + std::to_string(++nd), dseq[i]});
      ++i;
    } else {
      if (j >= aseq.size())
        throw ValidationError("forecasts needed by " + dseq[i].decision + " cannot be produced by the attacker path");
      plan_.push_back({Step::Kind::aaps, "AAPS" + std::to_string(++na), aseq[j]});
      treated.insert(aseq[j].decision);
      ++j;
    }
  }

  const auto ud = *baid_.utility_of(Agent::defender);
  defender_value_ = {baid_.node(ud).parents, defender_.utility};
  const auto ua = *baid_.utility_of(Agent::attacker);
  attacker_value_.parents = baid_.node(ua).parents;
  attacker_value_.realize = [](const AttackerDraw& w) { return w.utility; };
}

const Step& BaidSolver::step(const std::string& decision) const {
  for (const auto& s : plan_)
    if (s.decision() == decision) return s;
  throw std::out_of_range("no reduction step for " + decision);
}

std::uint64_t BaidSolver::stage_seed(const Step& step) const {
  return mix_seed(options_.seed, {label_hash(step.decision()), options_.stage(step.decision()).chain.seed});
}

AttackerDraw BaidSolver::attacker_draw(std::uint64_t k) const {
  if (!attacker_.draw) throw BindingError("no attacker model bound");
  auto rng = make_rng(options_.seed, {0x0a77ac4e5ULL, k});
  return attacker_.draw(k, rng);
}

GridSpec BaidSolver::default_grid(const Step& step) const {
  GridSpec g;
  const double h = options_.stage(step.decision()).grid_step;
  for (const auto& c : step.reduction.inherited_parents) {
    const auto& dom = *baid_.node(c).domain;
    if (dom.is_interval())
      g.dims.push_back(GridDim::range(dom.lo(), dom.hi(), h * dom.width()));
    else
      g.dims.push_back(GridDim::list(dom.values()));
  }
  return g;
}

Problem BaidSolver::defender_problem(const Step& step) const {
  const auto& rs = step.reduction;
  auto source = [&](const std::string& x) -> Source {
    const auto& n = baid_.node(x);
    if (n.kind == NodeKind::decision) {
      auto it = forecasts_.find(x);
      if (it == forecasts_.end()) throw BindingError("no forecast installed for attacker decision " + x);
      return {it->second.parents, it->second.factor};
    }
    auto it = defender_.factors.find(x);
    if (it == defender_.factors.end()) throw BindingError("no defender factor bound for " + x);
    return {n.parents, it->second};
  };
  return compile(baid_, rs, source, defender_value_.parents, defender_value_.eval);
}

Problem BaidSolver::attacker_problem(const Step& step, const AttackerDraw& draw) const {
  const auto& rs = step.reduction;
  auto source = [&](const std::string& x) -> Source {
    const auto& n = baid_.node(x);
    if (n.kind == NodeKind::decision) {
      auto it = recentered_.find(x);
      if (it != recentered_.end()) return {it->second.parents, it->second.factor};
    }
    auto it = draw.factors.find(x);
    if (it == draw.factors.end()) throw BindingError("attacker draw has no factor for " + x);
    return {n.parents, it->second};
  };
  return compile(baid_, rs, source, attacker_value_.parents, attacker_value_.realize(draw));
}

namespace {

PolicyArtifact blank(const baid::Baid& g, const Step& step, const GridSpec& grid, const StageSettings& ss) {
  if (grid.dims.size() != step.reduction.inherited_parents.size())
    throw std::invalid_argument("grid dimension does not match the conditioning of " + step.decision());
  PolicyArtifact a;
  a.decision = step.decision();
  a.agent = step.reduction.agent;
  a.decision_domain = *g.node(step.decision()).domain;
  a.conditioning = step.reduction.inherited_parents;
  a.grid = grid;
  a.points = make_grid(grid);
  if (a.points.empty()) throw std::invalid_argument("empty grid");
  a.settings = {{"label", step.label},
                {"iterations", ss.chain.iterations},
                {"burn_in", ss.chain.burn_in},
                {"augmentation", ss.chain.augmentation},
                {"proposal_scale", ss.chain.proposal_scale},
                {"value_draws", ss.value_draws}};
  return a;
}

std::vector<double> conditioned(const baid::Baid& g, const PolicyArtifact& a, std::size_t p) {
  std::vector<double> x(g.size(), 0.0);
  for (std::size_t k = 0; k < a.conditioning.size(); ++k) x[g.index(a.conditioning[k])] = a.points[p][k];
  return x;
}

}  // namespace

PolicyArtifact BaidSolver::daps_reduce(const Step& step, const GridSpec& grid) const {
  if (step.kind != Step::Kind::daps) throw std::invalid_argument(step.label + " is not a defender reduction");
  const auto& ss = options_.stage(step.decision());
  auto a = blank(baid_, step, grid, ss);
  const auto problem = defender_problem(step);
  const auto seed = stage_seed(step);
  const auto n = a.points.size();
  a.optimal.assign(n, 0.0);
  a.values.assign(n, {});
  a.expectations.assign(n, {});
  for (const auto& f : problem.sampled) a.expectation_nodes.push_back(baid_.node(f.slot).id);
  std::vector<char> warned(n, 0);
  parallel_for(n, options_.workers, [&](std::size_t p) {
    auto x = conditioned(baid_, a, p);
    auto rng = make_rng(seed, {p, 0});
    auto chain = run_chain(problem, x, ss.chain, rng);
    warned[p] = chain.warning.has_value();
    a.optimal[p] = chain.mode.value;
    x[problem.decision_slot] = chain.mode.value;
    auto vrng = make_rng(seed, {p, 1});
    auto v = estimate_value(problem, x, ss.value_draws, vrng);
    a.values[p] = {v.value};
    a.expectations[p] = v.node_means;
    if (n == 1) a.trace = std::move(chain.decisions);
  });
  a.convergence_warnings = static_cast<std::size_t>(std::count(warned.begin(), warned.end(), 1));
  return a;
}

PolicyArtifact BaidSolver::aaps_reduce(const Step& step, const GridSpec& grid) const {
  if (step.kind != Step::Kind::aaps) throw std::invalid_argument(step.label + " is not an attacker reduction");
  const auto& ss = options_.stage(step.decision());
  auto a = blank(baid_, step, grid, ss);
  a.settings["draws_per_point"] = ss.draws_per_point;
  const std::size_t K = ss.draws_per_point;
  if (K == 0) throw std::invalid_argument("attacker reduction needs K >= 1");

  std::vector<Problem> problems(K);
  parallel_for(K, options_.workers, [&](std::size_t k) { problems[k] = attacker_problem(step, attacker_draw(k)); });

  const auto seed = stage_seed(step);
  const auto n = a.points.size();
  a.draws.assign(n, std::vector<double>(K));
  a.values.assign(n, std::vector<double>(K));
  std::vector<char> warned(n * K, 0);
  parallel_for(n * K, options_.workers, [&](std::size_t item) {
    const std::size_t p = item / K, k = item % K;
    auto x = conditioned(baid_, a, p);
    auto rng = make_rng(seed, {p, k, 0});
    auto chain = run_chain(problems[k], x, ss.chain, rng);
    warned[item] = chain.warning.has_value();
    a.draws[p][k] = chain.mode.value;
    x[problems[k].decision_slot] = chain.mode.value;
    auto vrng = make_rng(seed, {p, k, 1});
    a.values[p][k] = estimate_value(problems[k], x, ss.value_draws, vrng).value;
  });
  a.convergence_warnings = static_cast<std::size_t>(std::count(warned.begin(), warned.end(), 1));
  return a;
}

PolicyArtifact BaidSolver::reduce(const Step& step) const {
  const auto grid = default_grid(step);
  return step.kind == Step::Kind::daps ? daps_reduce(step, grid) : aaps_reduce(step, grid);
}

void BaidSolver::install_daps(const Step& step, const PolicyArtifact& a, ValueFunction value) {
  if (value.parents != step.reduction.inherited_parents)
    throw std::invalid_argument("value function arguments do not match the reduction of " + step.decision());
  defender_value_ = std::move(value);
  if (options_.recenter_concentration && a.decision_domain.is_interval())
    recentered_[a.decision] = {a.conditioning,
                               recenter_attacker_beliefs(a, *options_.recenter_concentration, options_.recenter_delta)};
}

void BaidSolver::install_aaps(const Step& step, const PolicyArtifact& a, Forecast forecast, RandomValueFunction value) {
  if (value.parents != step.reduction.inherited_parents)
    throw std::invalid_argument("random value arguments do not match the reduction of " + step.decision());
  forecasts_[a.decision] = std::move(forecast);
  attacker_value_ = std::move(value);
}

void BaidSolver::install(const Step& step, const PolicyArtifact& a) {
  if (step.kind == Step::Kind::daps) {
    install_daps(step, a, options_.value_model ? options_.value_model(a) : lookup_value_function(a));
  } else {
    install_aaps(step, a, options_.forecast_model ? options_.forecast_model(a) : lookup_forecast(a),
                 options_.random_value_model ? options_.random_value_model(a) : lookup_random_value(a));
  }
}

std::vector<PolicyArtifact> BaidSolver::solve() {
  std::vector<PolicyArtifact> out;
  for (const auto& s : plan_) {
    out.push_back(reduce(s));
    install(s, out.back());
  }
  return out;
}

std::vector<PolicyArtifact> solve_baid(const baid::Baid& g, const DefenderModel& defender, const AttackerModel& attacker,
                                       const SolveOptions& options) {
  BaidSolver solver(g, defender, attacker, options);
  return solver.solve();
}

}  // namespace ara::aps

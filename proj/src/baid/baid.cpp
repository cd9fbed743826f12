#include "ara/baid/baid.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>

#include "ara/core/errors.hpp"

namespace ara::baid {

Agent opponent(Agent a) { return a == Agent::defender ? Agent::attacker : Agent::defender; }

std::string to_string(Agent a) { return a == Agent::defender ? "defender" : "attacker"; }

std::string to_string(NodeKind k) {
  switch (k) {
    case NodeKind::decision: return "decision";
    case NodeKind::chance: return "chance";
    default: return "utility";
  }
}

std::string to_string(Owner o) {
  switch (o) {
    case Owner::defender_only: return "defender";
    case Owner::attacker_only: return "attacker";
    default: return "shared";
  }
}

Baid::Baid(std::string name, std::vector<Node> nodes) : name_(std::move(name)), nodes_(std::move(nodes)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.id.empty()) throw StructuralError("node with empty id");
    if (!index_.emplace(n.id, i).second) throw StructuralError("duplicate node id '" + n.id + "'");
    if (n.kind != NodeKind::utility && !n.domain)
      throw StructuralError("node '" + n.id + "' needs a domain");
    if (n.kind == NodeKind::utility && n.domain)
      throw StructuralError("utility node '" + n.id + "' cannot have a domain");
  }
  parents_.resize(nodes_.size());
  children_.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    std::set<std::string> seen;
    for (const auto& p : nodes_[i].parents) {
      auto it = index_.find(p);
      if (it == index_.end())
        throw StructuralError("node '" + nodes_[i].id + "' has dangling parent '" + p + "'");
      if (!seen.insert(p).second)
        throw StructuralError("node '" + nodes_[i].id + "' lists parent '" + p + "' twice");
      parents_[i].push_back(it->second);
      children_[it->second].push_back(i);
    }
  }
}

bool Baid::has(std::string_view id) const { return index_.count(std::string(id)) > 0; }

std::size_t Baid::index(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) throw StructuralError("unknown node '" + std::string(id) + "'");
  return it->second;
}

bool Baid::in_view(std::size_t i, Agent agent) const {
  const auto& n = nodes_[i];
  switch (n.kind) {
    case NodeKind::decision: return true;
    case NodeKind::utility: return n.agent == agent;
    default:
      if (n.owner == Owner::shared) return true;
      return (n.owner == Owner::defender_only) == (agent == Agent::defender);
  }
}

std::optional<std::size_t> Baid::utility_of(Agent agent) const {
  std::optional<std::size_t> u;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].kind == NodeKind::utility && nodes_[i].agent == agent) {
      if (u) return std::nullopt;
      u = i;
    }
  return u;
}

std::vector<std::size_t> Baid::decisions_of(Agent agent) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].kind == NodeKind::decision && nodes_[i].agent == agent) out.push_back(i);
  return out;
}

bool Baid::reaches(std::size_t a, std::size_t b, std::optional<Agent> view) const {
  std::vector<char> seen(nodes_.size(), 0);
  std::vector<std::size_t> stack{a};
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (auto c : children_[v]) {
      if (view && !in_view(c, *view)) continue;
      if (c == b) return true;
      if (!seen[c]) {
        seen[c] = 1;
        stack.push_back(c);
      }
    }
  }
  return false;
}

Baid Baid::with_domain(std::string_view id, Domain d) const {
  auto nodes = nodes_;
  nodes[index(id)].domain = std::move(d);
  return Baid(name_, std::move(nodes));
}

namespace {

std::optional<std::vector<std::size_t>> find_cycle(const Baid& g) {
  const auto n = g.size();
  std::vector<int> state(n, 0);
  std::vector<std::size_t> stack;
  std::optional<std::vector<std::size_t>> cycle;
  std::function<bool(std::size_t)> dfs = [&](std::size_t v) {
    state[v] = 1;
    stack.push_back(v);
    for (auto c : g.child_indices(v)) {
      if (state[c] == 1) {
        auto it = std::find(stack.begin(), stack.end(), c);
        cycle = std::vector<std::size_t>(it, stack.end());
        return true;
      }
      if (state[c] == 0 && dfs(c)) return true;
    }
    stack.pop_back();
    state[v] = 2;
    return false;
  };
  for (std::size_t v = 0; v < n; ++v)
    if (state[v] == 0 && dfs(v)) return cycle;
  return std::nullopt;
}

// Declaration-order-stable topological rank; assumes a DAG.
std::vector<std::size_t> topo_rank(const Baid& g) {
  const auto n = g.size();
  std::vector<std::size_t> indeg(n), rank(n, n);
  for (std::size_t i = 0; i < n; ++i) indeg[i] = g.parent_indices(i).size();
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.push(i);
  std::size_t r = 0;
  while (!ready.empty()) {
    const auto v = ready.top();
    ready.pop();
    rank[v] = r++;
    for (auto c : g.child_indices(v))
      if (--indeg[c] == 0) ready.push(c);
  }
  return rank;
}

std::vector<std::size_t> ordered_decisions(const Baid& g, Agent agent) {
  auto order = g.decisions_of(agent);
  const auto rank = topo_rank(g);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return rank[a] < rank[b]; });
  return order;
}

}  // namespace

ValidationReport validate_proper(const Baid& g) {
  ValidationReport r;
  auto& out = r.violations;

  if (auto cyc = find_cycle(g)) {
    std::string s = "cycle: ";
    for (auto v : *cyc) s += g.node(v).id + " -> ";
    s += g.node(cyc->front()).id;
    out.push_back(s);
    return r;  // the remaining checks assume a DAG
  }

  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.node(i).kind == NodeKind::utility && !g.child_indices(i).empty())
      out.push_back("utility node " + g.node(i).id + " has children");

  for (Agent agent : {Agent::defender, Agent::attacker}) {
    const auto who = to_string(agent);
    const auto u = g.utility_of(agent);
    if (!u) {
      out.push_back(who + " must have exactly one utility node");
      continue;
    }
    const auto decisions = g.decisions_of(agent);
    if (decisions.empty()) {
      out.push_back(who + " has no decision node");
      continue;
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!g.in_view(i, agent)) continue;
      // The opponent's decisions are chance nodes here; their unseen inputs are marginalized.
      if (g.node(i).kind == NodeKind::decision && g.node(i).agent != agent) continue;
      for (auto p : g.parent_indices(i))
        if (!g.in_view(p, agent))
          out.push_back(g.node(i).id + " has parent " + g.node(p).id + " outside the " + who +
                        "'s diagram; shared nodes need identical parent sets in both diagrams");
    }
    // Decisions on a single directed path, the last one reaching the utility.
    const auto order = ordered_decisions(g, agent);
    bool path_ok = true;
    for (std::size_t k = 0; k + 1 < order.size(); ++k)
      if (!g.reaches(order[k], order[k + 1], agent)) {
        out.push_back(who + " decisions " + g.node(order[k]).id + " and " + g.node(order[k + 1]).id +
                      " are not connected by a directed path");
        path_ok = false;
      }
    if (path_ok && !g.reaches(order.back(), *u, agent))
      out.push_back(who + " decision " + g.node(order.back()).id + " has no directed path to its utility");
  }

  const auto dd = g.decisions_of(Agent::defender);
  const auto ad = g.decisions_of(Agent::attacker);
  for (auto d : dd)
    for (auto a : ad) {
      const auto& nd = g.node(d);
      const auto& na = g.node(a);
      if (!nd.stage || !na.stage || *nd.stage != *na.stage) continue;
      if (g.reaches(d, a) || g.reaches(a, d))
        out.push_back("simultaneous decisions " + nd.id + " and " + na.id + " are connected by a directed path");
    }
  return r;
}

DecisionPath decision_path(const Baid& g, Agent agent) {
  if (find_cycle(g)) throw ValidationError("graph has a cycle");
  const auto order = ordered_decisions(g, agent);
  for (std::size_t k = 0; k + 1 < order.size(); ++k)
    if (!g.reaches(order[k], order[k + 1], agent))
      throw ValidationError(to_string(agent) + " decisions are not totally ordered");
  DecisionPath p;
  p.agent = agent;
  for (auto i : order) p.nodes.push_back(g.node(i).id);
  return p;
}

namespace {

// Mutable qualitative copy of one agent's diagram for Shachter-style
// bookkeeping: node removal and arc reversal, no numbers.
class QualitativeId {
 public:
  QualitativeId(const Baid& g, Agent agent) : g_(g), agent_(agent) {
    const auto n = g.size();
    alive_.assign(n, 0);
    parents_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!g.in_view(i, agent)) continue;
      alive_[i] = 1;
      for (auto p : g.parent_indices(i))
        if (g.in_view(p, agent)) parents_[i].push_back(p);
    }
    value_ = *g.utility_of(agent);
  }

  ReductionSet reduce(std::size_t d) {
    ReductionSet rs;
    rs.decision = g_.node(d).id;
    rs.agent = agent_;
    rs.value_parents = names(sorted_by_declaration(parents_[value_]));
    std::set<std::size_t> touched;
    std::set<std::size_t> eliminated;

    for (;;) {
      const auto& obs = parents_[d];
      std::vector<std::size_t> pending;
      for (auto p : parents_[value_])
        if (p != d && std::find(obs.begin(), obs.end(), p) == obs.end()) pending.push_back(p);
      if (pending.empty()) break;

      for (auto p : pending)
        if (is_own_decision(p))
          throw ValidationError("cannot reduce " + g_.node(d).id + ": value depends on unobserved decision " +
                                g_.node(p).id);
      const auto rank = topo_rank();
      const auto x = *std::max_element(pending.begin(), pending.end(), [&](auto a, auto b) { return rank[a] < rank[b]; });

      for (;;) {
        auto kids = children(x);
        kids.erase(std::remove(kids.begin(), kids.end(), value_), kids.end());
        if (kids.empty()) break;
        const auto y = *std::min_element(kids.begin(), kids.end(), [&](auto a, auto b) { return rank_now(a) < rank_now(b); });
        if (is_own_decision(y))
          throw ValidationError("cannot eliminate " + g_.node(x).id + ": it is observed by decision " + g_.node(y).id);
        reverse(x, y);
        rs.inversions.push_back({g_.node(x).id, g_.node(y).id});
        touched.insert(y);
      }
      // Eliminate x into the value node.
      auto& vp = parents_[value_];
      vp.erase(std::remove(vp.begin(), vp.end(), x), vp.end());
      for (auto p : parents_[x]) add_unique(vp, p);
      alive_[x] = 0;
      eliminated.insert(x);
      rs.chance_nodes.push_back(g_.node(x).id);
      if (g_.node(x).kind == NodeKind::decision) rs.requires_untreated.push_back(g_.node(x).id);
    }

    auto& vp = parents_[value_];
    vp.erase(std::remove(vp.begin(), vp.end(), d), vp.end());
    alive_[d] = 0;
    for (std::size_t i = 0; i < parents_.size(); ++i) {
      auto& ps = parents_[i];
      ps.erase(std::remove(ps.begin(), ps.end(), d), ps.end());
    }
    rs.inherited_parents = names(sorted_by_declaration(vp));
    std::vector<std::size_t> lik;
    for (auto t : touched)
      if (!eliminated.count(t)) lik.push_back(t);
    rs.likelihood_nodes = names(sorted_by_declaration(lik));
    return rs;
  }

 private:
  bool is_own_decision(std::size_t i) const {
    return g_.node(i).kind == NodeKind::decision && g_.node(i).agent == agent_;
  }

  std::vector<std::size_t> children(std::size_t x) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < parents_.size(); ++i)
      if (alive_[i] && std::find(parents_[i].begin(), parents_[i].end(), x) != parents_[i].end()) out.push_back(i);
    return out;
  }

  // Kahn's algorithm on the current graph, ties broken by id.
  std::vector<std::size_t> topo_rank() const {
    const auto n = parents_.size();
    std::vector<int> indeg(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      if (alive_[i])
        for (auto p : parents_[i])
          if (alive_[p]) ++indeg[i];
    auto cmp = [&](std::size_t a, std::size_t b) { return g_.node(a).id > g_.node(b).id; };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> ready(cmp);
    for (std::size_t i = 0; i < n; ++i)
      if (alive_[i] && indeg[i] == 0) ready.push(i);
    std::vector<std::size_t> rank(n, n);
    std::size_t r = 0;
    while (!ready.empty()) {
      const auto v = ready.top();
      ready.pop();
      rank[v] = r++;
      for (auto c : children(v))
        if (--indeg[c] == 0) ready.push(c);
    }
    return rank;
  }

  std::size_t rank_now(std::size_t i) const { return topo_rank()[i]; }

  void reverse(std::size_t x, std::size_t y) {
    const auto px = parents_[x];
    auto py = parents_[y];
    py.erase(std::remove(py.begin(), py.end(), x), py.end());
    auto& ny = parents_[y];
    ny.erase(std::remove(ny.begin(), ny.end(), x), ny.end());
    for (auto p : px) add_unique(ny, p);
    auto& nx = parents_[x];
    for (auto p : py) add_unique(nx, p);
    add_unique(nx, y);
  }

  static void add_unique(std::vector<std::size_t>& v, std::size_t x) {
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
  }

  static std::vector<std::size_t> sorted_by_declaration(std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    return v;
  }

  std::vector<std::string> names(const std::vector<std::size_t>& v) const {
    std::vector<std::string> out;
    for (auto i : v) out.push_back(g_.node(i).id);
    return out;
  }

  const Baid& g_;
  Agent agent_;
  std::vector<char> alive_;
  std::vector<std::vector<std::size_t>> parents_;
  std::size_t value_ = 0;
};

Agent owner_agent(const Baid& g, std::string_view decision) {
  const auto& n = g.node(decision);
  if (n.kind != NodeKind::decision) throw OrderingError(std::string(decision) + " is not a decision node");
  return n.agent;
}

}  // namespace

ReductionSet reduction_set(const Baid& g, Agent agent, std::string_view decision, const std::set<std::string>& reduced) {
  if (owner_agent(g, decision) != agent)
    throw OrderingError(std::string(decision) + " is not a " + to_string(agent) + " decision");
  const auto path = decision_path(g, agent);
  auto it = std::find(path.nodes.begin(), path.nodes.end(), decision);
  const std::set<std::string> expected(it + 1, path.nodes.end());
  if (reduced != expected)
    throw OrderingError(std::string(decision) + " is not the last unreduced decision on the " + to_string(agent) +
                        " path");
  QualitativeId id(g, agent);
  for (auto r = path.nodes.rbegin(); *r != decision; ++r) id.reduce(g.index(*r));
  return id.reduce(g.index(decision));
}

std::vector<ReductionSet> reduction_sequence(const Baid& g, Agent agent) {
  const auto path = decision_path(g, agent);
  QualitativeId id(g, agent);
  std::vector<ReductionSet> out;
  for (auto r = path.nodes.rbegin(); r != path.nodes.rend(); ++r) out.push_back(id.reduce(g.index(*r)));
  return out;
}

bool inputs_available(const Baid& g, std::string_view decision, const std::set<std::string>& treated) {
  const auto agent = owner_agent(g, decision);
  const auto path = decision_path(g, agent);
  auto it = std::find(path.nodes.begin(), path.nodes.end(), decision);
  const std::set<std::string> later(it + 1, path.nodes.end());
  const auto rs = reduction_set(g, agent, decision, later);
  return std::all_of(rs.requires_untreated.begin(), rs.requires_untreated.end(),
                     [&](const std::string& a) { return treated.count(a) > 0; });
}

std::vector<FactorRef> ad_factors(const Baid& g, const ReductionSet& rs) {
  std::vector<FactorRef> out;
  out.push_back({g.node(*g.utility_of(rs.agent)).id, rs.value_parents});
  for (const auto& x : rs.chance_nodes) out.push_back({x, g.node(x).parents});
  for (const auto& x : rs.likelihood_nodes) out.push_back({x, g.node(x).parents});
  return out;
}

}  // namespace ara::baid

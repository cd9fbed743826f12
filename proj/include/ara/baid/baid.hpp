#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ara/baid/domain.hpp"

namespace ara::baid {

enum class Agent { defender, attacker };
enum class NodeKind { decision, chance, utility };
enum class Owner { defender_only, attacker_only, shared };

Agent opponent(Agent a);
std::string to_string(Agent a);
std::string to_string(NodeKind k);
std::string to_string(Owner o);

struct Node {
  std::string id;
  std::string label;
  NodeKind kind = NodeKind::chance;
  Agent agent = Agent::defender;  // decisions and utilities
  Owner owner = Owner::shared;    // chance nodes
  std::optional<Domain> domain;   // decisions and chance nodes
  // Probabilistic arcs for chance/utility nodes, informational arcs for decisions.
  std::vector<std::string> parents;
  std::string binding;
  // Decisions of different agents sharing a stage are simultaneous.
  std::optional<int> stage;

  bool operator==(const Node&) const = default;
};

// Immutable graph. Construction rejects structural defects (duplicate or
// dangling ids, missing domains) with StructuralError; properness is a
// separate question answered by validate_proper.
class Baid {
 public:
  Baid() = default;
  Baid(std::string name, std::vector<Node> nodes);

  const std::string& name() const { return name_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }

  bool has(std::string_view id) const;
  std::size_t index(std::string_view id) const;
  const Node& node(std::string_view id) const { return nodes_[index(id)]; }
  const Node& node(std::size_t i) const { return nodes_[i]; }

  const std::vector<std::size_t>& parent_indices(std::size_t i) const { return parents_[i]; }
  const std::vector<std::size_t>& child_indices(std::size_t i) const { return children_[i]; }

  // Whether node i belongs to the given agent's influence diagram. Opponent
  // decisions are part of it (as chance nodes); the opponent's utility and
  // the opponent's private chance nodes are not.
  bool in_view(std::size_t i, Agent agent) const;

  std::optional<std::size_t> utility_of(Agent agent) const;
  std::vector<std::size_t> decisions_of(Agent agent) const;

  // Directed path a ⇝ b of length ≥ 1, optionally restricted to an agent view.
  bool reaches(std::size_t a, std::size_t b, std::optional<Agent> view = std::nullopt) const;

  // Copy with some node domains replaced (used for forcing, e.g. a₂ ∈ {0}).
  Baid with_domain(std::string_view id, Domain d) const;

  bool operator==(const Baid& o) const { return name_ == o.name_ && nodes_ == o.nodes_; }

 private:
  std::string name_;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<std::size_t>> children_;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool proper() const { return violations.empty(); }
};

ValidationReport validate_proper(const Baid& baid);

struct DecisionPath {
  Agent agent = Agent::defender;
  std::vector<std::string> nodes;
};

// Throws ValidationError when the agent's decisions are not totally ordered.
DecisionPath decision_path(const Baid& baid, Agent agent);

struct ArcInversion {
  std::string from;  // original tail
  std::string to;    // original head
  bool operator==(const ArcInversion&) const = default;
};

struct ReductionSet {
  std::string decision;
  Agent agent = Agent::defender;
  // Parents of the value node when the reduction starts (ψ's arguments).
  std::vector<std::string> value_parents;
  // 𝒳_c in elimination order.
  std::vector<std::string> chance_nodes;
  // Value-node parents after the reduction, in declaration order.
  std::vector<std::string> inherited_parents;
  // Opponent decisions inside 𝒳_c.
  std::vector<std::string> requires_untreated;
  std::vector<ArcInversion> inversions;
  // Nodes whose arcs were reversed but that stay in the diagram; their
  // original conditionals enter the augmented distribution as likelihoods.
  std::vector<std::string> likelihood_nodes;
};

// `reduced` must be exactly the decisions after `decision` on the agent's
// path; otherwise OrderingError.
ReductionSet reduction_set(const Baid& baid, Agent agent, std::string_view decision,
                           const std::set<std::string>& reduced = {});

// Reductions for the whole path, last decision first.
std::vector<ReductionSet> reduction_sequence(const Baid& baid, Agent agent);

// True iff the opponent decisions needed to reduce `decision` (assuming all
// later decisions of its owner are reduced) are all in `treated`.
bool inputs_available(const Baid& baid, std::string_view decision, const std::set<std::string>& treated);

struct FactorRef {
  std::string node;
  std::vector<std::string> parents;
  bool operator==(const FactorRef&) const = default;
};

// Factors making up the (random) augmented distribution of a reduction:
// the current utility over value_parents, then the original conditionals of
// 𝒳_c and of the likelihood nodes.
std::vector<FactorRef> ad_factors(const Baid& baid, const ReductionSet& rs);

}  // namespace ara::baid

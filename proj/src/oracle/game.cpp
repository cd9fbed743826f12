#include "ara/oracle/game.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <numeric>

#include "ara/baid/io.hpp"
#include "ara/core/errors.hpp"

namespace ara::oracle {

using baid::NodeKind;

namespace {

Tables tables_from_json(const nlohmann::json& j) {
  Tables t;
  for (const auto& [k, v] : j.items()) t[k] = v.get<std::vector<double>>();
  return t;
}

std::vector<std::size_t> parent_slots(const baid::Baid& b, std::size_t i) { return b.parent_indices(i); }

void check_table(const baid::Baid& b, std::size_t i, const std::vector<double>& t, const std::string& who) {
  const auto& n = b.node(i);
  const auto rows = config_count(b, parent_slots(b, i));
  if (n.kind == NodeKind::utility) {
    if (t.size() != rows) throw DataError(who + ": utility table " + n.id + " needs " + std::to_string(rows) + " entries");
    for (double u : t)
      if (!(u > 0.0) || !std::isfinite(u)) throw DataError(who + ": utility table " + n.id + " must be strictly positive");
    return;
  }
  const auto width = n.domain->size();
  if (t.size() != rows * width)
    throw DataError(who + ": table " + n.id + " needs " + std::to_string(rows * width) + " entries");
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t x = 0; x < width; ++x) {
      const double p = t[r * width + x];
      if (!(p >= 0.0) || !std::isfinite(p)) throw DataError(who + ": table " + n.id + " has a negative entry");
      s += p;
    }
    if (std::abs(s - 1.0) > 1e-12) throw DataError(who + ": row " + std::to_string(r) + " of " + n.id + " does not sum to one");
  }
}

// Tables required (true) or allowed (false) for an agent's own beliefs.
std::map<std::size_t, bool> expected_tables(const baid::Baid& b, baid::Agent agent) {
  std::map<std::size_t, bool> out;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (!b.in_view(i, agent)) continue;
    const auto& n = b.node(i);
    if (n.kind == NodeKind::chance) out[i] = true;
    if (n.kind == NodeKind::utility && n.agent == agent) out[i] = true;
    // P_A over defender decisions; only needed when some attacker decision
    // does not observe it.
    if (agent == baid::Agent::attacker && n.kind == NodeKind::decision && n.agent == baid::Agent::defender) out[i] = false;
  }
  return out;
}

void check_tables(const baid::Baid& b, baid::Agent agent, const Tables& t, const std::string& who) {
  const auto expected = expected_tables(b, agent);
  for (const auto& [id, table] : t) {
    if (!b.has(id) || !expected.count(b.index(id))) throw DataError(who + ": unexpected table " + id);
    check_table(b, b.index(id), table, who);
  }
  for (const auto& [i, required] : expected)
    if (required && !t.count(b.node(i).id)) throw DataError(who + ": missing table " + b.node(i).id);
}

aps::Factor table_factor(const baid::Baid& b, std::size_t i, std::shared_ptr<const std::vector<double>> t) {
  auto parents = std::make_shared<const std::vector<std::size_t>>(b.parent_indices(i));
  auto bb = std::make_shared<const baid::Baid>(b);
  const auto width = b.node(i).domain->size();
  aps::Factor f;
  f.sample = [bb, parents, t, width, i](aps::Values x, Rng& rng) {
    const double* row = t->data() + config_index(*bb, *parents, x) * width;
    const double u = uniform01(rng);
    double c = 0.0;
    std::size_t k = 0;
    for (; k + 1 < width; ++k) {
      c += row[k];
      if (u < c) break;
    }
    // Never return a zero-probability value through round-off.
    while (row[k] == 0.0 && k > 0) --k;
    return bb->node(i).domain->value(k);
  };
  f.density = [bb, parents, t, width, i](double v, aps::Values x) {
    const auto k = bb->node(i).domain->index_of(v);
    if (!k) return 0.0;
    return (*t)[config_index(*bb, *parents, x) * width + *k];
  };
  return f;
}

aps::UtilityFn table_utility(const baid::Baid& b, std::size_t i, std::shared_ptr<const std::vector<double>> t) {
  auto parents = std::make_shared<const std::vector<std::size_t>>(b.parent_indices(i));
  auto bb = std::make_shared<const baid::Baid>(b);
  return [bb, parents, t](aps::Values x) { return (*t)[config_index(*bb, *parents, x)]; };
}

struct Bound {
  std::map<std::string, aps::Factor> factors;
  aps::UtilityFn utility;
};

Bound bind(const baid::Baid& b, baid::Agent agent, const Tables& t) {
  Bound out;
  for (const auto& [id, table] : t) {
    const auto i = b.index(id);
    auto shared = std::make_shared<const std::vector<double>>(table);
    if (b.node(i).kind == NodeKind::utility)
      out.utility = table_utility(b, i, shared);
    else
      out.factors[id] = table_factor(b, i, shared);
  }
  return out;
}

}  // namespace

std::size_t config_count(const baid::Baid& b, const std::vector<std::size_t>& parents) {
  std::size_t n = 1;
  for (auto p : parents) n *= b.node(p).domain->size();
  return n;
}

std::size_t config_index(const baid::Baid& b, const std::vector<std::size_t>& parents, aps::Values x) {
  std::size_t flat = 0;
  for (std::size_t k = 0; k < parents.size(); ++k) {
    const auto& dom = *b.node(parents[k]).domain;
    const auto i = dom.index_of(x[k]);
    if (!i) throw DataError("value " + std::to_string(x[k]) + " is outside the domain of " + b.node(parents[k]).id);
    flat = flat * dom.size() + *i;
  }
  return flat;
}

void DiscreteGame::validate() const {
  for (const auto& n : baid.nodes())
    if (n.kind != NodeKind::utility && !n.domain->is_discrete())
      throw DataError("discrete game: node " + n.id + " has an interval domain");
  if (!baid.utility_of(baid::Agent::defender) || !baid.utility_of(baid::Agent::attacker))
    throw DataError("discrete game needs both utility nodes");
  check_tables(baid, baid::Agent::defender, defender, "defender");
  if (attacker.empty()) throw DataError("discrete game needs at least one attacker scenario");
  for (std::size_t s = 0; s < attacker.size(); ++s) {
    if (!(attacker[s].weight > 0.0)) throw DataError("scenario weights must be positive");
    check_tables(baid, baid::Agent::attacker, attacker[s].tables, "scenario " + std::to_string(s));
  }
}

DiscreteGame game_from_json(const nlohmann::json& j) {
  DiscreteGame g;
  g.baid = baid::baid_from_json(j.at("baid"));
  g.defender = tables_from_json(j.at("defender").at("tables"));
  for (const auto& s : j.at("attacker").at("scenarios"))
    g.attacker.push_back({s.value("weight", 1.0), tables_from_json(s.at("tables"))});
  g.validate();
  return g;
}

DiscreteGame load_game(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
    return game_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::size_t scenario_of(const DiscreteGame& g, double u) {
  double total = 0.0;
  for (const auto& s : g.attacker) total += s.weight;
  double c = 0.0;
  for (std::size_t s = 0; s < g.attacker.size(); ++s) {
    c += g.attacker[s].weight / total;
    if (u < c) return s;
  }
  return g.attacker.size() - 1;
}

aps::DefenderModel defender_model(const DiscreteGame& g) {
  auto b = bind(g.baid, baid::Agent::defender, g.defender);
  return {std::move(b.factors), std::move(b.utility)};
}

aps::AttackerModel attacker_model(const DiscreteGame& g) {
  auto scenarios = std::make_shared<std::vector<Bound>>();
  for (const auto& s : g.attacker) scenarios->push_back(bind(g.baid, baid::Agent::attacker, s.tables));
  auto game = std::make_shared<const DiscreteGame>(g);
  aps::AttackerModel m;
  m.draw = [scenarios, game](std::uint64_t index, Rng& rng) {
    aps::AttackerDraw w;
    w.index = index;
    w.value_quantile = uniform01(rng);
    const auto& s = (*scenarios)[scenario_of(*game, w.value_quantile)];
    w.factors = s.factors;
    w.utility = s.utility;
    return w;
  };
  return m;
}

}  // namespace ara::oracle

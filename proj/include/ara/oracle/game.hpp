#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ara/aps/model.hpp"
#include "ara/baid/baid.hpp"

namespace ara::oracle {

// Tables are row-major over the parent configurations in lexicographic order
// (first parent slowest, domain order within a parent). A chance or decision
// table holds one probability row per configuration; a utility table holds
// one value per configuration.
using Tables = std::map<std::string, std::vector<double>>;

struct Scenario {
  double weight = 1.0;
  Tables tables;
};

// A fully discrete BAID with tabular beliefs. The Defender's random model of
// the Attacker is a finite set of weighted scenarios.
struct DiscreteGame {
  baid::Baid baid;
  Tables defender;
  std::vector<Scenario> attacker;

  // Throws DataError on missing tables, wrong sizes, rows that do not sum to
  // one within 1e-12, nonpositive utilities or weights.
  void validate() const;
};

DiscreteGame game_from_json(const nlohmann::json& j);
DiscreteGame load_game(const std::filesystem::path& path);

// Index of a parent configuration; throws DataError for a value outside a domain.
std::size_t config_index(const baid::Baid& b, const std::vector<std::size_t>& parents, aps::Values x);
std::size_t config_count(const baid::Baid& b, const std::vector<std::size_t>& parents);

// The scenario selected by a uniform variate (inverse CDF over the weights).
std::size_t scenario_of(const DiscreteGame& g, double u);

// Bindings for the APS engine. Each ω-draw picks a scenario from its
// value_quantile, so scenario_of(game, draw.value_quantile) recovers it.
aps::DefenderModel defender_model(const DiscreteGame& g);
aps::AttackerModel attacker_model(const DiscreteGame& g);

}  // namespace ara::oracle

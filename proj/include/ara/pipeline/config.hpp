#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ara/aps/solver.hpp"
#include "ara/disinfo/params.hpp"
#include "ara/meta/mlp.hpp"

namespace ara::pipeline {

// Invalid configuration documents and overrides.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// daps1, fit_psiD, aaps1, fit_pA2, fit_PsiA, aaps2, fit_pA1, daps2.
const std::vector<std::string>& stage_order();
std::size_t stage_rank(const std::string& stage);  // ConfigError on unknown names
bool is_simulation(const std::string& stage);

struct SimulationStage {
  aps::StageSettings settings;
};

struct FitStage {
  std::vector<std::size_t> hidden;
  std::size_t components = 2;  // mixtures only
  meta::TrainConfig train;
};

// One structured document with sections run, case, stages and fits. Every
// key can be overridden with "section.key[.key]=value".
struct Config {
  std::string profile = "desk";
  std::uint64_t seed = 1;
  std::size_t workers = 0;  // 0 = all hardware threads
  bool force_zero_attack = false;
  disinfo::CaseParams params;
  std::map<std::string, SimulationStage> simulations;  // daps1, aaps1, aaps2, daps2
  std::map<std::string, FitStage> fits;                 // fit_psiD, fit_pA2, fit_PsiA, fit_pA1

  nlohmann::json to_json() const;
  static Config from_json(const nlohmann::json& j);  // throws ConfigError
  void validate() const;

  // Digest of everything a stage reads: seed, forcing, the stage's settings,
  // the digests of its input stages, and the case parameters whose first
  // affected stage is not later. Equal digests mean reusable outputs.
  std::string stage_digest(const std::string& stage) const;
  std::string digest() const;
};

nlohmann::json profile_json(const std::string& name);  // "desk" or "paper"
Config profile(const std::string& name);

// Applies "a.b.c=value"; the value is parsed as JSON when possible and taken
// as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

// Profile defaults, then the file (explicit path, else $ARA_CONFIG, else
// none), then the overrides. The file may name a profile under run.profile.
Config load_config(const std::optional<std::filesystem::path>& file, const std::vector<std::string>& overrides);

}  // namespace ara::pipeline

#include "ara/pipeline/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

#include "ara/core/table.hpp"
#include "ara/pipeline/stages.hpp"

namespace ara::pipeline {

using nlohmann::json;

const std::vector<std::string>& stage_order() {
  static const std::vector<std::string> order{"daps1", "fit_psiD", "aaps1", "fit_pA2",
                                              "fit_PsiA", "aaps2", "fit_pA1", "daps2"};
  return order;
}

std::size_t stage_rank(const std::string& stage) {
  const auto& o = stage_order();
  const auto it = std::find(o.begin(), o.end(), stage);
  if (it == o.end()) throw ConfigError("unknown stage '" + stage + "'");
  return static_cast<std::size_t>(it - o.begin());
}

bool is_simulation(const std::string& stage) {
  stage_rank(stage);
  return stage.rfind("fit_", 0) != 0;
}

namespace {

template <class F>
void each_key(const json& j, const std::string& where, F&& f) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    try {
      if (!f(k, v)) throw ConfigError("unknown key " + where + "." + k);
    } catch (const json::exception& e) {
      throw ConfigError(where + "." + k + ": " + e.what());
    }
  }
}

json sim_json(const SimulationStage& s) {
  const auto& c = s.settings.chain;
  return {{"iterations", c.iterations}, {"burn_in", c.burn_in},
          {"h", c.augmentation},        {"proposal_scale", c.proposal_scale},
          {"chain_seed", c.seed},       {"grid_step", s.settings.grid_step},
          {"draws", s.settings.draws_per_point}, {"value_draws", s.settings.value_draws}};
}

void sim_from_json(SimulationStage& s, const json& j, const std::string& where) {
  auto& c = s.settings.chain;
  each_key(j, where, [&](const std::string& k, const json& v) {
    if (k == "iterations") c.iterations = v.get<std::size_t>();
    else if (k == "burn_in") c.burn_in = v.get<std::size_t>();
    else if (k == "h") c.augmentation = v.get<int>();
    else if (k == "proposal_scale") c.proposal_scale = v.get<double>();
    else if (k == "chain_seed") c.seed = v.get<std::uint64_t>();
    else if (k == "grid_step") s.settings.grid_step = v.get<double>();
    else if (k == "draws") s.settings.draws_per_point = v.get<std::size_t>();
    else if (k == "value_draws") s.settings.value_draws = v.get<std::size_t>();
    else return false;
    return true;
  });
}

json fit_json(const FitStage& f) {
  const auto& t = f.train;
  return {{"hidden", f.hidden},
          {"components", f.components},
          {"max_epochs", t.max_epochs},
          {"learning_rate", t.learning_rate},
          {"batch_size", t.batch_size},
          {"patience", t.patience},
          {"validation_fraction", t.validation_fraction},
          {"test_fraction", t.test_fraction},
          {"folds", t.folds},
          {"repeats", t.repeats},
          {"train_seed", t.seed}};
}

void fit_from_json(FitStage& f, const json& j, const std::string& where) {
  auto& t = f.train;
  each_key(j, where, [&](const std::string& k, const json& v) {
    if (k == "hidden") f.hidden = v.get<std::vector<std::size_t>>();
    else if (k == "components") f.components = v.get<std::size_t>();
    else if (k == "max_epochs") t.max_epochs = v.get<std::size_t>();
    else if (k == "learning_rate") t.learning_rate = v.get<double>();
    else if (k == "batch_size") t.batch_size = v.get<std::size_t>();
    else if (k == "patience") t.patience = v.get<std::size_t>();
    else if (k == "validation_fraction") t.validation_fraction = v.get<double>();
    else if (k == "test_fraction") t.test_fraction = v.get<double>();
    else if (k == "folds") t.folds = v.get<std::size_t>();
    else if (k == "repeats") t.repeats = v.get<std::size_t>();
    else if (k == "train_seed") t.seed = v.get<std::uint64_t>();
    else return false;
    return true;
  });
}

json sim(std::size_t iterations, int h, double grid_step, std::size_t draws, std::size_t value_draws) {
  return {{"iterations", iterations}, {"burn_in", iterations / 5}, {"h", h},
          {"proposal_scale", 0.5},    {"chain_seed", 0},           {"grid_step", grid_step},
          {"draws", draws},           {"value_draws", value_draws}};
}

json fit(std::vector<std::size_t> hidden, std::size_t components, std::size_t batch_size = 128) {
  FitStage f;
  f.hidden = std::move(hidden);
  f.components = components;
  f.train.patience = 100;
  f.train.batch_size = batch_size;
  return fit_json(f);
}

}  // namespace

json profile_json(const std::string& name) {
  json j;
  if (name == "desk") {
    j["stages"] = {{"daps1", sim(5000, 40, 0.1, 1, 10000)},
                   {"aaps1", sim(5000, 80, 0.05, 30, 10000)},
                   {"aaps2", sim(5000, 120, 0.05, 1000, 100)},
                   {"daps2", sim(5000, 20, 0.05, 1, 10000)}};
  } else if (name == "paper") {
    j["stages"] = {{"daps1", sim(10000, 40, 0.05, 1, 10000)},
                   {"aaps1", sim(10000, 80, 0.05, 100, 10000)},
                   {"aaps2", sim(10000, 120, 0.05, 10000, 100)},
                   {"daps2", sim(10000, 20, 0.05, 1, 10000)}};
  } else {
    throw ConfigError("unknown profile '" + name + "' (expected desk or paper)");
  }
  j["run"] = {{"profile", name}, {"seed", 1}, {"workers", 0}, {"force_zero_attack", false}};
  j["case"] = disinfo::CaseParams{}.to_json();
  j["fits"] = {{"fit_psiD", fit({32, 64, 16}, 1, 32)},
               {"fit_pA2", fit({64, 64, 64}, 2)},
               {"fit_PsiA", fit({64, 64, 64}, 2)},
               {"fit_pA1", fit({}, 2)}};
  return j;
}

Config profile(const std::string& name) { return Config::from_json(profile_json(name)); }

json Config::to_json() const {
  json j;
  j["run"] = {{"profile", profile}, {"seed", seed}, {"workers", workers}, {"force_zero_attack", force_zero_attack}};
  j["case"] = params.to_json();
  for (const auto& [k, s] : simulations) j["stages"][k] = sim_json(s);
  for (const auto& [k, f] : fits) j["fits"][k] = fit_json(f);
  return j;
}

Config Config::from_json(const json& j) {
  Config c;
  each_key(j, "config", [&](const std::string& section, const json& v) {
    if (section == "run") {
      each_key(v, "run", [&](const std::string& k, const json& x) {
        if (k == "profile") c.profile = x.get<std::string>();
        else if (k == "seed") c.seed = x.get<std::uint64_t>();
        else if (k == "workers") c.workers = x.get<std::size_t>();
        else if (k == "force_zero_attack") c.force_zero_attack = x.get<bool>();
        else return false;
        return true;
      });
    } else if (section == "case") {
      try {
        c.params = disinfo::CaseParams::from_json(v);
      } catch (const std::exception& e) {
        throw ConfigError(std::string("case: ") + e.what());
      }
    } else if (section == "stages") {
      each_key(v, "stages", [&](const std::string& k, const json& x) {
        if (k != "daps1" && k != "aaps1" && k != "aaps2" && k != "daps2") return false;
        sim_from_json(c.simulations[k], x, "stages." + k);
        return true;
      });
    } else if (section == "fits") {
      each_key(v, "fits", [&](const std::string& k, const json& x) {
        if (k != "fit_psiD" && k != "fit_pA2" && k != "fit_PsiA" && k != "fit_pA1") return false;
        fit_from_json(c.fits[k], x, "fits." + k);
        return true;
      });
    } else {
      return false;
    }
    return true;
  });
  c.validate();
  return c;
}

void Config::validate() const {
  for (const auto& s : stage_order()) {
    if (is_simulation(s) ? !simulations.count(s) : !fits.count(s)) throw ConfigError("no settings for stage " + s);
  }
  try {
    params.validate();
    for (const auto& [k, s] : simulations) {
      s.settings.chain.validate();
      if (!(s.settings.grid_step > 0.0 && s.settings.grid_step <= 1.0)) throw ConfigError(k + ": grid_step must be in (0, 1]");
      if (s.settings.draws_per_point == 0 || s.settings.value_draws == 0) throw ConfigError(k + ": draw counts must be positive");
    }
    for (const auto& [k, f] : fits) {
      f.train.validate();
      if (f.components == 0) throw ConfigError(k + ": components must be positive");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

std::string Config::stage_digest(const std::string& stage) const {
  const auto rank = stage_rank(stage);
  json j;
  j["seed"] = seed;
  j["force_zero_attack"] = force_zero_attack;
  j["settings"] = is_simulation(stage) ? sim_json(simulations.at(stage)) : fit_json(fits.at(stage));
  for (const auto& in : stage_inputs(stage)) j["inputs"][in] = stage_digest(in);
  for (const auto& name : disinfo::CaseParams::names())
    if (stage_rank(disinfo::CaseParams::first_affected_stage(name)) <= rank) j["case"][name] = params.get(name);
  return text_digest(j.dump());
}

std::string Config::digest() const { return text_digest(to_json().dump()); }

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
  const auto key = assignment.substr(0, eq);
  const auto text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  std::string pointer = "/" + key;
  std::replace(pointer.begin(), pointer.end(), '.', '/');
  const json::json_pointer ptr(pointer);
  if (!doc.contains(ptr)) throw ConfigError("unknown configuration key '" + key + "'");
  doc[ptr] = value;
}

Config load_config(const std::optional<std::filesystem::path>& file, const std::vector<std::string>& overrides) {
  std::optional<std::filesystem::path> path = file;
  if (!path) {
    if (const char* env = std::getenv("ARA_CONFIG"); env && *env) path = env;
  }
  json user = json::object();
  if (path) {
    std::ifstream in(*path);
    if (!in) throw ConfigError("cannot open config " + path->string());
    user = json::parse(in, nullptr, false, true);
    if (user.is_discarded()) throw ConfigError(path->string() + " is not valid JSON");
  }
  std::string name = "desk";
  if (user.contains("run") && user["run"].contains("profile")) name = user["run"]["profile"].get<std::string>();
  for (const auto& o : overrides)
    if (o.rfind("run.profile=", 0) == 0) name = o.substr(12);
  json merged = profile_json(name);
  merged.merge_patch(user);
  Config::from_json(merged);  // reports file errors before any override
  for (const auto& o : overrides) apply_override(merged, o);
  return Config::from_json(merged);
}

}  // namespace ara::pipeline

#include "ara/pipeline/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ara/meta/checkpoint.hpp"
#include "ara/pipeline/stages.hpp"
#include "ara/pipeline/summary.hpp"

namespace ara::pipeline {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string part; std::getline(in, part, sep);) out.push_back(part);
  return out;
}

std::string label(const std::vector<double>& v) {
  std::ostringstream o;
  for (std::size_t k = 0; k < v.size(); ++k) o << (k ? "_" : "") << v[k];
  return o.str();
}

std::string joined(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : "+") + x;
  return s;
}

// Copies the base run's records and outputs for stages whose digest the point
// shares.
void seed_from_base(const Config& cfg, const fs::path& base_dir, const fs::path& dir, const std::string& through) {
  const auto base = load_manifest(base_dir);
  auto m = load_manifest(dir);
  for (const auto& stage : stage_order()) {
    if (stage_rank(stage) > stage_rank(through)) break;
    const auto it = base.stages.find(stage);
    if (it == base.stages.end() || it->second.digest != cfg.stage_digest(stage)) continue;
    if (!files_intact(base_dir, it->second.outputs)) continue;
    const auto own = m.stages.find(stage);
    if (own != m.stages.end() && own->second.digest == it->second.digest && files_intact(dir, own->second.outputs))
      continue;
    for (const auto& f : it->second.outputs)
      fs::copy_file(base_dir / f.path, dir / f.path, fs::copy_options::overwrite_existing);
    m.stages[stage] = it->second;
  }
  m.config_digest = cfg.digest();
  m.seed = cfg.seed;
  save_manifest(dir, m);
  meta::save_json(dir / "config.json", cfg.to_json());
}

}  // namespace

std::vector<std::vector<double>> parse_sweep_values(const std::string& text, std::size_t params) {
  std::vector<std::vector<double>> out;
  for (const auto& tuple : split(text, ',')) {
    if (tuple.empty()) continue;
    std::vector<double> v;
    for (const auto& x : split(tuple, ':')) {
      std::size_t used = 0;
      double d = 0.0;
      try {
        d = std::stod(x, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != x.size()) throw ConfigError("bad sweep value '" + x + "'");
      v.push_back(d);
    }
    if (v.size() != params)
      throw ConfigError("sweep tuple '" + tuple + "' has " + std::to_string(v.size()) + " values for " +
                        std::to_string(params) + " parameters");
    out.push_back(v);
  }
  return out;
}

Table run_sweep(const Config& base, const fs::path& base_dir, const std::vector<std::string>& params,
                const std::vector<std::vector<double>>& values, const std::string& through) {
  stage_rank(through);
  if (params.empty()) throw ConfigError("sweep needs at least one parameter");
  for (const auto& p : params) {
    const auto& names = disinfo::CaseParams::names();
    if (std::find(names.begin(), names.end(), p) == names.end()) throw ConfigError("unknown case parameter '" + p + "'");
  }
  Table trend{params, {}};
  for (const auto* c : {"area_d2_positive", "mean_d2", "area_low_attack", "mean_a2", "d1_star"}) trend.columns.push_back(c);
  if (values.empty()) return trend;

  const auto root = base_dir / "sweeps" / joined(params);
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& v : values) {
    if (v.size() != params.size()) throw ConfigError("sweep tuple size does not match the parameter list");
    Config cfg = base;
    for (std::size_t k = 0; k < params.size(); ++k) cfg.params.set(params[k], v[k]);
    cfg.validate();
    const auto dir = root / label(v);
    fs::create_directories(dir);
    seed_from_base(cfg, base_dir, dir, through);
    Pipeline(cfg, dir).run_through(through);
    const auto s = summarize(dir);
    auto row = v;
    auto get = [&](const char* section, const char* key) {
      return s.contains(section) ? s[section][key].get<double>() : nan;
    };
    row.push_back(get("d2_policy", "area_positive"));
    row.push_back(get("d2_policy", "mean"));
    row.push_back(get("attack_forecast", "area_low_attack"));
    row.push_back(get("attack_forecast", "mean_a2"));
    row.push_back(s.contains("d1_star") ? s["d1_star"].get<double>() : nan);
    trend.rows.push_back(row);
  }
  write_csv(root / "trend.csv", trend);
  return trend;
}

}  // namespace ara::pipeline

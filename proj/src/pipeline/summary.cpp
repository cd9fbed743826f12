#include "ara/pipeline/summary.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include "ara/core/errors.hpp"
#include "ara/core/table.hpp"
#include "ara/disinfo/params.hpp"
#include "ara/meta/checkpoint.hpp"
#include "ara/pipeline/manifest.hpp"

namespace ara::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::size_t column_of(const aps::PolicyArtifact& a, const std::string& name) {
  for (std::size_t k = 0; k < a.conditioning.size(); ++k)
    if (a.conditioning[k] == name) return k;
  throw DataError(a.decision + " artifact is not conditioned on " + name);
}

std::optional<std::size_t> expectation_of(const aps::PolicyArtifact& a, const std::string& node) {
  for (std::size_t k = 0; k < a.expectation_nodes.size(); ++k)
    if (a.expectation_nodes[k] == node) return k;
  return std::nullopt;
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-9; }

}  // namespace

D2PolicyStats d2_stats(const aps::PolicyArtifact& a, double capacity) {
  const auto ia2 = column_of(a, "a2");
  const auto it1 = column_of(a, "theta1");
  const auto e2 = expectation_of(a, "theta2");
  D2PolicyStats s;
  std::vector<double> low, probe, theta2;
  std::size_t positive = 0, breach = 0;
  for (std::size_t p = 0; p < a.points.size(); ++p) {
    const double d2 = a.optimal[p];
    const double a2 = a.points[p][ia2], t1 = a.points[p][it1];
    s.mean += d2;
    if (d2 > kActionThreshold) ++positive;
    if (t1 <= 0.2 + 1e-9 && a2 <= 0.5 + 1e-9) low.push_back(d2);
    if (near(t1, 0.05) && near(a2, 1.0)) probe.push_back(d2);
    if (e2) {
      const double e = a.expectations[p][*e2];
      theta2.push_back(e);
      if (e > capacity) ++breach;
    }
  }
  const auto n = static_cast<double>(a.points.size());
  s.mean /= n;
  s.area_positive = static_cast<double>(positive) / n;
  s.low_region_mean = mean_of(low);
  if (!probe.empty()) s.mean_at_probe = mean_of(probe);
  s.expected_theta2 = mean_of(theta2);
  s.capacity_breach_area = static_cast<double>(breach) / n;
  return s;
}

A2ForecastStats a2_stats(const aps::PolicyArtifact& a) {
  A2ForecastStats s;
  std::size_t low = 0;
  for (const auto& row : a.draws) {
    const double m = mean_of(row);
    s.mean += m;
    if (m < kActionThreshold) ++low;
  }
  s.mean /= static_cast<double>(a.draws.size());
  s.area_low = static_cast<double>(low) / static_cast<double>(a.draws.size());
  return s;
}

namespace {

disinfo::CaseParams run_params(const fs::path& dir) {
  const auto p = dir / "config.json";
  if (!fs::exists(p)) return {};
  return disinfo::CaseParams::from_json(meta::load_json(p).at("case"));
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json summarize(const fs::path& dir) {
  if (!fs::exists(dir / kManifestFile)) throw DataError("no manifest in " + dir.string());
  const auto m = load_manifest(dir);
  const auto params = run_params(dir);
  json s{{"config_digest", m.config_digest}, {"seed", m.seed}, {"stages", json::object()}};
  std::map<std::string, bool> intact;
  for (const auto& [name, r] : m.stages) {
    intact[name] = files_intact(dir, r.outputs);
    json files = json::object();
    for (const auto& f : r.outputs) files[f.path] = f.sha256;
    s["stages"][name] = {{"digest", r.digest}, {"seconds", r.seconds}, {"intact", intact[name]}, {"outputs", files}};
  }
  auto have = [&](const std::string& st) { return intact.count(st) && intact[st]; };

  if (have("daps1")) {
    const auto a = aps::load_artifact(dir / "daps1.csv");
    const auto d = d2_stats(a, params.c);
    s["d2_policy"] = {{"points", a.points.size()},
                      {"mean", d.mean},
                      {"area_positive", d.area_positive},
                      {"low_region_mean", d.low_region_mean},
                      {"mean_at_theta1_0.05_a2_1", optional_json(d.mean_at_probe)},
                      {"capacity_breach_area", d.capacity_breach_area},
                      {"convergence_warnings", a.convergence_warnings}};
    s["E_theta2"] = d.expected_theta2;
  }
  if (have("aaps1")) {
    const auto a = aps::load_artifact(dir / "aaps1.csv");
    const auto f = a2_stats(a);
    s["attack_forecast"] = {{"points", a.points.size()},
                            {"draws_per_point", a.draws_per_point()},
                            {"mean_a2", f.mean},
                            {"area_low_attack", f.area_low},
                            {"convergence_warnings", a.convergence_warnings}};
  }
  if (have("aaps2")) {
    const auto a = aps::load_artifact(dir / "aaps2.csv");
    const auto& d = a.draws.at(0);
    const auto low = std::count_if(d.begin(), d.end(), [](double x) { return x < kActionThreshold; });
    s["a1"] = {{"draws", d.size()},
               {"mean", mean_of(d)},
               {"fraction_low", static_cast<double>(low) / static_cast<double>(d.size())},
               {"convergence_warnings", a.convergence_warnings}};
  }
  json metrics = json::object();
  for (const auto& [stage, key] : std::vector<std::pair<std::string, std::string>>{
           {"fit_psiD", "psiD"}, {"fit_pA2", "pA2"}, {"fit_PsiA", "PsiA"}, {"fit_pA1", "pA1"}})
    if (have(stage)) metrics[key] = meta::load_json(dir / (stage + "_metrics.json"));
  s["metamodels"] = metrics;
  if (have("daps2")) {
    const auto a = aps::load_artifact(dir / "daps2.csv");
    s["d1_star"] = a.optimal.at(0);
    s["d1_value"] = a.values.at(0).at(0);
    s["d1_convergence_warnings"] = a.convergence_warnings;
  }
  meta::save_json(dir / "summary.json", s);
  return s;
}

namespace {

void write_figures(const fs::path& dir, const disinfo::CaseParams& params) {
  const auto fig = dir / "figures";
  fs::create_directories(fig);
  if (fs::exists(dir / "daps1.csv")) {
    const auto a = aps::load_artifact(dir / "daps1.csv");
    const auto id1 = column_of(a, "d1"), ia2 = column_of(a, "a2"), it1 = column_of(a, "theta1");
    const auto e2 = expectation_of(a, "theta2");
    Table t{{"d1", "a2", "theta1", "d2", "E_theta2"}, {}};
    std::map<std::pair<double, double>, std::array<double, 3>> avg;  // sum d2, sum E θ₂, count
    for (std::size_t p = 0; p < a.points.size(); ++p) {
      const double e = e2 ? a.expectations[p][*e2] : 0.0;
      t.rows.push_back({a.points[p][id1], a.points[p][ia2], a.points[p][it1], a.optimal[p], e});
      auto& c = avg[{a.points[p][ia2], a.points[p][it1]}];
      c[0] += a.optimal[p];
      c[1] += e;
      c[2] += 1.0;
    }
    write_csv(fig / "d2_policy.csv", t);
    Table m{{"a2", "theta1", "mean_d2", "mean_E_theta2", "capacity_breach"}, {}};
    for (const auto& [k, c] : avg) {
      const double et = c[1] / c[2];
      m.rows.push_back({k.first, k.second, c[0] / c[2], et, et > params.c ? 1.0 : 0.0});
    }
    write_csv(fig / "d2_mean_over_d1.csv", m);
  }
  if (fs::exists(dir / "aaps1.csv")) {
    const auto a = aps::load_artifact(dir / "aaps1.csv");
    Table t{{"d1", "a1", "mean_a2", "sd_a2"}, {}};
    for (std::size_t p = 0; p < a.points.size(); ++p) {
      const double mu = mean_of(a.draws[p]);
      double v = 0.0;
      for (double x : a.draws[p]) v += (x - mu) * (x - mu);
      v /= std::max<double>(1.0, static_cast<double>(a.draws[p].size()) - 1.0);
      t.rows.push_back({a.points[p][column_of(a, "d1")], a.points[p][column_of(a, "a1")], mu, std::sqrt(v)});
    }
    write_csv(fig / "a2_forecast.csv", t);
  }
  if (fs::exists(dir / "aaps2.csv")) {
    const auto a = aps::load_artifact(dir / "aaps2.csv");
    Table t{{"draw", "a1"}, {}};
    for (std::size_t k = 0; k < a.draws.at(0).size(); ++k) t.rows.push_back({static_cast<double>(k), a.draws[0][k]});
    write_csv(fig / "a1_draws.csv", t);
  }
  if (fs::exists(dir / "pA1.json")) {
    const auto m = meta::mixture_from_json(meta::load_json(dir / "pA1.json").at("mixture"));
    Table t{{"component", "weight", "a", "b", "mean"}, {}};
    for (std::size_t c = 0; c < m.components.size(); ++c) {
      const auto& k = m.components[c];
      t.rows.push_back({static_cast<double>(c), k.weight, k.a, k.b, meta::component_mean(m.family, k.a, k.b)});
    }
    write_csv(fig / "a1_mixture.csv", t);
  }
  if (fs::exists(dir / "daps2.csv")) {
    const auto a = aps::load_artifact(dir / "daps2.csv");
    Table t{{"iteration", "d1"}, {}};
    for (std::size_t i = 0; i < a.trace.size(); ++i) t.rows.push_back({static_cast<double>(i), a.trace[i]});
    write_csv(fig / "d1_trace.csv", t);
  }
}

std::string fmt(const json& v) {
  if (v.is_null()) return "n/a";
  if (v.is_number_float()) {
    std::ostringstream o;
    o << std::setprecision(4) << v.get<double>();
    return o.str();
  }
  return v.dump();
}

}  // namespace

void write_report(const fs::path& dir) {
  const auto s = summarize(dir);
  write_figures(dir, run_params(dir));
  std::ofstream out(dir / "report.md");
  out << "# Disinformation-war run\n\n";
  out << "Seed " << s["seed"] << ", configuration digest `" << s["config_digest"].get<std::string>().substr(0, 12)
      << "`.\n\n## Stages\n\n| stage | seconds | intact |\n|---|---|---|\n";
  for (const auto& [name, r] : s["stages"].items())
    out << "| " << name << " | " << fmt(r["seconds"]) << " | " << (r["intact"].get<bool>() ? "yes" : "NO") << " |\n";
  out << "\n## Results\n\n";
  if (s.contains("d1_star")) out << "- d1* = " << fmt(s["d1_star"]) << " (ψ_D = " << fmt(s["d1_value"]) << ")\n";
  if (s.contains("d2_policy")) {
    const auto& d = s["d2_policy"];
    out << "- d2* policy: mean " << fmt(d["mean"]) << ", share of grid with d2* > " << kActionThreshold << ": "
        << fmt(d["area_positive"]) << ", mean on θ1 ≤ 0.2, a2 ≤ 0.5: " << fmt(d["low_region_mean"]) << "\n";
    out << "- E[θ2] grid mean " << fmt(s["E_theta2"]) << ", share above capacity " << fmt(d["capacity_breach_area"]) << "\n";
  }
  if (s.contains("attack_forecast")) {
    const auto& f = s["attack_forecast"];
    out << "- mean A2*: " << fmt(f["mean_a2"]) << ", share of (d1, a1) with mean A2* < " << kActionThreshold << ": "
        << fmt(f["area_low_attack"]) << "\n";
  }
  if (s.contains("a1")) out << "- A1*: mean " << fmt(s["a1"]["mean"]) << ", share below " << kActionThreshold << ": "
                            << fmt(s["a1"]["fraction_low"]) << "\n";
  const auto& mm = s["metamodels"];
  if (mm.contains("psiD")) out << "- ψ_D metamodel test MAE " << fmt(mm["psiD"]["test_mae"]) << "\n";
  if (mm.contains("pA2")) out << "- p_A2 metamodel test NLL " << fmt(mm["pA2"]["test_nll"]) << "\n";
  if (mm.contains("PsiA")) out << "- Ψ_A metamodel test NLL " << fmt(mm["PsiA"]["test_nll"]) << " (thousands of M$)\n";
  if (mm.contains("pA1"))
    for (const auto& c : mm["pA1"]["components"])
      out << "- A1* mixture component: weight " << fmt(c["weight"]) << ", Beta(" << fmt(c["a"]) << ", " << fmt(c["b"])
          << "), mean " << fmt(c["mean"]) << "\n";
  out << "\nFigure inputs are in `figures/`.\n";
}

}  // namespace ara::pipeline

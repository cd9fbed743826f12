#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "ara/core/errors.hpp"
#include "ara/meta/checkpoint.hpp"
#include "ara/pipeline/config.hpp"
#include "ara/pipeline/stages.hpp"
#include "ara/pipeline/summary.hpp"
#include "ara/pipeline/sweep.hpp"

using namespace ara;
using namespace ara::pipeline;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Config tiny() {
  auto cfg = profile("desk");
  cfg.workers = 1;
  for (auto& [name, s] : cfg.simulations) {
    s.settings.chain = aps::ChainSettings::with_iterations(300, 4);
    s.settings.grid_step = 0.5;
    s.settings.value_draws = 200;
  }
  cfg.simulations["aaps1"].settings.draws_per_point = 8;
  cfg.simulations["aaps2"].settings.draws_per_point = 60;
  cfg.simulations["aaps2"].settings.value_draws = 20;
  for (auto& [name, f] : cfg.fits) {
    if (!f.hidden.empty()) f.hidden = {8};
    f.train.max_epochs = 30;
  }
  return cfg;
}

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("ara_pipeline_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

json without_timings(json s) {
  for (auto& [k, v] : s["stages"].items()) v.erase("seconds");
  return s;
}

}  // namespace

TEST_CASE("stage plan follows the dependency order") {
  const auto& order = stage_order();
  REQUIRE(order.size() == 8);
  for (const auto& s : order)
    for (const auto& in : stage_inputs(s)) CHECK(stage_rank(in) < stage_rank(s));
  CHECK(profile("desk").simulations.at("aaps2").settings.chain.augmentation == 120);
  CHECK(profile("paper").simulations.at("aaps2").settings.draws_per_point == 10000);
  CHECK_THROWS_AS(stage_rank("daps3"), ConfigError);
}

TEST_CASE("missing upstream output is a dependency error naming the stage") {
  TempDir t;
  Pipeline p(tiny(), t.path);
  try {
    p.run_stage("fit_psiD");
    FAIL("expected a dependency error");
  } catch (const DependencyError& e) {
    CHECK(e.missing_stage == "daps1");
  }
}

TEST_CASE("re-running a stage reproduces its digests") {
  TempDir t;
  Pipeline p(tiny(), t.path);
  const auto first = p.run_stage("daps1");
  const auto second = p.run_stage("daps1");
  CHECK(first.outputs == second.outputs);
  CHECK(first.digest == second.digest);
}

TEST_CASE("up-to-date stages are skipped and parameter changes invalidate only downstream work") {
  TempDir t;
  auto cfg = tiny();
  Pipeline(cfg, t.path).run_through("fit_psiD");
  Pipeline p(cfg, t.path);
  CHECK(p.up_to_date("daps1"));
  CHECK(p.up_to_date("fit_psiD"));
  CHECK_FALSE(p.up_to_date("aaps1"));
  const auto outcome = p.run_through("fit_psiD");
  CHECK(outcome.at(0).skipped);
  CHECK(outcome.at(1).skipped);

  auto attacker_change = cfg;
  attacker_change.params.t_a = 1.0;
  CHECK(Pipeline(attacker_change, t.path).up_to_date("daps1"));

  auto fit_change = cfg;
  fit_change.fits["fit_psiD"].train.patience = 7;
  CHECK(fit_change.stage_digest("aaps1") == cfg.stage_digest("aaps1"));
  CHECK(fit_change.stage_digest("fit_psiD") != cfg.stage_digest("fit_psiD"));
  CHECK(fit_change.stage_digest("daps2") != cfg.stage_digest("daps2"));

  auto defender_change = cfg;
  defender_change.params.omega_d2 = 1.3;
  CHECK_FALSE(Pipeline(defender_change, t.path).up_to_date("daps1"));
  CHECK_FALSE(Pipeline(defender_change, t.path).up_to_date("fit_psiD"));
}

TEST_CASE("a modified upstream file is never used silently") {
  TempDir t;
  Pipeline p(tiny(), t.path);
  p.run_through("fit_psiD");
  std::ofstream(t.path / "daps1.csv", std::ios::app) << "0,0,0,0,0,0\n";
  CHECK_FALSE(p.up_to_date("daps1"));
  CHECK_FALSE(p.up_to_date("fit_psiD"));
  try {
    p.run_stage("fit_psiD");
    FAIL("expected a dependency error");
  } catch (const DependencyError& e) {
    CHECK(e.missing_stage == "daps1");
  }
}

TEST_CASE("overrides address every section and reject unknown keys") {
  auto doc = profile_json("desk");
  apply_override(doc, "stages.daps1.iterations=2000");
  apply_override(doc, "case.omega_d2=1.3");
  apply_override(doc, "run.force_zero_attack=true");
  const auto cfg = Config::from_json(doc);
  CHECK(cfg.simulations.at("daps1").settings.chain.iterations == 2000);
  CHECK(cfg.params.omega_d2 == doctest::Approx(1.3));
  CHECK(cfg.force_zero_attack);
  CHECK_THROWS_AS(apply_override(doc, "stages.daps1.nope=1"), ConfigError);
  CHECK_THROWS_AS(apply_override(doc, "missing-equals"), ConfigError);
  CHECK(load_config(std::nullopt, {"run.profile=paper"}).simulations.at("daps1").settings.grid_step ==
        doctest::Approx(0.05));
  auto bad = profile_json("desk");
  bad["stages"]["daps1"]["h"] = 0;
  CHECK_THROWS_AS(Config::from_json(bad).validate(), ConfigError);
}

TEST_CASE("config file and round trip") {
  TempDir t;
  auto cfg = tiny();
  cfg.seed = 17;
  meta::save_json(t.path / "c.json", cfg.to_json());
  const auto back = load_config(t.path / "c.json", {"run.seed=18"});
  CHECK(back.seed == 18);
  auto expected = cfg;
  expected.seed = 18;
  CHECK(back.digest() == expected.digest());
}

TEST_CASE("zero-attack forcing gives no infections") {
  TempDir t;
  auto cfg = tiny();
  cfg.force_zero_attack = true;
  Pipeline(cfg, t.path).run_through("daps1");
  const auto s = summarize(t.path);
  CHECK(s.at("E_theta2").get<double>() == 0.0);
}

TEST_CASE("summary digests match the manifest") {
  TempDir t;
  Pipeline p(tiny(), t.path);
  p.run_through("daps2");
  const auto s = summarize(t.path);
  const auto m = load_manifest(t.path);
  REQUIRE(s.at("stages").size() == m.stages.size());
  for (const auto& [name, r] : m.stages) {
    CHECK(s["stages"][name]["digest"] == r.digest);
    CHECK(s["stages"][name]["intact"].get<bool>());
    for (const auto& f : r.outputs) CHECK(s["stages"][name]["outputs"][f.path] == f.sha256);
  }
  CHECK(s.contains("d1_star"));
  CHECK(s["metamodels"].contains("pA1"));
  CHECK(fs::exists(t.path / "summary.json"));

  write_report(t.path);
  for (const auto* f : {"report.md", "figures/d2_policy.csv", "figures/d2_mean_over_d1.csv", "figures/a2_forecast.csv",
                        "figures/a1_draws.csv", "figures/a1_mixture.csv", "figures/d1_trace.csv"})
    CHECK(fs::exists(t.path / f));
}

TEST_CASE("summarize needs an intact manifest") {
  TempDir t;
  CHECK_THROWS_AS(summarize(t.path), DataError);
  std::ofstream(t.path / kManifestFile) << "{not json";
  CHECK_THROWS_AS(summarize(t.path), DataError);
}

TEST_CASE("identical configuration and seed give identical summaries") {
  TempDir a, b;
  Pipeline(tiny(), a.path).run_through("daps2");
  Pipeline(tiny(), b.path).run_through("daps2");
  CHECK(without_timings(summarize(a.path)) == without_timings(summarize(b.path)));
}

TEST_CASE("sweep values parse per tuple") {
  const auto one = parse_sweep_values("0.4,0.7,1.3", 1);
  CHECK(one == std::vector<std::vector<double>>{{0.4}, {0.7}, {1.3}});
  const auto two = parse_sweep_values("1:1.2,1.2:1", 2);
  CHECK(two == std::vector<std::vector<double>>{{1.0, 1.2}, {1.2, 1.0}});
  CHECK(parse_sweep_values("", 1).empty());
  CHECK_THROWS_AS(parse_sweep_values("1:2", 1), ConfigError);
  CHECK_THROWS_AS(parse_sweep_values("x", 1), ConfigError);
}

TEST_CASE("an empty sweep is a no-op and unknown parameters are rejected") {
  TempDir t;
  const auto table = run_sweep(tiny(), t.path, {"omega_d2"}, {}, "daps1");
  CHECK(table.rows.empty());
  CHECK(table.columns.front() == "omega_d2");
  CHECK_FALSE(fs::exists(t.path / "sweeps"));
  CHECK_THROWS_AS(run_sweep(tiny(), t.path, {"omega_x"}, {{1.0}}, "daps1"), ConfigError);
}

TEST_CASE("a sweep reuses the stages its parameter does not reach") {
  TempDir t;
  const auto cfg = tiny();
  Pipeline(cfg, t.path).run_through("aaps1");
  const auto table = run_sweep(cfg, t.path, {"t_d", "t_a"}, {{1.0, 1.0}}, "aaps1");
  REQUIRE(table.rows.size() == 1);
  const auto base = load_manifest(t.path);
  const auto point = load_manifest(t.path / "sweeps" / "t_d+t_a" / "1_1");
  CHECK(point.stages.at("daps1").outputs == base.stages.at("daps1").outputs);
  CHECK(point.stages.at("daps1").seconds == base.stages.at("daps1").seconds);
  CHECK(point.stages.at("aaps1").digest != base.stages.at("aaps1").digest);
  CHECK(table.rows[0][table.column("area_low_attack")] >= 0.0);
}

#include "ara/pipeline/stages.hpp"

#include <chrono>
#include <map>
#include <memory>

#include "ara/aps/artifact.hpp"
#include "ara/core/errors.hpp"
#include "ara/disinfo/model.hpp"
#include "ara/meta/bindings.hpp"
#include "ara/meta/checkpoint.hpp"
#include "ara/meta/mixture.hpp"
#include "ara/meta/regressor.hpp"

namespace ara::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string>& stage_inputs(const std::string& stage) {
  static const std::map<std::string, std::vector<std::string>> inputs{
      {"daps1", {}},
      {"fit_psiD", {"daps1"}},
      {"aaps1", {}},
      {"fit_pA2", {"aaps1"}},
      {"fit_PsiA", {"aaps1"}},
      {"aaps2", {"aaps1", "fit_PsiA"}},
      {"fit_pA1", {"aaps2"}},
      {"daps2", {"daps1", "fit_psiD", "aaps1", "fit_pA2", "fit_PsiA", "aaps2", "fit_pA1"}}};
  stage_rank(stage);
  return inputs.at(stage);
}

const std::vector<std::string>& stage_outputs(const std::string& stage) {
  static const std::map<std::string, std::vector<std::string>> outputs{
      {"daps1", {"daps1.csv", "daps1.json"}},
      {"fit_psiD", {"psiD.json", "fit_psiD_metrics.json"}},
      {"aaps1", {"aaps1.csv", "aaps1.json"}},
      {"fit_pA2", {"pA2.json", "fit_pA2_metrics.json"}},
      {"fit_PsiA", {"PsiA.json", "fit_PsiA_metrics.json"}},
      {"aaps2", {"aaps2.csv", "aaps2.json"}},
      {"fit_pA1", {"pA1.json", "fit_pA1_metrics.json"}},
      {"daps2", {"daps2.csv", "daps2.json"}}};
  stage_rank(stage);
  return outputs.at(stage);
}

namespace {

// Decision reduced by each simulation stage.
const std::map<std::string, std::string>& stage_decisions() {
  static const std::map<std::string, std::string> d{{"daps1", "d2"}, {"aaps1", "a2"}, {"aaps2", "a1"}, {"daps2", "d1"}};
  return d;
}

constexpr double kPsiAScale = 1000.0;

meta::TrainConfig train_config(const Config& cfg, const std::string& stage) {
  auto t = cfg.fits.at(stage).train;
  t.seed = mix_seed(cfg.seed, {label_hash(stage), t.seed});
  return t;
}

json scalar_metrics(const meta::ScalarFit& f) {
  return {{"test_mae", f.test.mae},
          {"test_rmse", f.test.rmse},
          {"train_size", f.train_idx.size()},
          {"test_size", f.test_idx.size()},
          {"epochs", f.report.epochs},
          {"best_epoch", f.report.best_epoch}};
}

json mixture_metrics(const meta::MixtureFit& f) {
  return {{"test_nll", f.test_nll},
          {"train_size", f.train_idx.size()},
          {"test_size", f.test_idx.size()},
          {"epochs", f.report.epochs},
          {"best_epoch", f.report.best_epoch}};
}

json components_json(const meta::Mixture& m) {
  auto a = json::array();
  for (const auto& c : m.components)
    a.push_back({{"weight", c.weight}, {"a", c.a}, {"b", c.b}, {"mean", meta::component_mean(m.family, c.a, c.b)}});
  return a;
}

// Restores everything up to (not including) the given stage into the solver.
class Restorer {
 public:
  Restorer(const fs::path& dir, aps::BaidSolver& solver) : dir_(dir), solver_(solver) {}

  void daps1() {
    const auto a = aps::load_artifact(dir_ / "daps1.csv");
    auto psi = std::make_shared<meta::ScalarRegressor>(meta::regressor_from_json(meta::load_json(dir_ / "psiD.json")));
    solver_.install_daps(solver_.step("d2"), a, meta::value_function(psi, a.conditioning));
  }

  void aaps1(bool with_forecast) {
    const auto a = aps::load_artifact(dir_ / "aaps1.csv");
    auto psi = std::make_shared<meta::MixtureModel>(meta::mixture_model_from_json(meta::load_json(dir_ / "PsiA.json")));
    aps::Forecast f;
    if (with_forecast) {
      auto pa2 = std::make_shared<meta::MixtureModel>(meta::mixture_model_from_json(meta::load_json(dir_ / "pA2.json")));
      f = meta::forecast(pa2, a.conditioning, a.decision_domain);
    }
    solver_.install_aaps(solver_.step("a2"), a, std::move(f), meta::random_value(psi, a.conditioning, a.grid));
  }

  void aaps2() {
    const auto a = aps::load_artifact(dir_ / "aaps2.csv");
    const auto m = meta::mixture_from_json(meta::load_json(dir_ / "pA1.json").at("mixture"));
    // No attacker stage follows, so the next random value is never realized.
    aps::RandomValueFunction none;
    none.parents = solver_.step("a1").reduction.inherited_parents;
    solver_.install_aaps(solver_.step("a1"), a, meta::forecast(m, a.decision_domain), std::move(none));
  }

 private:
  fs::path dir_;
  aps::BaidSolver& solver_;
};

}  // namespace

aps::BaidSolver make_solver(const Config& cfg) {
  auto g = disinfo::case_baid();
  if (cfg.force_zero_attack) g = g.with_domain("a2", baid::Domain::discrete({0.0}));
  aps::SolveOptions o;
  o.seed = cfg.seed;
  o.workers = cfg.workers;
  for (const auto& [stage, decision] : stage_decisions()) o.per_decision[decision] = cfg.simulations.at(stage).settings;
  o.defaults = cfg.simulations.at("daps1").settings;
  return aps::BaidSolver(g, disinfo::defender_model(cfg.params), disinfo::attacker_model(cfg.params), o);
}

Pipeline::Pipeline(Config cfg, fs::path run_dir) : cfg_(std::move(cfg)), dir_(std::move(run_dir)) {
  cfg_.validate();
  fs::create_directories(dir_);
}

void Pipeline::check_inputs(const std::string& stage, const Manifest& m) const {
  for (const auto& in : stage_inputs(stage)) {
    auto it = m.stages.find(in);
    if (it == m.stages.end())
      throw DependencyError(in, "stage " + stage + " needs the outputs of " + in + "; run " + in + " first");
    if (it->second.digest != cfg_.stage_digest(in))
      throw DependencyError(in, "outputs of " + in + " were produced under a different configuration; rerun " + in);
    if (!files_intact(dir_, it->second.outputs))
      throw DependencyError(in, "outputs of " + in + " are missing or modified; rerun " + in);
  }
}

bool Pipeline::up_to_date(const std::string& stage) const {
  const auto m = load_manifest(dir_);
  auto it = m.stages.find(stage);
  if (it == m.stages.end() || it->second.digest != cfg_.stage_digest(stage)) return false;
  if (!files_intact(dir_, it->second.outputs) || !files_intact(dir_, it->second.inputs)) return false;
  try {
    check_inputs(stage, m);
  } catch (const DependencyError&) {
    return false;
  }
  return true;
}

void Pipeline::execute(const std::string& stage) {
  if (is_simulation(stage)) {
    auto solver = make_solver(cfg_);
    Restorer restore(dir_, solver);
    if (stage == "aaps2") restore.aaps1(false);
    if (stage == "daps2") {
      restore.daps1();
      restore.aaps1(true);
      restore.aaps2();
    }
    const auto& step = solver.step(stage_decisions().at(stage));
    const auto a = step.kind == aps::Step::Kind::daps ? solver.daps_reduce(step, solver.default_grid(step))
                                                      : solver.aaps_reduce(step, solver.default_grid(step));
    aps::save_artifact(dir_ / (stage + ".csv"), a);
    return;
  }

  const auto& fit = cfg_.fits.at(stage);
  const auto train = train_config(cfg_, stage);
  if (stage == "fit_psiD") {
    const auto a = aps::load_artifact(dir_ / "daps1.csv");
    meta::RegressionDataset data;
    data.inputs = a.points;
    for (const auto& v : a.values) data.targets.push_back(v[0]);
    const auto f = meta::fit_scalar(data, fit.hidden, train);
    meta::save_json(dir_ / "psiD.json", meta::to_json(f.model));
    meta::save_json(dir_ / "fit_psiD_metrics.json", scalar_metrics(f));
  } else if (stage == "fit_pA2" || stage == "fit_PsiA") {
    const auto a = aps::load_artifact(dir_ / "aaps1.csv");
    meta::MixtureDataset data;
    data.inputs = a.points;
    const bool beta = stage == "fit_pA2";
    data.draws = beta ? a.draws : a.values;
    const auto f = meta::fit_mixture(data, beta ? meta::Family::beta : meta::Family::weibull, fit.components, fit.hidden,
                                     train, beta ? 1.0 : kPsiAScale);
    const std::string base = beta ? "pA2" : "PsiA";
    meta::save_json(dir_ / (base + ".json"), meta::to_json(f.model));
    auto metrics = mixture_metrics(f);
    metrics["data_scale"] = f.model.data_scale;
    meta::save_json(dir_ / ("fit_" + base + "_metrics.json"), metrics);
  } else if (stage == "fit_pA1") {
    const auto a = aps::load_artifact(dir_ / "aaps2.csv");
    const auto f = meta::fit_unconditional(a.draws.at(0), meta::Family::beta, fit.components, train);
    const auto m = f.model.at(std::vector<double>{});
    meta::save_json(dir_ / "pA1.json", {{"model", meta::to_json(f.model)}, {"mixture", meta::to_json(m)}});
    auto metrics = mixture_metrics(f);
    metrics["components"] = components_json(m);
    meta::save_json(dir_ / "fit_pA1_metrics.json", metrics);
  }
}

StageRecord Pipeline::run_stage(const std::string& stage) {
  stage_rank(stage);
  auto m = load_manifest(dir_);
  check_inputs(stage, m);
  meta::save_json(dir_ / "config.json", cfg_.to_json());

  const auto t0 = std::chrono::steady_clock::now();
  execute(stage);
  StageRecord r;
  r.stage = stage;
  r.digest = cfg_.stage_digest(stage);
  r.seed = cfg_.seed;
  for (const auto& in : stage_inputs(stage)) {
    const auto files = digest_files(dir_, stage_outputs(in));
    r.inputs.insert(r.inputs.end(), files.begin(), files.end());
  }
  r.outputs = digest_files(dir_, stage_outputs(stage));
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  m = load_manifest(dir_);
  m.config_digest = cfg_.digest();
  m.seed = cfg_.seed;
  m.stages[stage] = r;
  save_manifest(dir_, m);
  return r;
}

std::vector<StageOutcome> Pipeline::run_through(const std::string& last, bool force) {
  const auto end = stage_rank(last);
  std::vector<StageOutcome> out;
  for (std::size_t i = 0; i <= end; ++i) {
    const auto& s = stage_order()[i];
    if (!force && up_to_date(s)) {
      out.push_back({s, true, 0.0});
      continue;
    }
    out.push_back({s, false, run_stage(s).seconds});
  }
  return out;
}

}  // namespace ara::pipeline

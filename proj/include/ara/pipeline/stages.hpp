#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ara/aps/solver.hpp"
#include "ara/pipeline/config.hpp"
#include "ara/pipeline/manifest.hpp"

namespace ara::pipeline {

// Stages whose outputs a stage reads.
const std::vector<std::string>& stage_inputs(const std::string& stage);
// Files a stage writes, relative to the run directory.
const std::vector<std::string>& stage_outputs(const std::string& stage);

// Solver for the case diagram with the configuration's stage settings.
aps::BaidSolver make_solver(const Config& cfg);

struct StageOutcome {
  std::string stage;
  bool skipped = false;  // outputs were already up to date
  double seconds = 0.0;
};

class Pipeline {
 public:
  Pipeline(Config cfg, std::filesystem::path run_dir);

  const Config& config() const { return cfg_; }
  const std::filesystem::path& dir() const { return dir_; }
  Manifest manifest() const { return load_manifest(dir_); }

  // Recorded with the current stage digest, outputs intact, and inputs
  // unchanged since the stage ran.
  bool up_to_date(const std::string& stage) const;

  // Throws DependencyError naming the first input stage that is missing or
  // stale.
  StageRecord run_stage(const std::string& stage);

  // Every stage up to and including `last`, skipping up-to-date ones unless
  // forced.
  std::vector<StageOutcome> run_through(const std::string& last, bool force = false);

 private:
  void check_inputs(const std::string& stage, const Manifest& m) const;
  void execute(const std::string& stage);

  Config cfg_;
  std::filesystem::path dir_;
};

}  // namespace ara::pipeline

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ara/baid/baid.hpp"
#include "ara/core/errors.hpp"
#include "ara/disinfo/model.hpp"
#include "ara/pipeline/config.hpp"
#include "ara/pipeline/stages.hpp"
#include "ara/pipeline/summary.hpp"
#include "ara/pipeline/sweep.hpp"

namespace fs = std::filesystem;
using namespace ara;
using namespace ara::pipeline;

namespace {

constexpr int kValidationFailure = 2;
constexpr int kDependencyFailure = 3;

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto end = s.find(',', start);
    const auto part = s.substr(start, end == std::string::npos ? std::string::npos : end - start);
    if (!part.empty()) out.push_back(part);
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial risk analysis of the disinformation war"};
  app.require_subcommand(1);
  std::string config_file, run_dir = "run";
  std::vector<std::string> overrides;
  std::optional<std::size_t> workers;
  app.add_option("--config", config_file, "configuration file (default: $ARA_CONFIG)");
  app.add_option("--set", overrides, "override, e.g. stages.daps1.iterations=2000")->take_all();
  app.add_option("--run-dir", run_dir, "run directory")->capture_default_str();
  app.add_option("--workers", workers, "worker threads (0 = all)");

  auto* validate = app.add_subcommand("validate", "check the configuration and the case diagram");

  std::string target;
  bool force = false;
  auto* run = app.add_subcommand("run", "run one stage or all of them");
  run->add_option("stage", target, "stage name or 'all'")->required();
  run->add_flag("--force", force, "recompute even when up to date");

  std::string sweep_params, sweep_values, through = "daps2";
  auto* sweep = app.add_subcommand("sweep", "sensitivity sweep over case parameters");
  sweep->add_option("params", sweep_params, "parameter, or comma-separated parameters")->required();
  sweep->add_option("--values", sweep_values, "\"0.4,0.7\" or \"1:1.2,1:1\"");
  sweep->add_option("--through", through, "last stage to run")->capture_default_str();

  auto* summarize_cmd = app.add_subcommand("summarize", "write summary.json");
  auto* report = app.add_subcommand("report", "write summary.json, report.md and figures/");

  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = load_config(config_file.empty() ? std::nullopt : std::optional<fs::path>(config_file), overrides);
    if (workers) cfg.workers = *workers;
    const fs::path dir(run_dir);

    if (validate->parsed()) {
      cfg.validate();
      const auto r = baid::validate_proper(disinfo::case_baid());
      for (const auto& v : r.violations) std::cerr << "diagram: " << v << "\n";
      if (!r.proper()) return kValidationFailure;
      std::cout << "configuration valid (profile " << cfg.profile << ", digest " << cfg.digest().substr(0, 12) << ")\n";
      return 0;
    }
    if (run->parsed()) {
      cfg.validate();
      fs::create_directories(dir);
      Pipeline p(cfg, dir);
      if (target == "all") {
        for (const auto& s : stage_order()) {
          const bool skip = !force && p.up_to_date(s);
          std::cerr << s << (skip ? ": up to date\n" : ": running\n");
          if (!skip) {
            const auto r = p.run_stage(s);
            std::cerr << s << ": " << r.seconds << " s\n";
          }
        }
      } else {
        stage_rank(target);
        if (!force && p.up_to_date(target)) {
          std::cerr << target << ": up to date\n";
        } else {
          const auto r = p.run_stage(target);
          std::cerr << target << ": " << r.seconds << " s\n";
        }
      }
      return 0;
    }
    if (sweep->parsed()) {
      cfg.validate();
      const auto params = split_commas(sweep_params);
      const auto values = parse_sweep_values(sweep_values, params.size());
      const auto trend = run_sweep(cfg, dir, params, values, through);
      for (std::size_t c = 0; c < trend.columns.size(); ++c) std::cout << (c ? "," : "") << trend.columns[c];
      std::cout << "\n";
      for (const auto& row : trend.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) std::cout << (c ? "," : "") << row[c];
        std::cout << "\n";
      }
      return 0;
    }
    if (summarize_cmd->parsed()) {
      std::cout << summarize(dir).dump(2) << "\n";
      return 0;
    }
    if (report->parsed()) {
      write_report(dir);
      std::cout << "wrote " << (dir / "report.md").string() << "\n";
      return 0;
    }
  } catch (const DependencyError& e) {
    std::cerr << "dependency error: " << e.what() << " (run stage '" << e.missing_stage << "' first)\n";
    return kDependencyFailure;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ara/core/table.hpp"
#include "ara/pipeline/config.hpp"

namespace ara::pipeline {

// Parses "0.4,0.7" for one parameter or "1:1.2,1:1" for several.
std::vector<std::vector<double>> parse_sweep_values(const std::string& text, std::size_t params);

// Runs the pipeline through `through` at every value tuple of the case
// parameters, each in base_dir/sweeps/<params>/<values>. Stages whose digest
// matches the base run are copied instead of recomputed. Returns the trend
// table (also written as trend.csv next to the points): one row per tuple with
// the parameter values, area_d2_positive, mean_d2, area_low_attack, mean_a2 and
// d1_star; NaN where the stage was not run.
Table run_sweep(const Config& base, const std::filesystem::path& base_dir, const std::vector<std::string>& params,
                const std::vector<std::vector<double>>& values, const std::string& through);

}  // namespace ara::pipeline

#pragma once

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "ara/aps/artifact.hpp"

namespace ara::pipeline {

// A policy value counts as "no action" below this level.
inline constexpr double kActionThreshold = 0.05;

struct D2PolicyStats {
  double mean = 0.0;
  double area_positive = 0.0;  // fraction of grid points with d₂* > threshold
  double low_region_mean = 0.0;  // over θ₁ ≤ 0.2, a₂ ≤ 0.5
  std::optional<double> mean_at_probe;  // over d₁ at θ₁ = 0.05, a₂ = 1 when on the grid
  double expected_theta2 = 0.0;  // grid mean of E[θ₂] at the optimum
  double capacity_breach_area = 0.0;  // fraction of points with E[θ₂] > c
};

D2PolicyStats d2_stats(const aps::PolicyArtifact& daps1, double capacity);

struct A2ForecastStats {
  double mean = 0.0;
  double area_low = 0.0;  // fraction of (d₁, a₁) points with mean A₂* < threshold
};

A2ForecastStats a2_stats(const aps::PolicyArtifact& aaps1);

// Machine-readable summary of whatever stages a run directory holds; also
// written to summary.json. DataError when the manifest is missing or corrupt.
nlohmann::json summarize(const std::filesystem::path& run_dir);

// summary.json, report.md and the CSV inputs of the figures under figures/.
void write_report(const std::filesystem::path& run_dir);

}  // namespace ara::pipeline

#pragma once

#include <vector>

#include "ara/meta/mlp.hpp"

namespace ara::meta {

struct RegressionDataset {
  std::vector<std::vector<double>> inputs;
  std::vector<double> targets;

  void validate() const;  // throws DataError
};

// MLP on standardized inputs and targets.
struct ScalarRegressor {
  Mlp net;
  Standardizer x;
  double y_mean = 0.0;
  double y_scale = 1.0;

  double predict(const double* x) const;
  double predict(const std::vector<double>& x) const { return predict(x.data()); }
};

struct ScalarMetrics {
  double mae = 0.0;
  double rmse = 0.0;
};

struct ScalarFit {
  ScalarRegressor model;
  ScalarMetrics test;
  TrainReport report;
  std::vector<std::size_t> train_idx, test_idx;
};

// Trains on the given rows (an inner validation split drives early stopping).
ScalarRegressor train_scalar(const RegressionDataset& data, const std::vector<std::size_t>& rows,
                             const std::vector<std::size_t>& hidden, const TrainConfig& cfg, TrainReport* report = nullptr);

ScalarMetrics evaluate_scalar(const ScalarRegressor& m, const RegressionDataset& data, const std::vector<std::size_t>& rows);

// Train/test split, training on the first part and metrics on the held-out part.
ScalarFit fit_scalar(const RegressionDataset& data, const std::vector<std::size_t>& hidden, const TrainConfig& cfg);

}  // namespace ara::meta

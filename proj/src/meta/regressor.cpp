#include "ara/meta/regressor.hpp"

#include <cmath>
#include <numeric>

#include "ara/core/errors.hpp"

namespace ara::meta {

void RegressionDataset::validate() const {
  if (inputs.empty()) throw DataError("regression dataset is empty");
  if (inputs.size() != targets.size()) throw DataError("regression dataset has mismatched inputs and targets");
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].size() != inputs.front().size()) throw DataError("regression inputs have mixed widths");
    if (!std::isfinite(targets[i])) throw DataError("regression target " + std::to_string(i) + " is not finite");
    for (double v : inputs[i])
      if (!std::isfinite(v)) throw DataError("regression input " + std::to_string(i) + " is not finite");
  }
}

double ScalarRegressor::predict(const double* xin) const {
  const auto z = x.apply(xin);
  double out = 0.0;
  net.forward(z.data(), &out);
  return y_mean + y_scale * out;
}

ScalarRegressor train_scalar(const RegressionDataset& data, const std::vector<std::size_t>& rows,
                             const std::vector<std::size_t>& hidden, const TrainConfig& cfg, TrainReport* report) {
  data.validate();
  if (rows.empty()) throw std::invalid_argument("no rows to train on");
  Rng rng = make_rng(cfg.seed, {0x5ca1a7ULL, rows.size()});
  ScalarRegressor m;
  m.x = Standardizer::fit(data.inputs, rows);
  double mean = 0.0;
  for (auto i : rows) mean += data.targets[i];
  mean /= static_cast<double>(rows.size());
  double var = 0.0;
  for (auto i : rows) var += (data.targets[i] - mean) * (data.targets[i] - mean);
  m.y_mean = mean;
  m.y_scale = std::sqrt(var / static_cast<double>(rows.size()));
  if (!(m.y_scale > 1e-12)) m.y_scale = 1.0;

  std::vector<std::size_t> sizes{data.inputs.front().size()};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);
  m.net = Mlp(sizes, rng);

  std::vector<std::vector<double>> z(data.inputs.size());
  for (auto i : rows) z[i] = m.x.apply(data.inputs[i].data());
  std::vector<double> zy(data.targets.size());
  for (auto i : rows) zy[i] = (data.targets[i] - m.y_mean) / m.y_scale;

  auto [tr, va] = split_indices(rows, cfg.validation_fraction, rng);
  auto loss = [&](std::size_t i, const double* out, double* g) {
    const double r = out[0] - zy[i];
    g[0] = 2.0 * r;
    return r * r;
  };
  auto rep = train(m.net, z, tr, va, loss, cfg, rng);
  if (report) *report = std::move(rep);
  return m;
}

ScalarMetrics evaluate_scalar(const ScalarRegressor& m, const RegressionDataset& data, const std::vector<std::size_t>& rows) {
  ScalarMetrics s;
  for (auto i : rows) {
    const double e = m.predict(data.inputs[i]) - data.targets[i];
    s.mae += std::abs(e);
    s.rmse += e * e;
  }
  s.mae /= static_cast<double>(rows.size());
  s.rmse = std::sqrt(s.rmse / static_cast<double>(rows.size()));
  return s;
}

ScalarFit fit_scalar(const RegressionDataset& data, const std::vector<std::size_t>& hidden, const TrainConfig& cfg) {
  data.validate();
  cfg.validate();
  Rng rng = make_rng(cfg.seed, {0x7e57ULL});
  ScalarFit f;
  std::tie(f.train_idx, f.test_idx) = split_indices(data.inputs.size(), cfg.test_fraction, rng);
  if (f.test_idx.empty() || f.train_idx.empty()) throw DataError("dataset too small for a train/test split");
  f.model = train_scalar(data, f.train_idx, hidden, cfg, &f.report);
  f.test = evaluate_scalar(f.model, data, f.test_idx);
  return f;
}

}  // namespace ara::meta

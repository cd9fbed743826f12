#pragma once

#include <string>
#include <vector>

#include "ara/meta/mlp.hpp"

namespace ara::meta {

enum class Family { beta, weibull };
std::string to_string(Family f);
Family family_from_string(const std::string& s);

// Beta draws are clipped into [kBetaClip, 1 − kBetaClip] before fitting.
inline constexpr double kBetaClip = 1e-4;

// Beta: a = α, b = β. Weibull: a = shape, b = scale.
struct Component {
  double weight = 1.0;
  double a = 1.0;
  double b = 1.0;
};

double component_log_pdf(Family f, double a, double b, double x);
double component_cdf(Family f, double a, double b, double x);
double component_quantile(Family f, double a, double b, double q);
double component_mean(Family f, double a, double b);
// d log pdf / d a and d log pdf / d b.
void component_log_pdf_grad(Family f, double a, double b, double x, double& da, double& db);

struct Mixture {
  Family family = Family::beta;
  std::vector<Component> components;

  double pdf(double x) const;
  double log_pdf(double x) const;
  double cdf(double x) const;
  double quantile(double q) const;
  double mean() const;
  double sample(Rng& rng) const;
};

// Inputs per point with K draws each.
struct MixtureDataset {
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> draws;

  void validate() const;  // throws DataError
};

// Conditional mixture: the network maps standardized inputs to
// (logits, raw a, raw b) per component; weights by softmax, shapes by
// softplus. Draws are modelled in units of data_scale (x / data_scale).
struct MixtureModel {
  Family family = Family::beta;
  std::size_t components = 2;
  double data_scale = 1.0;
  Mlp net;
  Standardizer x;

  // Mixture in data units.
  Mixture at(const double* x) const;
  Mixture at(const std::vector<double>& x) const { return at(x.data()); }
};

// Maps raw network outputs to the mixture (in model units) and back.
Mixture mixture_head(Family f, std::size_t components, const double* raw);

// Negative log-likelihood of one point's draws (model units) and its
// gradient with respect to the raw outputs.
double mixture_point_nll(Family f, std::size_t components, const double* raw, const std::vector<double>& draws,
                         double* grad_raw);

// Mean over points of the summed NLL of each point's draws (data units).
double mixture_nll(const MixtureModel& m, const MixtureDataset& data, const std::vector<std::size_t>& rows);

struct MixtureFit {
  MixtureModel model;
  double test_nll = 0.0;
  TrainReport report;
  std::vector<std::size_t> train_idx, test_idx;
};

// Prepares draws (clipping for Beta, scaling) and checks the support.
MixtureDataset prepare_mixture_data(const MixtureDataset& data, Family f, double data_scale);

MixtureModel train_mixture(const MixtureDataset& data, const std::vector<std::size_t>& rows, Family f,
                           std::size_t components, const std::vector<std::size_t>& hidden, const TrainConfig& cfg,
                           double data_scale = 1.0, TrainReport* report = nullptr);

MixtureFit fit_mixture(const MixtureDataset& data, Family f, std::size_t components,
                       const std::vector<std::size_t>& hidden, const TrainConfig& cfg, double data_scale = 1.0);

// Unconditional mixture fitted to a flat sample (each draw is one point).
MixtureFit fit_unconditional(const std::vector<double>& draws, Family f, std::size_t components, const TrainConfig& cfg,
                             double data_scale = 1.0);

}  // namespace ara::meta

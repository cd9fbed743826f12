#include "ara/meta/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>

#include "ara/core/errors.hpp"

namespace ara::meta {

std::string to_string(Family f) { return f == Family::beta ? "beta" : "weibull"; }

Family family_from_string(const std::string& s) {
  if (s == "beta") return Family::beta;
  if (s == "weibull") return Family::weibull;
  throw std::invalid_argument("unknown mixture family '" + s + "'");
}

namespace {

constexpr double kShapeFloor = 1e-6;

double softplus(double r) { return r > 30.0 ? r : std::log1p(std::exp(r)); }
double sigmoid(double r) { return 1.0 / (1.0 + std::exp(-r)); }
double softplus_inverse(double y) { return y > 30.0 ? y : std::log(std::expm1(y)); }

}  // namespace

double component_log_pdf(Family f, double a, double b, double x) {
  if (f == Family::beta) {
    if (x <= 0.0 || x >= 1.0) return -std::numeric_limits<double>::infinity();
    return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x);
  }
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  const double lz = std::log(x / b);
  return std::log(a) - std::log(b) + (a - 1.0) * lz - std::exp(a * lz);
}

void component_log_pdf_grad(Family f, double a, double b, double x, double& da, double& db) {
  if (f == Family::beta) {
    const double dab = boost::math::digamma(a + b);
    da = dab - boost::math::digamma(a) + std::log(x);
    db = dab - boost::math::digamma(b) + std::log1p(-x);
    return;
  }
  const double lz = std::log(x / b);
  const double zk = std::exp(a * lz);
  da = 1.0 / a + lz - zk * lz;
  db = a * (zk - 1.0) / b;
}

double component_cdf(Family f, double a, double b, double x) {
  if (f == Family::beta) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return boost::math::ibeta(a, b, x);
  }
  if (x <= 0.0) return 0.0;
  return -std::expm1(-std::pow(x / b, a));
}

double component_quantile(Family f, double a, double b, double q) {
  if (f == Family::beta) return boost::math::ibeta_inv(a, b, q);
  return b * std::pow(-std::log1p(-q), 1.0 / a);
}

double component_mean(Family f, double a, double b) {
  if (f == Family::beta) return a / (a + b);
  return b * std::tgamma(1.0 + 1.0 / a);
}

double Mixture::log_pdf(double x) const {
  double m = -std::numeric_limits<double>::infinity();
  std::vector<double> t(components.size());
  for (std::size_t c = 0; c < components.size(); ++c) {
    t[c] = std::log(components[c].weight) + component_log_pdf(family, components[c].a, components[c].b, x);
    m = std::max(m, t[c]);
  }
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : t) s += std::exp(v - m);
  return m + std::log(s);
}

double Mixture::pdf(double x) const { return std::exp(log_pdf(x)); }

double Mixture::cdf(double x) const {
  double s = 0.0;
  for (const auto& c : components) s += c.weight * component_cdf(family, c.a, c.b, x);
  return s;
}

double Mixture::quantile(double q) const {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile level must lie in (0,1)");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& c : components) {
    const double v = component_quantile(family, c.a, c.b, q);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (components.size() == 1 || hi - lo <= 0.0) return lo;
  for (int it = 0; it < 100 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double Mixture::mean() const {
  double s = 0.0;
  for (const auto& c : components) s += c.weight * component_mean(family, c.a, c.b);
  return s;
}

double Mixture::sample(Rng& rng) const {
  double u = uniform01(rng);
  std::size_t k = 0;
  while (k + 1 < components.size() && u >= components[k].weight) u -= components[k++].weight;
  const auto& c = components[k];
  if (family == Family::beta) return sample_beta(rng, c.a, c.b);
  return c.b * std::pow(-std::log1p(-uniform01(rng)), 1.0 / c.a);
}

void MixtureDataset::validate() const {
  if (inputs.empty()) throw DataError("mixture dataset is empty");
  if (inputs.size() != draws.size()) throw DataError("mixture dataset has mismatched inputs and draws");
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].size() != inputs.front().size()) throw DataError("mixture inputs have mixed widths");
    if (draws[i].empty()) throw DataError("point " + std::to_string(i) + " has no draws");
    for (double v : draws[i])
      if (!std::isfinite(v)) throw DataError("point " + std::to_string(i) + " has a non-finite draw");
  }
}

Mixture mixture_head(Family f, std::size_t n, const double* raw) {
  Mixture m;
  m.family = f;
  m.components.resize(n);
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < n; ++c) mx = std::max(mx, raw[c]);
  double z = 0.0;
  for (std::size_t c = 0; c < n; ++c) z += std::exp(raw[c] - mx);
  for (std::size_t c = 0; c < n; ++c) {
    m.components[c].weight = std::exp(raw[c] - mx) / z;
    m.components[c].a = softplus(raw[n + c]) + kShapeFloor;
    m.components[c].b = softplus(raw[2 * n + c]) + kShapeFloor;
  }
  return m;
}

double mixture_point_nll(Family f, std::size_t n, const double* raw, const std::vector<double>& draws, double* grad) {
  const auto m = mixture_head(f, n, raw);
  std::vector<double> logw(n), t(n), resp_sum(n, 0.0), ga(n, 0.0), gb(n, 0.0);
  std::vector<double> norm(n), dnorm_a(n), dnorm_b(n);
  for (std::size_t c = 0; c < n; ++c) logw[c] = std::log(m.components[c].weight);
  if (f == Family::beta)
    for (std::size_t c = 0; c < n; ++c) {
      const double a = m.components[c].a, b = m.components[c].b;
      norm[c] = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
      const double dab = boost::math::digamma(a + b);
      dnorm_a[c] = dab - boost::math::digamma(a);
      dnorm_b[c] = dab - boost::math::digamma(b);
    }
  double nll = 0.0;
  for (double x : draws) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n; ++c) {
      const double a = m.components[c].a, b = m.components[c].b;
      const double lp = f == Family::beta ? norm[c] + (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x)
                                          : component_log_pdf(f, a, b, x);
      t[c] = logw[c] + lp;
      mx = std::max(mx, t[c]);
    }
    double s = 0.0;
    for (std::size_t c = 0; c < n; ++c) s += std::exp(t[c] - mx);
    nll -= mx + std::log(s);
    if (!grad) continue;
    for (std::size_t c = 0; c < n; ++c) {
      const double r = std::exp(t[c] - mx) / s;
      resp_sum[c] += r;
      const double a = m.components[c].a, b = m.components[c].b;
      double da, db;
      if (f == Family::beta) {
        da = dnorm_a[c] + std::log(x);
        db = dnorm_b[c] + std::log1p(-x);
      } else {
        component_log_pdf_grad(f, a, b, x, da, db);
      }
      ga[c] += r * da;
      gb[c] += r * db;
    }
  }
  if (grad) {
    const auto k = static_cast<double>(draws.size());
    for (std::size_t c = 0; c < n; ++c) {
      grad[c] = k * m.components[c].weight - resp_sum[c];
      grad[n + c] = -ga[c] * sigmoid(raw[n + c]);
      grad[2 * n + c] = -gb[c] * sigmoid(raw[2 * n + c]);
    }
  }
  return nll;
}

Mixture MixtureModel::at(const double* xin) const {
  const auto z = x.apply(xin);
  std::vector<double> raw(net.output_size());
  net.forward(z.data(), raw.data());
  auto m = mixture_head(family, components, raw.data());
  if (family == Family::weibull)
    for (auto& c : m.components) c.b *= data_scale;
  return m;
}

MixtureDataset prepare_mixture_data(const MixtureDataset& data, Family f, double data_scale) {
  data.validate();
  if (!(data_scale > 0.0)) throw std::invalid_argument("data scale must be positive");
  if (f == Family::beta && data_scale != 1.0) throw std::invalid_argument("Beta mixtures live on [0,1]; no scaling");
  MixtureDataset out = data;
  for (std::size_t i = 0; i < out.draws.size(); ++i)
    for (auto& v : out.draws[i]) {
      if (f == Family::beta) {
        if (v < 0.0 || v > 1.0)
          throw DataError("draw " + std::to_string(v) + " at point " + std::to_string(i) + " is outside [0,1]");
        v = std::clamp(v, kBetaClip, 1.0 - kBetaClip);
      } else {
        v /= data_scale;
        if (!(v > 0.0))
          throw DataError("draw at point " + std::to_string(i) + " is not positive; Weibull support is (0, inf)");
      }
    }
  return out;
}

namespace {

// Moment-matched starting shapes for one slice of the pooled draws.
std::pair<double, double> moment_shapes(Family f, const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  const double m = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  v /= std::max(1.0, n - 1.0);
  if (f == Family::beta) {
    const double mm = std::clamp(m, 0.01, 0.99);
    double common = v > 0.0 ? mm * (1.0 - mm) / v - 1.0 : 100.0;
    common = std::clamp(common, 1.0, 1000.0);
    return {std::max(0.05, mm * common), std::max(0.05, (1.0 - mm) * common)};
  }
  const double cv = m > 0.0 && v > 0.0 ? std::sqrt(v) / m : 0.01;
  const double k = std::clamp(std::pow(cv, -1.086), 0.5, 200.0);
  return {k, m / std::tgamma(1.0 + 1.0 / k)};
}

// Boundaries of n contiguous clusters of sorted values: Lloyd iterations
// started from equal-count slices. Empty clusters keep one value.
std::vector<std::size_t> kmeans_cuts(const std::vector<double>& sorted, std::size_t n) {
  const std::size_t size = sorted.size();
  std::vector<std::size_t> cuts(n + 1);
  for (std::size_t c = 0; c <= n; ++c) cuts[c] = c * size / n;
  if (size < n) return cuts;
  std::vector<double> prefix(size + 1, 0.0);
  for (std::size_t i = 0; i < size; ++i) prefix[i + 1] = prefix[i] + sorted[i];
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<double> centers(n);
    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t lo = std::min(cuts[c], size - 1), hi = std::max(lo + 1, cuts[c + 1]);
      centers[c] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
    }
    auto next = cuts;
    for (std::size_t c = 1; c < n; ++c) {
      const double mid = 0.5 * (centers[c - 1] + centers[c]);
      next[c] = static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), mid) - sorted.begin());
      next[c] = std::clamp(next[c], next[c - 1] + 1, size - (n - c));
    }
    if (next == cuts) break;
    cuts = next;
  }
  return cuts;
}

}  // namespace

MixtureModel train_mixture(const MixtureDataset& raw_data, const std::vector<std::size_t>& rows, Family f,
                           std::size_t n, const std::vector<std::size_t>& hidden, const TrainConfig& cfg,
                           double data_scale, TrainReport* report) {
  if (n == 0) throw std::invalid_argument("mixture needs at least one component");
  if (rows.empty()) throw std::invalid_argument("no rows to train on");
  const auto data = prepare_mixture_data(raw_data, f, data_scale);
  Rng rng = make_rng(cfg.seed, {0x313ULL, rows.size(), n});
  MixtureModel m;
  m.family = f;
  m.components = n;
  m.data_scale = data_scale;
  m.x = Standardizer::fit(data.inputs, rows);

  std::vector<std::size_t> sizes{data.inputs.front().size()};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(3 * n);
  m.net = Mlp(sizes, rng);

  // Start the head near the pooled data: small output weights and biases
  // from the weights and moments of a 1-D k-means split of the sorted draws.
  const std::size_t last = m.net.layer_count() - 1;
  for (std::size_t i = 0; i < sizes[last] * sizes[last + 1]; ++i) m.net.weights(last)[i] *= 0.1;
  std::vector<double> pooled;
  for (auto i : rows) pooled.insert(pooled.end(), data.draws[i].begin(), data.draws[i].end());
  std::sort(pooled.begin(), pooled.end());
  const auto cuts = kmeans_cuts(pooled, n);
  double* bias = m.net.biases(last);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t lo = cuts[c], hi = std::max(lo + 1, cuts[c + 1]);
    std::vector<double> slice(pooled.begin() + static_cast<long>(lo),
                              pooled.begin() + static_cast<long>(std::min(hi, pooled.size())));
    const auto [a, b] = moment_shapes(f, slice);
    bias[c] = std::log(static_cast<double>(slice.size()) / static_cast<double>(pooled.size()));
    bias[n + c] = softplus_inverse(a);
    bias[2 * n + c] = softplus_inverse(b);
  }

  std::vector<std::vector<double>> z(data.inputs.size());
  for (auto i : rows) z[i] = m.x.apply(data.inputs[i].data());
  auto [tr, va] = split_indices(rows, cfg.validation_fraction, rng);
  auto loss = [&](std::size_t i, const double* out, double* g) {
    const double k = static_cast<double>(data.draws[i].size());
    const double l = mixture_point_nll(f, n, out, data.draws[i], g);
    for (std::size_t j = 0; j < 3 * n; ++j) g[j] /= k;
    return l / k;
  };
  auto rep = train(m.net, z, tr, va, loss, cfg, rng);
  if (report) *report = std::move(rep);
  return m;
}

double mixture_nll(const MixtureModel& m, const MixtureDataset& raw_data, const std::vector<std::size_t>& rows) {
  const auto data = prepare_mixture_data(raw_data, m.family, m.data_scale);
  double s = 0.0;
  std::vector<double> raw(m.net.output_size());
  for (auto i : rows) {
    const auto z = m.x.apply(data.inputs[i].data());
    m.net.forward(z.data(), raw.data());
    s += mixture_point_nll(m.family, m.components, raw.data(), data.draws[i], nullptr);
  }
  return s / static_cast<double>(rows.size());
}

MixtureFit fit_mixture(const MixtureDataset& data, Family f, std::size_t n, const std::vector<std::size_t>& hidden,
                       const TrainConfig& cfg, double data_scale) {
  data.validate();
  cfg.validate();
  Rng rng = make_rng(cfg.seed, {0x7e57ULL});
  MixtureFit fit;
  std::tie(fit.train_idx, fit.test_idx) = split_indices(data.inputs.size(), cfg.test_fraction, rng);
  if (fit.test_idx.empty() || fit.train_idx.empty()) throw DataError("dataset too small for a train/test split");
  fit.model = train_mixture(data, fit.train_idx, f, n, hidden, cfg, data_scale, &fit.report);
  fit.test_nll = mixture_nll(fit.model, data, fit.test_idx);
  return fit;
}

MixtureFit fit_unconditional(const std::vector<double>& draws, Family f, std::size_t n, const TrainConfig& cfg,
                             double data_scale) {
  MixtureDataset d;
  d.inputs.assign(draws.size(), {});
  for (double x : draws) d.draws.push_back({x});
  return fit_mixture(d, f, n, {}, cfg, data_scale);
}

}  // namespace ara::meta

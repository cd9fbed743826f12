#include "ara/meta/cross_validation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ara::meta {

std::string architecture_name(const std::vector<std::size_t>& hidden) {
  std::string s = "[";
  for (std::size_t i = 0; i < hidden.size(); ++i) s += (i ? "," : "") + std::to_string(hidden[i]);
  return s + "]";
}

std::vector<CvRow> cross_validate(std::size_t n, const std::vector<CvCandidate>& candidates, const std::string& primary,
                                  std::size_t folds, std::size_t repeats, std::uint64_t seed) {
  if (candidates.empty()) throw std::invalid_argument("no candidates to cross-validate");
  if (folds < 2) throw std::invalid_argument("cross-validation needs at least two folds");
  if (n < folds) throw std::invalid_argument("fewer points than folds");
  std::vector<std::map<std::string, std::vector<double>>> per_repeat(candidates.size());
  for (std::size_t r = 0; r < repeats; ++r) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng = make_rng(seed, {0xcf01dULL, r});
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<std::map<std::string, double>> sums(candidates.size());
    for (std::size_t f = 0; f < folds; ++f) {
      std::vector<std::size_t> train, test;
      for (std::size_t i = 0; i < n; ++i) (i * folds / n == f ? test : train).push_back(idx[i]);
      std::sort(train.begin(), train.end());
      std::sort(test.begin(), test.end());
      for (std::size_t c = 0; c < candidates.size(); ++c)
        for (const auto& [k, v] : candidates[c].evaluate(train, test, mix_seed(seed, {r, f})))
          sums[c][k] += v / static_cast<double>(folds);
    }
    for (std::size_t c = 0; c < candidates.size(); ++c)
      for (const auto& [k, v] : sums[c]) per_repeat[c][k].push_back(v);
  }
  std::vector<CvRow> rows;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    CvRow row;
    row.name = candidates[c].name;
    for (const auto& [k, vs] : per_repeat[c]) {
      const double m = std::accumulate(vs.begin(), vs.end(), 0.0) / static_cast<double>(vs.size());
      double s = 0.0;
      for (double v : vs) s += (v - m) * (v - m);
      row.mean[k] = m;
      row.stderr_[k] = vs.size() > 1 ? std::sqrt(s / static_cast<double>(vs.size() - 1) / static_cast<double>(vs.size()))
                                     : 0.0;
    }
    if (!row.mean.count(primary)) throw std::invalid_argument("candidate " + row.name + " lacks metric " + primary);
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [&](const CvRow& a, const CvRow& b) { return a.mean.at(primary) < b.mean.at(primary); });
  rows.front().best = true;
  return rows;
}

std::vector<CvRow> cross_validate_scalar(const RegressionDataset& data,
                                         const std::vector<std::vector<std::size_t>>& architectures,
                                         const TrainConfig& cfg) {
  std::vector<CvCandidate> cands;
  for (const auto& h : architectures)
    cands.push_back({architecture_name(h), [&, h](const auto& train, const auto& test, std::uint64_t seed) {
                       auto c = cfg;
                       c.seed = seed;
                       const auto m = train_scalar(data, train, h, c);
                       const auto s = evaluate_scalar(m, data, test);
                       return FoldMetrics{{"MAE", s.mae}, {"RMSE", s.rmse}};
                     }});
  return cross_validate(data.inputs.size(), cands, "MAE", cfg.folds, cfg.repeats, cfg.seed);
}

std::vector<CvRow> cross_validate_mixture(const MixtureDataset& data, Family f,
                                          const std::vector<MixtureArchitecture>& architectures,
                                          const TrainConfig& cfg, double data_scale) {
  std::vector<CvCandidate> cands;
  for (const auto& a : architectures)
    cands.push_back({architecture_name(a.hidden) + ";" + std::to_string(a.components),
                     [&, a](const auto& train, const auto& test, std::uint64_t seed) {
                       auto c = cfg;
                       c.seed = seed;
                       const auto m = train_mixture(data, train, f, a.components, a.hidden, c, data_scale);
                       return FoldMetrics{{"NLL", mixture_nll(m, data, test)}};
                     }});
  return cross_validate(data.inputs.size(), cands, "NLL", cfg.folds, cfg.repeats, cfg.seed);
}

}  // namespace ara::meta

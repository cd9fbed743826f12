#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ara/meta/mixture.hpp"
#include "ara/meta/regressor.hpp"

namespace ara::meta {

// Metrics of one fold; the first metric named in cross_validate's
// `primary` argument ranks candidates (smaller is better).
using FoldMetrics = std::map<std::string, double>;

struct CvCandidate {
  std::string name;
  std::function<FoldMetrics(const std::vector<std::size_t>& train, const std::vector<std::size_t>& test,
                            std::uint64_t seed)>
      evaluate;
};

struct CvRow {
  std::string name;
  std::map<std::string, double> mean;
  std::map<std::string, double> stderr_;  // across repeats
  bool best = false;
};

// `folds`-fold cross-validation repeated `repeats` times over 0..n-1. Each
// repeat's metric is the fold average; rows are sorted by the primary mean.
std::vector<CvRow> cross_validate(std::size_t n, const std::vector<CvCandidate>& candidates, const std::string& primary,
                                  std::size_t folds, std::size_t repeats, std::uint64_t seed);

std::vector<CvRow> cross_validate_scalar(const RegressionDataset& data,
                                         const std::vector<std::vector<std::size_t>>& architectures,
                                         const TrainConfig& cfg);

struct MixtureArchitecture {
  std::vector<std::size_t> hidden;
  std::size_t components = 2;
};

std::vector<CvRow> cross_validate_mixture(const MixtureDataset& data, Family f,
                                          const std::vector<MixtureArchitecture>& architectures,
                                          const TrainConfig& cfg, double data_scale = 1.0);

std::string architecture_name(const std::vector<std::size_t>& hidden);

}  // namespace ara::meta

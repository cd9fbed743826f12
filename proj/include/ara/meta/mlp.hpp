#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "ara/core/random.hpp"

namespace ara::meta {

// Fully connected network: ReLU hidden layers, identity output. All
// weights and biases live in one flat parameter vector.
class Mlp {
 public:
  Mlp() = default;
  // sizes = {inputs, hidden..., outputs}; He-normal weights, zero biases.
  Mlp(std::vector<std::size_t> sizes, Rng& rng);

  std::size_t input_size() const { return sizes_.front(); }
  std::size_t output_size() const { return sizes_.back(); }
  std::size_t layer_count() const { return sizes_.size() - 1; }
  const std::vector<std::size_t>& sizes() const { return sizes_; }
  std::vector<double>& parameters() { return theta_; }
  const std::vector<double>& parameters() const { return theta_; }
  void set_parameters(std::vector<double> theta);

  double* weights(std::size_t layer) { return theta_.data() + w_off_[layer]; }
  double* biases(std::size_t layer) { return theta_.data() + b_off_[layer]; }

  void forward(const double* x, double* out) const;

  // Post-activation values of every layer for one example.
  struct Tape {
    std::vector<std::vector<double>> acts;
  };
  void forward(const double* x, double* out, Tape& tape) const;
  // Adds d loss / d theta to grad given d loss / d output.
  void backward(const Tape& tape, const double* grad_out, double* grad) const;

 private:
  void index_layers();

  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> w_off_, b_off_;
  std::vector<double> theta_;
};

struct Adam {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::vector<double> m, v;
  std::size_t t = 0;

  void step(std::vector<double>& theta, const std::vector<double>& grad);
};

struct TrainConfig {
  std::size_t max_epochs = 2000;
  double learning_rate = 1e-3;
  std::size_t batch_size = 128;
  std::size_t patience = 20;
  double validation_fraction = 0.1;  // of the training part, for early stopping
  double test_fraction = 0.2;
  std::size_t folds = 5;
  std::size_t repeats = 10;
  std::uint64_t seed = 1;

  void validate() const;  // throws std::invalid_argument
};

// Loss of one example given the network output; writes d loss / d output.
using ExampleLoss = std::function<double(std::size_t example, const double* out, double* grad_out)>;

struct TrainReport {
  std::size_t epochs = 0;
  std::size_t best_epoch = 0;
  double best_validation = 0.0;
  std::vector<double> train_history;
  std::vector<double> validation_history;
};

// Minibatch Adam on the mean example loss, early stopping on the validation
// examples (the training examples themselves when none are given). The
// best parameters seen are restored. A non-finite loss raises TrainingError.
TrainReport train(Mlp& net, const std::vector<std::vector<double>>& inputs, const std::vector<std::size_t>& train_idx,
                  const std::vector<std::size_t>& validation_idx, const ExampleLoss& loss, const TrainConfig& cfg,
                  Rng& rng);

// Shuffled split of 0..n-1 into (first, second) with `fraction` in second.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n, double fraction, Rng& rng);
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(const std::vector<std::size_t>& idx,
                                                                            double fraction, Rng& rng);

// Column-wise mean and standard deviation (1 when a column is constant).
struct Standardizer {
  std::vector<double> mean, scale;
  static Standardizer fit(const std::vector<std::vector<double>>& rows, const std::vector<std::size_t>& idx);
  std::vector<double> apply(const double* x) const;
};

}  // namespace ara::meta

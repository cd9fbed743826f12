#include "ara/meta/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ara/core/errors.hpp"

namespace ara::meta {

Mlp::Mlp(std::vector<std::size_t> sizes, Rng& rng) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("network needs input and output sizes");
  if (sizes_.back() == 0) throw std::invalid_argument("network needs at least one output");
  index_layers();
  for (std::size_t l = 0; l < layer_count(); ++l) {
    const double sd = sizes_[l] > 0 ? std::sqrt(2.0 / static_cast<double>(sizes_[l])) : 0.0;
    double* w = weights(l);
    for (std::size_t i = 0; i < sizes_[l] * sizes_[l + 1]; ++i) w[i] = sd * standard_normal(rng);
  }
}

void Mlp::index_layers() {
  w_off_.clear();
  b_off_.clear();
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    w_off_.push_back(off);
    off += sizes_[l] * sizes_[l + 1];
    b_off_.push_back(off);
    off += sizes_[l + 1];
  }
  theta_.assign(off, 0.0);
}

void Mlp::set_parameters(std::vector<double> theta) {
  if (theta.size() != theta_.size()) throw std::invalid_argument("parameter vector has the wrong length");
  theta_ = std::move(theta);
}

namespace {

void affine(const double* w, const double* b, const double* x, std::size_t in, std::size_t out, double* y) {
  for (std::size_t o = 0; o < out; ++o) {
    const double* row = w + o * in;
    double s = b[o];
    for (std::size_t i = 0; i < in; ++i) s += row[i] * x[i];
    y[o] = s;
  }
}

}  // namespace

void Mlp::forward(const double* x, double* out) const {
  std::vector<double> a(x, x + sizes_[0]), next;
  for (std::size_t l = 0; l < layer_count(); ++l) {
    next.resize(sizes_[l + 1]);
    affine(theta_.data() + w_off_[l], theta_.data() + b_off_[l], a.data(), sizes_[l], sizes_[l + 1], next.data());
    if (l + 1 < layer_count())
      for (auto& v : next) v = std::max(0.0, v);
    a.swap(next);
  }
  std::copy(a.begin(), a.end(), out);
}

void Mlp::forward(const double* x, double* out, Tape& tape) const {
  tape.acts.resize(sizes_.size());
  tape.acts[0].assign(x, x + sizes_[0]);
  for (std::size_t l = 0; l < layer_count(); ++l) {
    auto& y = tape.acts[l + 1];
    y.resize(sizes_[l + 1]);
    affine(theta_.data() + w_off_[l], theta_.data() + b_off_[l], tape.acts[l].data(), sizes_[l], sizes_[l + 1],
           y.data());
    if (l + 1 < layer_count())
      for (auto& v : y) v = std::max(0.0, v);
  }
  std::copy(tape.acts.back().begin(), tape.acts.back().end(), out);
}

void Mlp::backward(const Tape& tape, const double* grad_out, double* grad) const {
  std::vector<double> delta(grad_out, grad_out + output_size()), prev;
  for (std::size_t l = layer_count(); l-- > 0;) {
    const std::size_t in = sizes_[l], out = sizes_[l + 1];
    const auto& x = tape.acts[l];
    double* gw = grad + w_off_[l];
    double* gb = grad + b_off_[l];
    for (std::size_t o = 0; o < out; ++o) {
      gb[o] += delta[o];
      if (delta[o] == 0.0) continue;
      double* row = gw + o * in;
      for (std::size_t i = 0; i < in; ++i) row[i] += delta[o] * x[i];
    }
    if (l == 0) break;
    prev.assign(in, 0.0);
    const double* w = theta_.data() + w_off_[l];
    for (std::size_t o = 0; o < out; ++o) {
      if (delta[o] == 0.0) continue;
      const double* row = w + o * in;
      for (std::size_t i = 0; i < in; ++i) prev[i] += delta[o] * row[i];
    }
    for (std::size_t i = 0; i < in; ++i)
      if (x[i] <= 0.0) prev[i] = 0.0;  // ReLU
    delta.swap(prev);
  }
}

void Adam::step(std::vector<double>& theta, const std::vector<double>& grad) {
  if (m.size() != theta.size()) {
    m.assign(theta.size(), 0.0);
    v.assign(theta.size(), 0.0);
    t = 0;
  }
  ++t;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < theta.size(); ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
    theta[i] -= learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
  }
}

void TrainConfig::validate() const {
  if (max_epochs == 0) throw std::invalid_argument("max_epochs must be positive");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
    throw std::invalid_argument("validation fraction must lie in [0,1)");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw std::invalid_argument("test fraction must lie in (0,1)");
  if (folds < 2) throw std::invalid_argument("cross-validation needs at least two folds");
  if (repeats == 0) throw std::invalid_argument("cross-validation needs at least one repeat");
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(const std::vector<std::size_t>& idx,
                                                                            double fraction, Rng& rng) {
  auto shuffled = idx;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(idx.size())));
  std::vector<std::size_t> second(shuffled.begin(), shuffled.begin() + static_cast<long>(k));
  std::vector<std::size_t> first(shuffled.begin() + static_cast<long>(k), shuffled.end());
  std::sort(first.begin(), first.end());
  std::sort(second.begin(), second.end());
  return {first, second};
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n, double fraction, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  return split_indices(idx, fraction, rng);
}

Standardizer Standardizer::fit(const std::vector<std::vector<double>>& rows, const std::vector<std::size_t>& idx) {
  Standardizer s;
  if (rows.empty() || idx.empty()) return s;
  const std::size_t d = rows[idx.front()].size();
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 0.0);
  for (auto i : idx)
    for (std::size_t k = 0; k < d; ++k) s.mean[k] += rows[i][k];
  for (auto& m : s.mean) m /= static_cast<double>(idx.size());
  for (auto i : idx)
    for (std::size_t k = 0; k < d; ++k) s.scale[k] += (rows[i][k] - s.mean[k]) * (rows[i][k] - s.mean[k]);
  for (auto& v : s.scale) {
    v = std::sqrt(v / static_cast<double>(idx.size()));
    if (!(v > 1e-12)) v = 1.0;
  }
  return s;
}

std::vector<double> Standardizer::apply(const double* x) const {
  std::vector<double> z(mean.size());
  for (std::size_t k = 0; k < mean.size(); ++k) z[k] = (x[k] - mean[k]) / scale[k];
  return z;
}

TrainReport train(Mlp& net, const std::vector<std::vector<double>>& inputs, const std::vector<std::size_t>& train_idx,
                  const std::vector<std::size_t>& validation_idx, const ExampleLoss& loss, const TrainConfig& cfg,
                  Rng& rng) {
  cfg.validate();
  if (train_idx.empty()) throw std::invalid_argument("no training examples");
  const auto& val = validation_idx.empty() ? train_idx : validation_idx;
  Adam opt;
  opt.learning_rate = cfg.learning_rate;
  std::vector<double> grad(net.parameters().size());
  std::vector<double> out(net.output_size()), gout(net.output_size());
  Mlp::Tape tape;

  auto evaluate = [&](const std::vector<std::size_t>& idx) {
    double s = 0.0;
    for (auto i : idx) {
      net.forward(inputs[i].data(), out.data());
      s += loss(i, out.data(), gout.data());
    }
    return s / static_cast<double>(idx.size());
  };

  TrainReport rep;
  rep.best_validation = evaluate(val);
  if (!std::isfinite(rep.best_validation))
    throw TrainingError("initial validation loss is not finite (" + std::to_string(rep.best_validation) + ")");
  auto best = net.parameters();
  std::size_t since_best = 0;
  auto order = train_idx;
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      double batch_loss = 0.0;
      for (std::size_t b = start; b < end; ++b) {
        net.forward(inputs[order[b]].data(), out.data(), tape);
        batch_loss += loss(order[b], out.data(), gout.data());
        net.backward(tape, gout.data(), grad.data());
      }
      if (!std::isfinite(batch_loss))
        throw TrainingError("training loss diverged at epoch " + std::to_string(epoch) + " (batch loss " +
                            std::to_string(batch_loss) + ", learning rate " + std::to_string(cfg.learning_rate) + ")");
      const double inv = 1.0 / static_cast<double>(end - start);
      for (auto& g : grad) g *= inv;
      opt.step(net.parameters(), grad);
      epoch_loss += batch_loss;
    }
    rep.train_history.push_back(epoch_loss / static_cast<double>(order.size()));
    const double v = evaluate(val);
    rep.validation_history.push_back(v);
    rep.epochs = epoch;
    if (!std::isfinite(v))
      throw TrainingError("validation loss diverged at epoch " + std::to_string(epoch) + " (" + std::to_string(v) + ")");
    if (v < rep.best_validation) {
      rep.best_validation = v;
      rep.best_epoch = epoch;
      best = net.parameters();
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  net.set_parameters(std::move(best));
  return rep;
}

}  // namespace ara::meta

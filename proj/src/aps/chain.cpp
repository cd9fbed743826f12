#include "ara/aps/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ara/aps/mode.hpp"
#include "ara/core/errors.hpp"

namespace ara::aps {

ChainSettings ChainSettings::with_iterations(std::size_t n, int h) {
  ChainSettings s;
  s.iterations = n;
  s.burn_in = n / 5;
  s.augmentation = h;
  return s;
}

void ChainSettings::validate() const {
  if (iterations == 0) throw std::invalid_argument("chain needs at least one iteration");
  if (burn_in >= iterations) throw std::invalid_argument("burn-in must be smaller than the iteration count");
  if (augmentation < 1) throw std::invalid_argument("augmentation h must be >= 1");
  if (!(proposal_scale > 0.0)) throw std::invalid_argument("proposal scale must be positive");
}

bool mh_accept(Values proposed, Values current, double proposal_ratio, Rng& rng) {
  if (proposed.size() != current.size()) throw std::invalid_argument("utility lists differ in length");
  if (!(proposal_ratio > 0.0)) throw std::invalid_argument("proposal ratio must be positive");
  double log_ratio = std::log(proposal_ratio);
  for (std::size_t t = 0; t < proposed.size(); ++t) {
    if (!(proposed[t] > 0.0) || !(current[t] > 0.0))
      throw PositivityError("augmented-probability simulation needs strictly positive utilities");
    log_ratio += std::log(proposed[t]) - std::log(current[t]);
  }
  if (log_ratio >= 0.0) return true;
  return std::log(uniform01(rng)) < log_ratio;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

class CopySampler {
 public:
  CopySampler(const Problem& p, std::vector<double> assignment) : p_(p), scratch_(std::move(assignment)) {
    std::size_t width = p.utility_parents.size();
    for (const auto& f : p.sampled) width = std::max(width, f.parents.size());
    for (const auto& f : p.likelihood) width = std::max(width, f.parents.size());
    buf_.resize(width);
  }

  // Draws one copy with the decision fixed at d; returns the log weight
  // (log utility plus log likelihoods) and stores the utility.
  double draw(double d, Rng& rng, double& utility) {
    scratch_[p_.decision_slot] = d;
    for (const auto& f : p_.sampled) scratch_[f.slot] = f.factor.sample(gather(f.parents), rng);
    utility = p_.utility(gather(p_.utility_parents));
    if (!(utility > 0.0) || !std::isfinite(utility))
      throw PositivityError("utility " + std::to_string(utility) + " is not strictly positive");
    double lw = std::log(utility);
    for (const auto& f : p_.likelihood) {
      const double l = f.factor.density(scratch_[f.slot], gather(f.parents));
      lw += l > 0.0 ? std::log(l) : kNegInf;
    }
    return lw;
  }

  const std::vector<double>& scratch() const { return scratch_; }

 private:
  Values gather(const std::vector<std::size_t>& slots) {
    for (std::size_t i = 0; i < slots.size(); ++i) buf_[i] = scratch_[slots[i]];
    return Values(buf_.data(), slots.size());
  }

  const Problem& p_;
  std::vector<double> scratch_;
  std::vector<double> buf_;
};

double propose(double d, const baid::Domain& dom, double scale, Rng& rng) {
  if (dom.is_discrete()) {
    const auto n = dom.size();
    return dom.value(static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)));
  }
  const double w = dom.width();
  const double x = d + scale * w * standard_normal(rng);
  double y = std::fmod(x - dom.lo(), 2.0 * w);
  if (y < 0.0) y += 2.0 * w;
  if (y > w) y = 2.0 * w - y;
  return dom.lo() + y;
}

double initial_decision(const baid::Domain& dom, Rng& rng) {
  if (dom.is_discrete()) return dom.value(static_cast<std::size_t>(uniform01(rng) * static_cast<double>(dom.size())));
  return uniform(rng, dom.lo(), dom.hi());
}

}  // namespace

ChainResult run_chain(const Problem& problem, std::vector<double> assignment, const ChainSettings& settings, Rng& rng,
                      bool record_states) {
  settings.validate();
  if (assignment.size() != problem.slot_count) throw std::invalid_argument("assignment has the wrong slot count");
  const auto h = static_cast<std::size_t>(settings.augmentation);
  CopySampler sampler(problem, std::move(assignment));

  std::vector<double> cur_u(h), new_u(h);
  std::vector<double> cur_copy0, new_copy0;
  double cur_lw = kNegInf;
  double d = 0.0;

  auto draw_all = [&](double dd, std::vector<double>& us, std::vector<double>& copy0) {
    double total = 0.0;
    for (std::size_t t = 0; t < h; ++t) {
      total += sampler.draw(dd, rng, us[t]);
      if (t == 0 && record_states) copy0 = sampler.scratch();
    }
    return total;
  };

  for (int attempt = 0; attempt < 1000 && cur_lw == kNegInf; ++attempt) {
    d = initial_decision(problem.decision_domain, rng);
    cur_lw = draw_all(d, cur_u, cur_copy0);
  }
  if (cur_lw == kNegInf) throw std::runtime_error("could not find a starting state with positive weight");

  ChainResult res;
  res.decisions.reserve(settings.iterations - settings.burn_in);
  std::size_t accepted = 0;
  for (std::size_t i = 0; i < settings.iterations; ++i) {
    const double cand = propose(d, problem.decision_domain, settings.proposal_scale, rng);
    const double new_lw = draw_all(cand, new_u, new_copy0);
    const double log_ratio = new_lw - cur_lw;
    if (log_ratio >= 0.0 || std::log(uniform01(rng)) < log_ratio) {
      d = cand;
      cur_lw = new_lw;
      std::swap(cur_u, new_u);
      std::swap(cur_copy0, new_copy0);
      ++accepted;
    }
    if (i >= settings.burn_in) {
      res.decisions.push_back(d);
      if (record_states) res.states.push_back({cur_copy0, cur_u});
    }
  }
  res.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(settings.iterations);
  res.mode = estimate_mode(res.decisions, problem.decision_domain);
  const double z = geweke_z(res.decisions);
  if (!(std::abs(z) <= 3.0))
    res.warning = "convergence check failed (Geweke z = " + std::to_string(z) + ")";
  return res;
}

ValueEstimate estimate_value(const Problem& problem, std::vector<double> assignment, std::size_t draws, Rng& rng) {
  if (draws == 0) throw std::invalid_argument("value estimate needs draws");
  const double d = assignment.at(problem.decision_slot);
  CopySampler sampler(problem, std::move(assignment));
  ValueEstimate v;
  v.node_means.assign(problem.sampled.size(), 0.0);
  double wsum = 0.0, usum = 0.0;
  const bool weighted = !problem.likelihood.empty();
  for (std::size_t i = 0; i < draws; ++i) {
    double u = 0.0;
    const double lw = sampler.draw(d, rng, u);
    const double w = weighted ? std::exp(lw - std::log(u)) : 1.0;
    wsum += w;
    usum += w * u;
    for (std::size_t k = 0; k < problem.sampled.size(); ++k)
      v.node_means[k] += w * sampler.scratch()[problem.sampled[k].slot];
  }
  if (!(wsum > 0.0)) throw std::runtime_error("all value-estimate draws have zero likelihood");
  v.value = usum / wsum;
  for (auto& m : v.node_means) m /= wsum;
  return v;
}

namespace {

// Mean and batch-means variance of the mean.
std::pair<double, double> batch_stats(const double* x, std::size_t n) {
  const double mean = std::accumulate(x, x + n, 0.0) / static_cast<double>(n);
  const std::size_t b = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(n))));
  const std::size_t nb = n / b;
  if (nb < 2) return {mean, 0.0};
  double s = 0.0;
  for (std::size_t k = 0; k < nb; ++k) {
    const double m = std::accumulate(x + k * b, x + (k + 1) * b, 0.0) / static_cast<double>(b);
    s += (m - mean) * (m - mean);
  }
  return {mean, s / static_cast<double>(nb - 1) / static_cast<double>(nb)};
}

}  // namespace

double geweke_z(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 20) return 0.0;
  const std::size_t na = n / 10;
  const std::size_t nb = n / 2;
  const auto [ma, va] = batch_stats(x.data(), na);
  const auto [mb, vb] = batch_stats(x.data() + (n - nb), nb);
  const double v = va + vb;
  if (v <= 0.0) return ma == mb ? 0.0 : std::numeric_limits<double>::infinity();
  return (ma - mb) / std::sqrt(v);
}

}  // namespace ara::aps

#include "ara/meta/bindings.hpp"

#include <algorithm>

namespace ara::meta {

aps::ValueFunction value_function(std::shared_ptr<const ScalarRegressor> m, std::vector<std::string> parents) {
  aps::ValueFunction f;
  f.parents = std::move(parents);
  f.eval = [m](aps::Values x) { return m->predict(x.data()); };
  return f;
}

namespace {

aps::Factor unit_factor(std::function<Mixture(aps::Values)> at, const baid::Domain& dom) {
  aps::Factor f;
  const double lo = dom.lo(), w = dom.width();
  f.sample = [at, lo, w](aps::Values x, Rng& rng) { return lo + w * at(x).sample(rng); };
  f.density = [at, lo, w](double v, aps::Values x) { return at(x).pdf((v - lo) / w) / w; };
  return f;
}

}  // namespace

aps::Forecast forecast(std::shared_ptr<const MixtureModel> m, std::vector<std::string> parents, baid::Domain domain) {
  if (m->family != Family::beta || !domain.is_interval())
    throw std::invalid_argument("decision forecasts use Beta mixtures on interval domains");
  aps::Forecast f;
  f.parents = std::move(parents);
  f.factor = unit_factor([m](aps::Values x) { return m->at(x.data()); }, domain);
  return f;
}

aps::Forecast forecast(Mixture m, baid::Domain domain) {
  if (m.family != Family::beta || !domain.is_interval())
    throw std::invalid_argument("decision forecasts use Beta mixtures on interval domains");
  aps::Forecast f;
  auto shared = std::make_shared<const Mixture>(std::move(m));
  f.factor = unit_factor([shared](aps::Values) { return *shared; }, domain);
  return f;
}

aps::RandomValueFunction random_value(std::shared_ptr<const MixtureModel> m, std::vector<std::string> parents,
                                      GridSpec table) {
  if (table.dims.size() != parents.size()) throw std::invalid_argument("quantile table does not match the arguments");
  struct State {
    GridSpec grid;
    std::vector<Mixture> at_points;
  };
  auto st = std::make_shared<State>();
  st->grid = std::move(table);
  for (const auto& p : make_grid(st->grid)) st->at_points.push_back(m->at(p));
  aps::RandomValueFunction f;
  f.parents = std::move(parents);
  f.realize = [st](const aps::AttackerDraw& w) -> aps::UtilityFn {
    const double q = std::clamp(w.value_quantile, 1e-6, 1.0 - 1e-6);
    auto values = std::make_shared<std::vector<double>>();
    values->reserve(st->at_points.size());
    for (const auto& mix : st->at_points) values->push_back(mix.quantile(q));
    return [st, values](aps::Values x) {
      double s = 0.0;
      for (auto [i, wt] : interpolation_stencil(st->grid, x.data())) s += wt * (*values)[i];
      return s;
    };
  };
  return f;
}

}  // namespace ara::meta

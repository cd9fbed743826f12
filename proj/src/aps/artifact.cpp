#include "ara/aps/artifact.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>

#include "ara/baid/io.hpp"
#include "ara/core/errors.hpp"
#include "ara/core/table.hpp"

namespace ara::aps {

namespace {

std::size_t nearest_point(const GridSpec& g, Values x) {
  std::size_t flat = 0;
  for (std::size_t k = 0; k < g.dims.size(); ++k) {
    const auto& d = g.dims[k];
    const auto n = d.count();
    std::size_t i = 0;
    if (d.is_range()) {
      const double u = std::clamp((x[k] - d.lo) / d.step, 0.0, static_cast<double>(n - 1));
      i = static_cast<std::size_t>(std::llround(u));
    } else {
      double best = INFINITY;
      for (std::size_t j = 0; j < n; ++j)
        if (std::abs(d.explicit_values[j] - x[k]) < best) {
          best = std::abs(d.explicit_values[j] - x[k]);
          i = j;
        }
    }
    flat = flat * n + i;
  }
  return flat;
}

double interpolate(const GridSpec& g, Values x, const std::function<double(std::size_t)>& at) {
  double s = 0.0;
  for (auto [i, w] : interpolation_stencil(g, x.data())) s += w * at(i);
  return s;
}

}  // namespace

double lookup_optimal(const PolicyArtifact& a, Values x) {
  return interpolate(a.grid, x, [&](std::size_t i) { return a.optimal[i]; });
}

ValueFunction lookup_value_function(const PolicyArtifact& a) {
  auto shared = std::make_shared<PolicyArtifact>(a);
  ValueFunction f;
  f.parents = a.conditioning;
  f.eval = [shared](Values x) { return interpolate(shared->grid, x, [&](std::size_t i) { return shared->values[i][0]; }); };
  return f;
}

Forecast lookup_forecast(const PolicyArtifact& a) {
  auto shared = std::make_shared<PolicyArtifact>(a);
  Forecast f;
  f.parents = a.conditioning;
  f.factor.sample = [shared](Values x, Rng& rng) {
    const auto& row = shared->draws[nearest_point(shared->grid, x)];
    return row[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(row.size()))];
  };
  f.factor.density = [shared](double v, Values x) {
    const auto& row = shared->draws[nearest_point(shared->grid, x)];
    const auto c = std::count_if(row.begin(), row.end(), [&](double r) { return std::abs(r - v) <= 1e-12; });
    return static_cast<double>(c) / static_cast<double>(row.size());
  };
  return f;
}

RandomValueFunction lookup_random_value(const PolicyArtifact& a) {
  auto shared = std::make_shared<PolicyArtifact>(a);
  RandomValueFunction f;
  f.parents = a.conditioning;
  f.realize = [shared](const AttackerDraw& w) -> UtilityFn {
    const auto k = static_cast<std::size_t>(w.index % shared->draws_per_point());
    return [shared, k](Values x) { return interpolate(shared->grid, x, [&](std::size_t i) { return shared->values[i][k]; }); };
  };
  return f;
}

BetaShape recenter_beta(double d_star, double concentration, double delta) {
  const double m = std::clamp(d_star, delta, 1.0 - delta);
  return {concentration * m, concentration * (1.0 - m)};
}

Factor recenter_attacker_beliefs(const PolicyArtifact& policy, double concentration, double delta) {
  if (!policy.is_daps()) throw std::invalid_argument("recentering needs a Defender policy");
  if (!policy.decision_domain.is_interval()) throw std::invalid_argument("recentering needs an interval decision domain");
  auto shared = std::make_shared<PolicyArtifact>(policy);
  Factor f;
  f.sample = [shared, concentration, delta](Values x, Rng& rng) {
    const auto& dom = shared->decision_domain;
    const auto b = recenter_beta((lookup_optimal(*shared, x) - dom.lo()) / dom.width(), concentration, delta);
    return dom.lo() + dom.width() * sample_beta(rng, b.alpha, b.beta);
  };
  f.density = [shared, concentration, delta](double v, Values x) {
    const auto& dom = shared->decision_domain;
    const auto b = recenter_beta((lookup_optimal(*shared, x) - dom.lo()) / dom.width(), concentration, delta);
    const double u = (v - dom.lo()) / dom.width();
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double lb = std::lgamma(b.alpha + b.beta) - std::lgamma(b.alpha) - std::lgamma(b.beta);
    return std::exp(lb + (b.alpha - 1.0) * std::log(u) + (b.beta - 1.0) * std::log1p(-u)) / dom.width();
  };
  return f;
}

namespace {

nlohmann::json grid_to_json(const GridSpec& g) {
  auto dims = nlohmann::json::array();
  for (const auto& d : g.dims) {
    if (d.is_range())
      dims.push_back({{"lo", d.lo}, {"hi", d.hi}, {"step", d.step}});
    else
      dims.push_back({{"values", d.explicit_values}});
  }
  return dims;
}

GridSpec grid_from_json(const nlohmann::json& j) {
  GridSpec g;
  for (const auto& d : j) {
    if (d.contains("values"))
      g.dims.push_back(GridDim::list(d["values"].get<std::vector<double>>()));
    else
      g.dims.push_back(GridDim::range(d["lo"].get<double>(), d["hi"].get<double>(), d["step"].get<double>()));
  }
  return g;
}

std::filesystem::path sidecar(const std::filesystem::path& csv) {
  auto p = csv;
  p.replace_extension(".json");
  return p;
}

}  // namespace

void save_artifact(const std::filesystem::path& csv, const PolicyArtifact& a) {
  Table t;
  t.columns = a.conditioning;
  if (a.is_daps()) {
    t.columns.push_back(a.decision);
    t.columns.push_back("value");
    for (const auto& e : a.expectation_nodes) t.columns.push_back("E_" + e);
    for (std::size_t p = 0; p < a.points.size(); ++p) {
      auto row = a.points[p];
      row.push_back(a.optimal[p]);
      row.push_back(a.values[p][0]);
      if (!a.expectations.empty()) row.insert(row.end(), a.expectations[p].begin(), a.expectations[p].end());
      t.rows.push_back(std::move(row));
    }
  } else {
    t.columns.push_back("draw");
    t.columns.push_back(a.decision);
    t.columns.push_back("value");
    for (std::size_t p = 0; p < a.points.size(); ++p)
      for (std::size_t k = 0; k < a.draws[p].size(); ++k) {
        auto row = a.points[p];
        row.push_back(static_cast<double>(k));
        row.push_back(a.draws[p][k]);
        row.push_back(a.values[p][k]);
        t.rows.push_back(std::move(row));
      }
  }
  write_csv(csv, t);

  nlohmann::json j{{"decision", a.decision},
                   {"agent", baid::to_string(a.agent)},
                   {"domain", baid::to_json(a.decision_domain)},
                   {"conditioning", a.conditioning},
                   {"grid", grid_to_json(a.grid)},
                   {"expectation_nodes", a.expectation_nodes},
                   {"representation", a.representation == Representation::lookup_grid ? "lookup_grid" : "fitted_model"},
                   {"model_ref", a.model_ref},
                   {"convergence_warnings", a.convergence_warnings},
                   {"draws_per_point", a.draws_per_point()},
                   {"settings", a.settings},
                   {"trace", a.trace}};
  std::ofstream out(sidecar(csv));
  out << j.dump(2) << '\n';
}

PolicyArtifact load_artifact(const std::filesystem::path& csv) {
  std::ifstream in(sidecar(csv));
  if (!in) throw DataError("missing sidecar for " + csv.string());
  nlohmann::json j;
  in >> j;
  PolicyArtifact a;
  a.decision = j["decision"];
  a.agent = baid::agent_from_string(j["agent"]);
  a.decision_domain = baid::domain_from_json(j["domain"]);
  a.conditioning = j["conditioning"].get<std::vector<std::string>>();
  a.grid = grid_from_json(j["grid"]);
  a.points = make_grid(a.grid);
  a.expectation_nodes = j["expectation_nodes"].get<std::vector<std::string>>();
  a.representation = j["representation"] == "lookup_grid" ? Representation::lookup_grid : Representation::fitted_model;
  a.model_ref = j["model_ref"];
  a.convergence_warnings = j["convergence_warnings"];
  a.settings = j["settings"];
  a.trace = j["trace"].get<std::vector<double>>();

  const auto t = read_csv(csv);
  const std::size_t c = a.conditioning.size();
  if (a.is_daps()) {
    if (t.rows.size() != a.points.size()) throw DataError(csv.string() + ": row count does not match the grid");
    for (const auto& r : t.rows) {
      a.optimal.push_back(r[c]);
      a.values.push_back({r[c + 1]});
      if (!a.expectation_nodes.empty()) a.expectations.emplace_back(r.begin() + static_cast<long>(c + 2), r.end());
    }
  } else {
    const std::size_t k = j["draws_per_point"];
    if (t.rows.size() != a.points.size() * k) throw DataError(csv.string() + ": row count does not match grid x draws");
    a.draws.assign(a.points.size(), {});
    a.values.assign(a.points.size(), {});
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      a.draws[i / k].push_back(t.rows[i][c + 1]);
      a.values[i / k].push_back(t.rows[i][c + 2]);
    }
  }
  return a;
}

}  // namespace ara::aps

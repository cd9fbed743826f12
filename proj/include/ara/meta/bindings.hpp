#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ara/aps/model.hpp"
#include "ara/baid/domain.hpp"
#include "ara/core/grid.hpp"
#include "ara/meta/mixture.hpp"
#include "ara/meta/regressor.hpp"

namespace ara::meta {

// Fitted metamodels exposed to the solver as carried-back beliefs.
aps::ValueFunction value_function(std::shared_ptr<const ScalarRegressor> m, std::vector<std::string> parents);

// Samples are mapped from the unit interval onto the decision domain.
aps::Forecast forecast(std::shared_ptr<const MixtureModel> m, std::vector<std::string> parents, baid::Domain domain);
aps::Forecast forecast(Mixture m, baid::Domain domain);

// Ψ_A realized per ω by its value_quantile (a comonotone realization). The
// quantile is solved exactly on `table` and interpolated in between.
aps::RandomValueFunction random_value(std::shared_ptr<const MixtureModel> m, std::vector<std::string> parents,
                                      GridSpec table);

}  // namespace ara::meta

#pragma once

#include <filesystem>

#include <json.hpp>

#include "ara/meta/mixture.hpp"
#include "ara/meta/regressor.hpp"

namespace ara::meta {

// Weights are stored as base64 of little-endian doubles, so a reload
// reproduces predictions bit for bit.
nlohmann::json to_json(const Mlp& net);
Mlp mlp_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ScalarRegressor& m);
ScalarRegressor regressor_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MixtureModel& m);
MixtureModel mixture_model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Mixture& m);
Mixture mixture_from_json(const nlohmann::json& j);

void save_json(const std::filesystem::path& p, const nlohmann::json& j);
nlohmann::json load_json(const std::filesystem::path& p);

}  // namespace ara::meta

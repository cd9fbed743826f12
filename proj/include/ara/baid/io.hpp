#pragma once

#include <filesystem>

#include <json.hpp>

#include "ara/baid/baid.hpp"

namespace ara::baid {

nlohmann::json to_json(const Domain& d);
Domain domain_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Baid& b);
Baid baid_from_json(const nlohmann::json& j);

Baid load_baid(const std::filesystem::path& path);
void save_baid(const std::filesystem::path& path, const Baid& b);

Agent agent_from_string(const std::string& s);

}  // namespace ara::baid

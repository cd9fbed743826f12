#pragma once

#include <filesystem>
#include <string>

namespace ara::test {

inline std::filesystem::path repo_path(const std::string& rel) { return std::filesystem::path(ARA_SOURCE_DIR) / rel; }

}  // namespace ara::test

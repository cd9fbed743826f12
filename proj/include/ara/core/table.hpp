#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ara {

// Numeric CSV table with a header row. Values are written with 17
// significant digits so a read-back is exact.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;  // throws DataError
  std::vector<double> column_values(const std::string& name) const;
};

void write_csv(const std::filesystem::path& path, const Table& table);
Table read_csv(const std::filesystem::path& path);

// sha256 of a file's bytes, lowercase hex.
std::string file_digest(const std::filesystem::path& path);
std::string text_digest(const std::string& text);

std::string base64_encode(const std::vector<unsigned char>& bytes);
std::vector<unsigned char> base64_decode(const std::string& text);

}  // namespace ara

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace ara::pipeline {

struct FileRecord {
  std::string path;  // relative to the run directory
  std::string sha256;
  bool operator==(const FileRecord&) const = default;
};

struct StageRecord {
  std::string stage;
  std::string digest;  // Config::stage_digest at run time
  std::uint64_t seed = 0;
  std::vector<FileRecord> inputs;
  std::vector<FileRecord> outputs;
  double seconds = 0.0;
};

struct Manifest {
  std::string config_digest;
  std::uint64_t seed = 0;
  std::map<std::string, StageRecord> stages;

  nlohmann::json to_json() const;
  static Manifest from_json(const nlohmann::json& j);  // DataError when malformed
};

inline const char* kManifestFile = "manifest.json";

// Empty manifest when the file does not exist; DataError when it is corrupt.
Manifest load_manifest(const std::filesystem::path& run_dir);
void save_manifest(const std::filesystem::path& run_dir, const Manifest& m);

std::vector<FileRecord> digest_files(const std::filesystem::path& run_dir, const std::vector<std::string>& names);

// Whether every listed file exists with the recorded digest.
bool files_intact(const std::filesystem::path& run_dir, const std::vector<FileRecord>& files);

}  // namespace ara::pipeline

#include "ara/pipeline/manifest.hpp"

#include <fstream>

#include "ara/core/errors.hpp"
#include "ara/core/table.hpp"

namespace ara::pipeline {

using nlohmann::json;

namespace {

json files_json(const std::vector<FileRecord>& files) {
  auto a = json::array();
  for (const auto& f : files) a.push_back({{"path", f.path}, {"sha256", f.sha256}});
  return a;
}

std::vector<FileRecord> files_from_json(const json& j) {
  std::vector<FileRecord> out;
  for (const auto& f : j) out.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>()});
  return out;
}

}  // namespace

json Manifest::to_json() const {
  json j{{"config_digest", config_digest}, {"seed", seed}, {"stages", json::object()}};
  for (const auto& [name, r] : stages)
    j["stages"][name] = {{"digest", r.digest},
                         {"seed", r.seed},
                         {"inputs", files_json(r.inputs)},
                         {"outputs", files_json(r.outputs)},
                         {"seconds", r.seconds}};
  return j;
}

Manifest Manifest::from_json(const json& j) {
  try {
    Manifest m;
    m.config_digest = j.at("config_digest").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& [name, r] : j.at("stages").items()) {
      StageRecord s;
      s.stage = name;
      s.digest = r.at("digest").get<std::string>();
      s.seed = r.at("seed").get<std::uint64_t>();
      s.inputs = files_from_json(r.at("inputs"));
      s.outputs = files_from_json(r.at("outputs"));
      s.seconds = r.at("seconds").get<double>();
      m.stages[name] = std::move(s);
    }
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("corrupt manifest: ") + e.what());
  }
}

Manifest load_manifest(const std::filesystem::path& run_dir) {
  const auto p = run_dir / kManifestFile;
  if (!std::filesystem::exists(p)) return {};
  std::ifstream in(p);
  const auto j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw DataError("corrupt manifest: " + p.string() + " is not valid JSON");
  return Manifest::from_json(j);
}

void save_manifest(const std::filesystem::path& run_dir, const Manifest& m) {
  const auto tmp = run_dir / (std::string(kManifestFile) + ".tmp");
  {
    std::ofstream out(tmp);
    out << m.to_json().dump(2) << '\n';
    if (!out) throw DataError("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, run_dir / kManifestFile);
}

std::vector<FileRecord> digest_files(const std::filesystem::path& run_dir, const std::vector<std::string>& names) {
  std::vector<FileRecord> out;
  for (const auto& n : names) out.push_back({n, file_digest(run_dir / n)});
  return out;
}

bool files_intact(const std::filesystem::path& run_dir, const std::vector<FileRecord>& files) {
  for (const auto& f : files) {
    const auto p = run_dir / f.path;
    if (!std::filesystem::exists(p) || file_digest(p) != f.sha256) return false;
  }
  return true;
}

}  // namespace ara::pipeline

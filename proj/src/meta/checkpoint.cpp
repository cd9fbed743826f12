#include "ara/meta/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "ara/core/errors.hpp"
#include "ara/core/table.hpp"

namespace ara::meta {

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint encoding assumes a little-endian host");

std::string encode(const std::vector<double>& v) {
  std::vector<unsigned char> bytes(v.size() * sizeof(double));
  if (!v.empty()) std::memcpy(bytes.data(), v.data(), bytes.size());
  return base64_encode(bytes);
}

std::vector<double> decode(const std::string& s) {
  const auto bytes = base64_decode(s);
  if (bytes.size() % sizeof(double) != 0) throw DataError("checkpoint weight blob has a partial value");
  std::vector<double> v(bytes.size() / sizeof(double));
  if (!v.empty()) std::memcpy(v.data(), bytes.data(), bytes.size());
  return v;
}

nlohmann::json to_json(const Standardizer& s) { return {{"mean", encode(s.mean)}, {"scale", encode(s.scale)}}; }

Standardizer standardizer_from_json(const nlohmann::json& j) {
  Standardizer s;
  s.mean = decode(j.at("mean"));
  s.scale = decode(j.at("scale"));
  return s;
}

}  // namespace

nlohmann::json to_json(const Mlp& net) {
  return {{"sizes", net.sizes()}, {"activation", "relu"}, {"parameters", encode(net.parameters())}};
}

Mlp mlp_from_json(const nlohmann::json& j) {
  Rng rng(0);
  Mlp net(j.at("sizes").get<std::vector<std::size_t>>(), rng);
  net.set_parameters(decode(j.at("parameters")));
  return net;
}

nlohmann::json to_json(const ScalarRegressor& m) {
  return {{"kind", "scalar_regressor"},
          {"net", to_json(m.net)},
          {"x", to_json(m.x)},
          {"y", encode({m.y_mean, m.y_scale})}};
}

ScalarRegressor regressor_from_json(const nlohmann::json& j) {
  if (j.value("kind", "") != "scalar_regressor") throw DataError("checkpoint is not a scalar regressor");
  ScalarRegressor m;
  m.net = mlp_from_json(j.at("net"));
  m.x = standardizer_from_json(j.at("x"));
  const auto y = decode(j.at("y"));
  if (y.size() != 2) throw DataError("regressor checkpoint has a malformed target transform");
  m.y_mean = y[0];
  m.y_scale = y[1];
  return m;
}

nlohmann::json to_json(const MixtureModel& m) {
  return {{"kind", "mixture_model"},
          {"family", to_string(m.family)},
          {"components", m.components},
          {"data_scale", encode({m.data_scale})},
          {"net", to_json(m.net)},
          {"x", to_json(m.x)}};
}

MixtureModel mixture_model_from_json(const nlohmann::json& j) {
  if (j.value("kind", "") != "mixture_model") throw DataError("checkpoint is not a mixture model");
  MixtureModel m;
  m.family = family_from_string(j.at("family"));
  m.components = j.at("components");
  m.data_scale = decode(j.at("data_scale")).at(0);
  m.net = mlp_from_json(j.at("net"));
  m.x = standardizer_from_json(j.at("x"));
  return m;
}

nlohmann::json to_json(const Mixture& m) {
  auto comps = nlohmann::json::array();
  for (const auto& c : m.components) comps.push_back({{"weight", c.weight}, {"a", c.a}, {"b", c.b}});
  return {{"family", to_string(m.family)}, {"components", comps}};
}

Mixture mixture_from_json(const nlohmann::json& j) {
  Mixture m;
  m.family = family_from_string(j.at("family"));
  for (const auto& c : j.at("components")) m.components.push_back({c.at("weight"), c.at("a"), c.at("b")});
  return m;
}

void save_json(const std::filesystem::path& p, const nlohmann::json& j) {
  std::ofstream out(p);
  if (!out) throw DataError("cannot write " + p.string());
  out << j.dump(2) << '\n';
}

nlohmann::json load_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw DataError("cannot read " + p.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(p.string() + ": " + e.what());
  }
}

}  // namespace ara::meta

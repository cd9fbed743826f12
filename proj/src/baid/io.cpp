#include "ara/baid/io.hpp"

#include <fstream>

#include "ara/core/errors.hpp"

namespace ara::baid {

using nlohmann::json;

nlohmann::json to_json(const Domain& d) {
  if (d.is_interval()) return {{"interval", {d.lo(), d.hi()}}};
  if (d.is_integer_range())
    return {{"integers", {static_cast<std::int64_t>(d.lo()), static_cast<std::int64_t>(d.hi())}}};
  return {{"values", d.values()}};
}

Domain domain_from_json(const json& j) {
  try {
    if (j.contains("interval")) return Domain::interval(j["interval"].at(0).get<double>(), j["interval"].at(1).get<double>());
    if (j.contains("integers"))
      return Domain::integers(j["integers"].at(0).get<std::int64_t>(), j["integers"].at(1).get<std::int64_t>());
    if (j.contains("values")) return Domain::discrete(j["values"].get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw StructuralError(std::string("bad domain: ") + e.what());
  }
  throw StructuralError("domain needs one of interval/integers/values");
}

Agent agent_from_string(const std::string& s) {
  if (s == "defender") return Agent::defender;
  if (s == "attacker") return Agent::attacker;
  throw StructuralError("unknown agent '" + s + "'");
}

namespace {

NodeKind kind_from_string(const std::string& s) {
  if (s == "decision") return NodeKind::decision;
  if (s == "chance") return NodeKind::chance;
  if (s == "utility") return NodeKind::utility;
  throw StructuralError("unknown node kind '" + s + "'");
}

Owner owner_from_string(const std::string& s) {
  if (s == "defender") return Owner::defender_only;
  if (s == "attacker") return Owner::attacker_only;
  if (s == "shared") return Owner::shared;
  throw StructuralError("unknown chance owner '" + s + "'");
}

}  // namespace

json to_json(const Baid& b) {
  json nodes = json::array();
  for (const auto& n : b.nodes()) {
    json j{{"id", n.id}, {"kind", to_string(n.kind)}};
    if (!n.label.empty()) j["label"] = n.label;
    if (n.kind == NodeKind::chance)
      j["owner"] = to_string(n.owner);
    else
      j["agent"] = to_string(n.agent);
    if (n.domain) j["domain"] = to_json(*n.domain);
    j["parents"] = n.parents;
    if (!n.binding.empty()) j["binding"] = n.binding;
    if (n.stage) j["stage"] = *n.stage;
    nodes.push_back(std::move(j));
  }
  return {{"name", b.name()}, {"nodes", nodes}};
}

Baid baid_from_json(const json& j) {
  std::vector<Node> nodes;
  try {
    for (const auto& jn : j.at("nodes")) {
      Node n;
      n.id = jn.at("id").get<std::string>();
      n.label = jn.value("label", std::string{});
      n.kind = kind_from_string(jn.at("kind").get<std::string>());
      if (n.kind == NodeKind::chance)
        n.owner = owner_from_string(jn.value("owner", std::string("shared")));
      else
        n.agent = agent_from_string(jn.at("agent").get<std::string>());
      if (jn.contains("domain")) n.domain = domain_from_json(jn["domain"]);
      n.parents = jn.value("parents", std::vector<std::string>{});
      n.binding = jn.value("binding", std::string{});
      if (jn.contains("stage")) n.stage = jn["stage"].get<int>();
      nodes.push_back(std::move(n));
    }
  } catch (const json::exception& e) {
    throw StructuralError(std::string("malformed diagram document: ") + e.what());
  }
  return Baid(j.value("name", std::string{}), std::move(nodes));
}

Baid load_baid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw StructuralError(path.string() + ": " + e.what());
  }
  return baid_from_json(j.contains("baid") ? j["baid"] : j);
}

void save_baid(const std::filesystem::path& path, const Baid& b) {
  std::ofstream out(path);
  out << to_json(b).dump(2) << '\n';
}

}  // namespace ara::baid

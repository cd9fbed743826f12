#include "ara/disinfo/params.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "ara/core/errors.hpp"
#include "ara/disinfo/model.hpp"

namespace ara::disinfo {

namespace {

using Member = double CaseParams::*;

const std::vector<std::pair<std::string, Member>>& members() {
  static const std::vector<std::pair<std::string, Member>> m{
      {"b_d1", &CaseParams::b_d1},
      {"b_d2", &CaseParams::b_d2},
      {"d1_0", &CaseParams::d1_0},
      {"n", &CaseParams::n},
      {"omega_d2", &CaseParams::omega_d2},
      {"r", &CaseParams::r},
      {"c", &CaseParams::c},
      {"l", &CaseParams::l},
      {"gamma_D", &CaseParams::gamma_D},
      {"t_d", &CaseParams::t_d},
      {"t_a", &CaseParams::t_a},
      {"alpha_theta1", &CaseParams::alpha_theta1},
      {"alpha_d2", &CaseParams::alpha_d2},
      {"delta", &CaseParams::delta},
      {"epsilon", &CaseParams::epsilon},
      {"b_a1", &CaseParams::b_a1},
      {"mu_d1", &CaseParams::mu_d1},
      {"y2A", &CaseParams::y2A},
      {"gamma_A", &CaseParams::gamma_A},
      {"half_phi2", &CaseParams::half_phi2},
      {"half_y2A", &CaseParams::half_y2A},
      {"half_r1A", &CaseParams::half_r1A},
      {"half_cA", &CaseParams::half_cA},
      {"half_lA", &CaseParams::half_lA},
      {"kappa_theta1_lo", &CaseParams::kappa_theta1_lo},
      {"kappa_theta1_hi", &CaseParams::kappa_theta1_hi},
      {"kappa_d2_lo", &CaseParams::kappa_d2_lo},
      {"kappa_d2_hi", &CaseParams::kappa_d2_hi},
      {"kappa_d1_lo", &CaseParams::kappa_d1_lo},
      {"kappa_d1_hi", &CaseParams::kappa_d1_hi},
  };
  return m;
}

Member lookup(const std::string& name) {
  for (const auto& [k, m] : members())
    if (k == name) return m;
  throw std::invalid_argument("unknown case parameter '" + name + "'");
}

}  // namespace

const std::vector<std::string>& CaseParams::names() {
  static const std::vector<std::string> v = [] {
    std::vector<std::string> out;
    for (const auto& [k, m] : members()) out.push_back(k);
    return out;
  }();
  return v;
}

double CaseParams::get(const std::string& name) const { return this->*lookup(name); }

void CaseParams::set(const std::string& name, double value) { this->*lookup(name) = value; }

void CaseParams::validate() const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw ValidationError("case parameters: " + what);
  };
  for (auto [name, v] : {std::pair{"b_d1", b_d1}, {"b_d2", b_d2}, {"b_a1", b_a1}, {"d1_0", d1_0}, {"n", n}, {"r", r},
                         {"c", c}, {"l", l}, {"y2A", y2A}, {"omega_d2", omega_d2}, {"t_d", t_d}, {"t_a", t_a},
                         {"alpha_theta1", alpha_theta1}, {"alpha_d2", alpha_d2}, {"delta", delta}, {"epsilon", epsilon}})
    need(v > 0.0, std::string(name) + " must be positive");
  need(mu_d1 > 0.0 && mu_d1 < 1.0, "mu_d1 must lie in (0,1)");
  need(delta < 0.5, "delta must be below 1/2");
  for (auto [name, v] : {std::pair{"half_phi2", half_phi2}, {"half_y2A", half_y2A}, {"half_r1A", half_r1A},
                         {"half_cA", half_cA}, {"half_lA", half_lA}})
    need(v >= 0.0 && v < 1.0, std::string(name) + " must lie in [0,1)");
  need(kappa_theta1_lo > 0.0 && kappa_theta1_lo <= kappa_theta1_hi, "kappa_theta1 range");
  need(kappa_d2_lo > 0.0 && kappa_d2_lo <= kappa_d2_hi, "kappa_d2 range");
  need(kappa_d1_lo > 0.0 && kappa_d1_lo <= kappa_d1_hi, "kappa_d1 range");

  const double ud = min_defender_utility(*this);
  if (!(ud > 0.0)) throw PositivityError("gamma_D too small: min u_D over the corner set is " + std::to_string(ud));
  const double ua = min_attacker_utility(*this);
  if (!(ua > 0.0)) throw PositivityError("gamma_A too small: worst realizable U_A is " + std::to_string(ua));
}

nlohmann::json CaseParams::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, m] : members()) j[k] = this->*m;
  return j;
}

CaseParams CaseParams::from_json(const nlohmann::json& j) {
  CaseParams p;
  for (const auto& [k, v] : j.items()) p.set(k, v.get<double>());
  return p;
}

std::string CaseParams::first_affected_stage(const std::string& name) {
  lookup(name);
  static const std::vector<std::string> daps1{"b_d1", "b_d2", "d1_0", "n", "omega_d2", "r", "c", "l", "gamma_D"};
  static const std::vector<std::string> aaps2{"mu_d1", "kappa_d1_lo", "kappa_d1_hi"};
  if (std::find(daps1.begin(), daps1.end(), name) != daps1.end()) return "daps1";
  if (std::find(aaps2.begin(), aaps2.end(), name) != aaps2.end()) return "aaps2";
  return "aaps1";
}

}  // namespace ara::disinfo

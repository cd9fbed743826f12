#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace ara::disinfo {

// Case-study constants. Money in M$, populations in persons.
struct CaseParams {
  // Defender
  double b_d1 = 400.0;
  double b_d2 = 200.0;
  double d1_0 = 15.0;
  double n = 180000.0;
  double omega_d2 = 0.9;
  double r = 0.005;
  double c = 125000.0;
  double l = 0.02;
  double gamma_D = 2616.0;
  double t_d = 1.0;
  double t_a = 1.2;
  double alpha_theta1 = 2.0;
  double alpha_d2 = 2.0;
  double delta = 1e-3;
  double epsilon = 1e-3;
  // Attacker, as seen by the Defender
  double b_a1 = 380.0;
  double mu_d1 = 0.7;
  double y2A = 300.0;
  double gamma_A = 1280.0;
  double half_phi2 = 0.05;
  double half_y2A = 0.05;
  double half_r1A = 0.05;
  double half_cA = 0.05;
  double half_lA = 0.01;
  double kappa_theta1_lo = 0.6;
  double kappa_theta1_hi = 0.75;
  double kappa_d2_lo = 0.6;
  double kappa_d2_hi = 0.75;
  double kappa_d1_lo = 7.5;
  double kappa_d1_hi = 8.0;

  static const std::vector<std::string>& names();
  double get(const std::string& name) const;  // std::invalid_argument on unknown names
  void set(const std::string& name, double value);

  // Range checks plus the positivity corner check for u_D and the worst
  // realizable U_A.
  void validate() const;

  nlohmann::json to_json() const;
  // Starts from defaults and applies every key of j; unknown keys throw.
  static CaseParams from_json(const nlohmann::json& j);

  // First pipeline stage whose computation reads this parameter.
  static std::string first_affected_stage(const std::string& name);
};

}  // namespace ara::disinfo

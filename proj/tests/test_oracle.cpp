#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "ara/core/errors.hpp"
#include "ara/oracle/oracle.hpp"
#include "test_paths.hpp"

using namespace ara;
using namespace ara::oracle;

namespace {

nlohmann::json game_json(const std::string& name) {
  std::ifstream in(test::repo_path("tests/data/games/" + name + ".json"));
  nlohmann::json j;
  in >> j;
  return j;
}

DiscreteGame game(const std::string& name) { return game_from_json(game_json(name)); }

aps::SolveOptions oracle_options() {
  aps::SolveOptions o;
  o.defaults.chain = aps::ChainSettings::with_iterations(2000, 40);
  o.defaults.draws_per_point = 200;
  o.defaults.value_draws = 20000;
  o.seed = 11;
  return o;
}

}  // namespace

TEST_CASE("corpus games load and validate") {
  std::size_t n = 0;
  for (const auto& e : std::filesystem::directory_iterator(test::repo_path("tests/data/games"))) {
    CHECK_NOTHROW(load_game(e.path()));
    ++n;
  }
  CHECK(n >= 5);
}

TEST_CASE("enumerate_defender on the simultaneous toy") {
  // p_D(a=1) = 0.7: ψ(0) = 0.3(0.1+1.8) + 0.7(0.8+0.4) = 1.41, ψ(1) = 0.3(1.2) + 0.7(1.9) = 1.69.
  const auto g = game("simultaneous");
  const auto f = exact_forecasts(g);
  REQUIRE(f.size() == 1);
  CHECK(f[0].probabilities[0][1] == doctest::Approx(0.7).epsilon(1e-12));
  const auto sol = enumerate_defender(g);
  const auto& d = policy_for(sol, "D");
  CHECK(d.choice[0] == 1);
  CHECK(d.expected_utility[0][0] == doctest::Approx(1.41).epsilon(1e-12));
  CHECK(d.expected_utility[0][1] == doctest::Approx(1.69).epsilon(1e-12));
}

TEST_CASE("eight-term sum of the balanced toy") {
  // p_D(a=1) = 0.5: ψ(d) = Σ_a Σ_θ 0.5 p(θ|d,a)(1+θ) = 0.5(1.9) + 0.5(1.2) = 1.55 for both d.
  auto j = game_json("simultaneous");
  j["attacker"]["scenarios"][0]["weight"] = 0.5;
  j["attacker"]["scenarios"][1]["weight"] = 0.5;
  const auto d = policy_for(enumerate_defender(game_from_json(j)), "D");
  CHECK(d.expected_utility[0][0] == doctest::Approx(1.55).epsilon(1e-12));
  CHECK(d.expected_utility[0][1] == doctest::Approx(1.55).epsilon(1e-12));
  CHECK(d.choice[0] == 0);
}

TEST_CASE("utility independent of the decision gives the smallest index") {
  auto j = game_json("sequential");
  j["defender"]["tables"]["uD"] = std::vector<double>(6, 3.0);
  const auto sol = enumerate_defender(game_from_json(j));
  const auto& d = policy_for(sol, "D");
  CHECK(d.choice[0] == 0);
  CHECK(d.expected_utility[0][0] == d.expected_utility[0][2]);
}

TEST_CASE("sequential game forecasts condition on the observed defense") {
  const auto g = game("sequential");
  const auto f = exact_forecasts(g);
  CHECK(f[0].probabilities[0][1] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(f[0].probabilities[1][1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(f[0].probabilities[2][1] == doctest::Approx(0.5).epsilon(1e-12));
  const auto sol = enumerate_defender(g);
  const auto& d = policy_for(sol, "D");
  CHECK(d.expected_utility[0][0] == doctest::Approx(2.52).epsilon(1e-12));
  CHECK(d.expected_utility[0][1] == doctest::Approx(2.90).epsilon(1e-12));
  CHECK(d.expected_utility[0][2] == doctest::Approx(2.60).epsilon(1e-12));
  CHECK(d.choice[0] == 1);
}

TEST_CASE("two-stage simultaneous game by backward induction") {
  const auto g = game("two_stage");
  // Scenario 0 at (d1, a1) = (0, 0): P_A(d2=1) = 0.3, so P(θ=1 | a2=1) = 0.65 - 0.12 = 0.53.
  // U_A(a2=0) = 3 + 3(0.1) = 3.3, U_A(a2=1) = 3 - 0.3 + 3(0.53) = 4.29.
  const auto s0 = solve_attacker_scenario(g, 0);
  const auto& a2 = policy_for(s0, "A2");
  CHECK(a2.expected_utility[0][0] == doctest::Approx(3.3).epsilon(1e-12));
  CHECK(a2.expected_utility[0][1] == doctest::Approx(4.29).epsilon(1e-12));
  // First stage under P_A(d1) = (0.5, 0.5), with A2 played optimally afterwards.
  const auto& a1 = policy_for(s0, "A1");
  const double v0 = 0.5 * a2.optimal_value(0) + 0.5 * a2.optimal_value(2);
  const double v1 = 0.5 * a2.optimal_value(1) + 0.5 * a2.optimal_value(3);
  CHECK(a1.expected_utility[0][0] == doctest::Approx(v0).epsilon(1e-12));
  CHECK(a1.expected_utility[0][1] == doctest::Approx(v1).epsilon(1e-12));
  CHECK(a1.choice[0] == (v1 > v0 ? 1u : 0u));

  // Defender: ψ(d1) = Σ_a1 p_D(a1) max_d2 ψ(d1, a1, d2).
  const auto f = exact_forecasts(g);
  const auto d = enumerate_defender(g);
  const auto& d2 = policy_for(d, "D2");
  const auto& d1 = policy_for(d, "D1");
  const auto& pa1 = f[1].decision == "A1" ? f[1] : f[0];
  for (std::size_t x = 0; x < 2; ++x) {
    const double v = pa1.probabilities[0][0] * d2.optimal_value(2 * x) + pa1.probabilities[0][1] * d2.optimal_value(2 * x + 1);
    CHECK(d1.expected_utility[0][x] == doctest::Approx(v).epsilon(1e-12));
  }
}

TEST_CASE("results do not depend on node declaration order") {
  auto j = game_json("private_observation");
  auto nodes = j["baid"]["nodes"];
  std::reverse(nodes.begin(), nodes.end());
  auto k = j;
  k["baid"]["nodes"] = nodes;
  const auto a = enumerate_defender(game_from_json(j));
  const auto b = enumerate_defender(game_from_json(k));
  CHECK(policy_for(a, "D").choice == policy_for(b, "D").choice);
  const auto& ea = policy_for(a, "D").expected_utility;
  const auto& eb = policy_for(b, "D").expected_utility;
  for (std::size_t c = 0; c < ea.size(); ++c)
    for (std::size_t x = 0; x < ea[c].size(); ++x) CHECK(ea[c][x] == doctest::Approx(eb[c][x]).epsilon(1e-13));
}

TEST_CASE("sample_attacker_exact") {
  const auto g = game("simultaneous");
  auto rng = make_rng(5, {});
  SUBCASE("constructed 70% mixture") {
    const auto p = sample_attacker_exact(g, "A", 0, 10000, rng);
    CHECK(std::abs(p[1] - 0.7) <= 0.02);
  }
  SUBCASE("degenerate random measure") {
    auto j = game_json("simultaneous");
    j["attacker"]["scenarios"].erase(1);
    const auto p = sample_attacker_exact(game_from_json(j), "A", 0, 1000, rng);
    CHECK(p[1] == 1.0);
  }
}

TEST_CASE("invalid games are rejected") {
  SUBCASE("row sum") {
    auto j = game_json("simultaneous");
    j["defender"]["tables"]["T"][0] = 0.2;
    CHECK_THROWS_AS(game_from_json(j), DataError);
  }
  SUBCASE("nonpositive utility") {
    auto j = game_json("simultaneous");
    j["attacker"]["scenarios"][0]["tables"]["uA"][0] = 0.0;
    CHECK_THROWS_AS(game_from_json(j), DataError);
  }
  SUBCASE("missing table") {
    auto j = game_json("simultaneous");
    j["defender"]["tables"].erase("T");
    CHECK_THROWS_AS(game_from_json(j), DataError);
  }
  SUBCASE("interval domain") {
    auto j = game_json("simultaneous");
    j["baid"]["nodes"][0]["domain"] = {{"interval", {0, 1}}};
    CHECK_THROWS_AS(game_from_json(j), DataError);
  }
}

TEST_CASE("tabular bindings reproduce the tables") {
  const auto g = game("simultaneous");
  const auto m = defender_model(g);
  auto rng = make_rng(9, {});
  const double x[] = {1.0, 0.0};
  double ones = 0.0;
  for (int i = 0; i < 20000; ++i) ones += m.factors.at("T").sample(x, rng);
  CHECK(ones / 20000.0 == doctest::Approx(0.2).epsilon(0.05));
  CHECK(m.factors.at("T").density(1.0, x) == 0.2);
  const double u[] = {0.0, 1.0};
  CHECK(m.utility(u) == 2.0);
}

TEST_CASE("engine agrees with the oracle on the simultaneous toy") {
  const auto g = game("simultaneous");
  const auto r = compare_with_engine(g, oracle_options());
  for (const auto& d : r.details) MESSAGE(d);
  CHECK(r.daps_points == 1);
  CHECK(r.aaps_draws == 200);
  CHECK(r.exact());
}

TEST_CASE("AAPS draws match the exact attacker distribution") {
  const auto g = game("sequential");
  auto o = oracle_options();
  o.defaults.draws_per_point = 500;
  aps::BaidSolver solver(g.baid, defender_model(g), attacker_model(g), o);
  const auto a = solver.aaps_reduce(solver.step("A"), solver.default_grid(solver.step("A")));
  const auto f = exact_forecasts(g);
  for (std::size_t p = 0; p < a.points.size(); ++p) {
    const double ones = static_cast<double>(std::count(a.draws[p].begin(), a.draws[p].end(), 1.0)) / 500.0;
    const auto d = static_cast<std::size_t>(a.points[p][0]);
    CHECK(std::abs(ones - f[0].probabilities[d][1]) < 0.05);
  }
}

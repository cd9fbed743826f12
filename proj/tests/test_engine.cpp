#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <map>

#include "ara/aps/artifact.hpp"
#include "ara/aps/chain.hpp"
#include "ara/aps/mode.hpp"
#include "ara/aps/solver.hpp"
#include "ara/baid/io.hpp"
#include "ara/core/errors.hpp"
#include "test_paths.hpp"
#include "toy.hpp"

using namespace ara;
using namespace ara::aps;
using ara::baid::Agent;
using ara::baid::Baid;
using ara::baid::Domain;
using ara::test::chance;
using ara::test::decision;
using ara::test::utility;

namespace {

constexpr double kAttackThreshold = 0.6;  // P(A* = 1) of the toy attacker

Baid single_stage() {
  return Baid("single", {decision("D", Agent::defender, {}, 1), decision("A", Agent::attacker, {}, 1),
                         chance("T", {"D", "A"}), utility("uD", Agent::defender, {"D", "T"}),
                         utility("uA", Agent::attacker, {"A", "T"})});
}

DefenderModel toy_defender() {
  DefenderModel m;
  m.factors["T"].sample = [](Values x, Rng& rng) { return test::bernoulli(x[0] == x[1] ? 0.9 : 0.2, rng); };
  m.utility = [](Values x) { return 1.0 + x[1]; };
  return m;
}

// U_A(a,θ) = 1 + θ·a + B·(1−a) with B ~ U(0,1) per ω, P_A(θ=1|a) = 0.6 or 0.3,
// so A* = 1 exactly when B < 0.6.
AttackerModel toy_attacker(std::optional<double> fixed_b = {}) {
  AttackerModel m;
  m.draw = [fixed_b](std::uint64_t k, Rng& rng) {
    AttackerDraw w;
    w.index = k;
    const double b = fixed_b ? *fixed_b : uniform01(rng);
    w.factors["D"].sample = [](Values, Rng& r) { return test::bernoulli(0.5, r); };
    w.factors["T"].sample = [](Values x, Rng& r) { return test::bernoulli(x[1] == 1.0 ? 0.6 : 0.3, r); };
    w.utility = [b](Values x) { return 1.0 + x[1] * x[0] + b * (1.0 - x[0]); };
    return w;
  };
  return m;
}

double ks_uniform(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const auto n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    d = std::max({d, std::abs(static_cast<double>(i + 1) / n - x[i]), std::abs(x[i] - static_cast<double>(i) / n)});
  return d;
}

}  // namespace

TEST_CASE("mh_accept follows the augmented acceptance ratio") {
  Rng rng(7);
  const std::array<double, 1> one{1.0}, two{2.0};
  CHECK(mh_accept(one, one, 1.0, rng));
  const std::array<double, 2> p2{2.0, 2.0}, c2{1.0, 1.0};
  CHECK(mh_accept(p2, c2, 1.0, rng));
  int acc = 0;
  const int trials = 100000;
  for (int i = 0; i < trials; ++i) acc += mh_accept(one, two, 1.0, rng);
  CHECK(static_cast<double>(acc) / trials == doctest::Approx(0.5).epsilon(0.02));
  const std::array<double, 1> zero{0.0};
  CHECK_THROWS_AS(mh_accept(zero, one, 1.0, rng), PositivityError);
}

TEST_CASE("chain settings are validated") {
  auto s = ChainSettings::with_iterations(1000, 3);
  CHECK(s.burn_in == 200);
  CHECK(s.augmentation == 3);
  s.burn_in = 1000;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("toy defender chain finds the enumerated argmax") {
  const double pa = 0.7;
  const auto problem = test::toy_defender_problem(pa);
  Rng rng(11);
  const auto res = run_chain(problem, std::vector<double>(3, 0.0), ChainSettings::with_iterations(20000), rng);
  const double best = test::toy_psi(1.0, pa) > test::toy_psi(0.0, pa) ? 1.0 : 0.0;
  CHECK(res.mode.value == best);
  CHECK(res.mode.sample_count == 16000);
}

TEST_CASE("chain marginal on the tied toy game is balanced") {
  // ψ(0) = ψ(1) = 1.55 when p(a=1) = 0.5.
  CHECK(test::toy_psi(0.0, 0.5) == doctest::Approx(test::toy_psi(1.0, 0.5)));
  const auto problem = test::toy_defender_problem(0.5);
  Rng rng(3);
  const auto res = run_chain(problem, std::vector<double>(3, 0.0), ChainSettings::with_iterations(100000), rng);
  const double ones = static_cast<double>(std::count(res.decisions.begin(), res.decisions.end(), 1.0));
  CHECK(ones / static_cast<double>(res.decisions.size()) == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("chain joint matches the normalized augmented distribution") {
  const double pa = 0.7;
  const auto problem = test::toy_defender_problem(pa);
  std::map<std::array<int, 3>, double> exact;
  double z = 0.0;
  for (int d = 0; d < 2; ++d)
    for (int a = 0; a < 2; ++a)
      for (int t = 0; t < 2; ++t) {
        const double pt = d == a ? 0.9 : 0.2;
        const double w = (1.0 + t) * (t ? pt : 1.0 - pt) * (a ? pa : 1.0 - pa);
        exact[{d, a, t}] = w;
        z += w;
      }
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Rng rng(seed);
    auto s = ChainSettings::with_iterations(125000);  // 10⁵ retained states
    const auto res = run_chain(problem, std::vector<double>(3, 0.0), s, rng, true);
    REQUIRE(res.states.size() == 100000);
    std::map<std::array<int, 3>, double> freq;
    for (const auto& st : res.states)
      freq[{static_cast<int>(st.assignment[0]), static_cast<int>(st.assignment[1]), static_cast<int>(st.assignment[2])}] +=
          1.0;
    double tv = 0.0;
    for (const auto& [k, w] : exact) tv += std::abs(w / z - freq[k] / 100000.0);
    CHECK(tv / 2.0 < 0.03);
  }
}

TEST_CASE("power transform keeps the argmax") {
  const auto problem = test::toy_defender_problem(0.7);
  for (int h : {1, 5, 20}) {
    Rng rng(100 + h);
    const auto res = run_chain(problem, std::vector<double>(3, 0.0), ChainSettings::with_iterations(10000, h), rng);
    CHECK(res.mode.value == 1.0);
  }
}

TEST_CASE("flat augmented distribution gives uniform decisions") {
  Problem p;
  p.slot_count = 1;
  p.decision_slot = 0;
  p.decision_domain = Domain::interval(0.0, 1.0);
  p.utility = [](Values) { return 3.0; };
  auto s = ChainSettings::with_iterations(125000);
  s.proposal_scale = 100.0;  // folds to an almost uniform independence proposal
  Rng rng(5);
  const auto res = run_chain(p, {0.0}, s, rng);
  CHECK(ks_uniform(res.decisions) < 0.02);
  CHECK(res.acceptance_rate == 1.0);
}

TEST_CASE("chains are bit-identical for identical seeds") {
  const auto problem = test::toy_defender_problem(0.7);
  Rng a(42), b(42);
  const auto s = ChainSettings::with_iterations(5000, 3);
  const auto ra = run_chain(problem, std::vector<double>(3, 0.0), s, a);
  const auto rb = run_chain(problem, std::vector<double>(3, 0.0), s, b);
  CHECK(ra.decisions == rb.decisions);
  CHECK(ra.acceptance_rate == rb.acceptance_rate);
}

TEST_CASE("non-positive utility aborts the chain") {
  auto problem = test::toy_defender_problem(0.7);
  problem.utility = [](Values x) { return x[0]; };
  Rng rng(1);
  CHECK_THROWS_AS(run_chain(problem, std::vector<double>(3, 0.0), ChainSettings::with_iterations(1000), rng),
                  PositivityError);
}

TEST_CASE("mode estimation") {
  const auto unit = Domain::interval(0.0, 1.0);
  SUBCASE("point mass") {
    const std::vector<double> s(500, 0.37);
    CHECK(estimate_mode(s, unit).value == 0.37);
  }
  SUBCASE("too few samples") {
    CHECK_THROWS_AS(estimate_mode(std::vector<double>(99, 0.5), unit), InsufficientSamplesError);
  }
  SUBCASE("beta(2,8)") {
    Rng rng(9);
    std::vector<double> s(100000);
    for (auto& x : s) x = sample_beta(rng, 2.0, 8.0);
    CHECK(std::abs(estimate_mode(s, unit).value - 0.125) <= 0.02);
  }
  SUBCASE("truncated normal mixture") {
    Rng rng(10);
    std::vector<double> s;
    while (s.size() < 100000) {
      const double x = uniform01(rng) < 0.8 ? 0.2 + 0.05 * standard_normal(rng) : 0.8 + 0.05 * standard_normal(rng);
      if (x >= 0.0 && x <= 1.0) s.push_back(x);
    }
    CHECK(std::abs(estimate_mode(s, unit).value - 0.2) <= 0.02);
  }
  SUBCASE("mass at the boundary is found through reflection") {
    Rng rng(12);
    std::vector<double> s(20000);
    for (auto& x : s) x = sample_beta(rng, 1.0, 6.0);
    CHECK(estimate_mode(s, unit).value < 0.02);
  }
  SUBCASE("narrow kernel path") {
    Rng rng(13);
    std::vector<double> s(5000);
    for (auto& x : s) x = 0.6 + 1e-4 * standard_normal(rng);
    CHECK(std::abs(estimate_mode(s, unit).value - 0.6) <= 2e-3);
  }
  SUBCASE("discrete domain picks the most frequent value, smaller on ties") {
    std::vector<double> s(100, 2.0);
    s.insert(s.end(), 100, 1.0);
    s.insert(s.end(), 50, 3.0);
    CHECK(estimate_mode(s, Domain::discrete({1, 2, 3})).value == 1.0);
  }
  SUBCASE("samples outside the domain are rejected") {
    std::vector<double> s(200, 0.5);
    s[3] = 1.5;
    CHECK_THROWS(estimate_mode(s, unit));
  }
}

TEST_CASE("recentered beliefs") {
  auto b = recenter_beta(0.5, 8.0, 1e-3);
  CHECK(b.alpha == doctest::Approx(4.0));
  CHECK(b.beta == doctest::Approx(4.0));
  b = recenter_beta(0.7, 10.0, 1e-3);
  CHECK(b.alpha == doctest::Approx(7.0));
  CHECK(b.beta == doctest::Approx(3.0));
  CHECK(b.alpha / (b.alpha + b.beta) == doctest::Approx(0.7));
  b = recenter_beta(1.0, 10.0, 0.01);
  CHECK(b.alpha / (b.alpha + b.beta) == doctest::Approx(0.99));
}

TEST_CASE("reduction plans follow the decision paths") {
  auto kinds = [](const BaidSolver& s) {
    std::vector<std::string> out;
    for (const auto& st : s.plan()) out.push_back(st.label + ":" + st.decision());
    return out;
  };
  SUBCASE("single stage") {
    BaidSolver s(single_stage(), toy_defender(), toy_attacker(), {});
    CHECK(kinds(s) == std::vector<std::string>{"AAPS1:A", "DAPS1:D"});
  }
  SUBCASE("case study") {
    const auto g = baid::load_baid(test::repo_path("data/disinfo_baid.json"));
    BaidSolver s(g, {}, {}, {});
    CHECK(kinds(s) == std::vector<std::string>{"DAPS1:d2", "AAPS1:a2", "AAPS2:a1", "DAPS2:d1"});
  }
  SUBCASE("two-stage simultaneous game") {
    const Baid g("two-stage",
                 {decision("D1", Agent::defender, {}, 1), decision("A1", Agent::attacker, {}, 1),
                  decision("D2", Agent::defender, {"D1", "A1"}, 2), decision("A2", Agent::attacker, {"D1", "A1"}, 2),
                  chance("T", {"D2", "A2"}), utility("uD", Agent::defender, {"D1", "D2", "T"}),
                  utility("uA", Agent::attacker, {"A1", "A2", "T"})});
    BaidSolver s(g, {}, {}, {});
    const auto plan = s.plan();
    REQUIRE(plan.size() == 4);
    CHECK(std::count_if(plan.begin(), plan.end(), [](const Step& x) { return x.kind == Step::Kind::daps; }) == 2);
    CHECK(kinds(s) == std::vector<std::string>{"AAPS1:A2", "DAPS1:D2", "AAPS2:A1", "DAPS2:D1"});
  }
}

TEST_CASE("attacker reduction matches the enumerated random optimal attack") {
  // Enumeration oracle over 10⁴ ω-draws.
  Rng orng(77);
  int ones = 0;
  for (int k = 0; k < 10000; ++k) ones += (1.0 + 0.6) > (1.0 + uniform01(orng));
  const double p_exact = ones / 10000.0;
  CHECK(p_exact == doctest::Approx(kAttackThreshold).epsilon(0.05));

  SolveOptions o;
  o.seed = 2024;
  o.defaults.chain = ChainSettings::with_iterations(2000, 5);
  o.defaults.draws_per_point = 500;
  o.defaults.value_draws = 2000;
  BaidSolver s(single_stage(), toy_defender(), toy_attacker(), o);
  const auto art = s.reduce(s.plan()[0]);
  REQUIRE(art.points.size() == 1);
  const auto& row = art.draws[0];
  const double p_aaps = static_cast<double>(std::count(row.begin(), row.end(), 1.0)) / static_cast<double>(row.size());
  CHECK(std::abs(p_aaps - p_exact) < 0.05);
  for (double v : art.values[0]) CHECK(v > 0.0);
}

TEST_CASE("degenerate attacker beliefs give identical draws") {
  SolveOptions o;
  o.defaults.chain = ChainSettings::with_iterations(3000, 5);
  o.defaults.draws_per_point = 20;
  o.defaults.value_draws = 500;
  BaidSolver s(single_stage(), toy_defender(), toy_attacker(0.1), o);
  const auto art = s.reduce(s.plan()[0]);
  for (double a : art.draws[0]) CHECK(a == 1.0);
}

TEST_CASE("full solve of the single-stage toy") {
  SolveOptions o;
  o.seed = 5;
  o.defaults.chain = ChainSettings::with_iterations(4000, 5);
  o.defaults.draws_per_point = 300;
  o.defaults.value_draws = 5000;
  const auto arts = solve_baid(single_stage(), toy_defender(), toy_attacker(), o);
  REQUIRE(arts.size() == 2);
  // p_D(a=1) ≈ 0.6: ψ(1) = 1.62 > ψ(0) = 1.48.
  CHECK(arts[1].optimal[0] == 1.0);
  CHECK(arts[1].values[0][0] == doctest::Approx(1.62).epsilon(0.03));
}

TEST_CASE("one-point grid reproduces the chain run") {
  SolveOptions o;
  o.seed = 8;
  o.defaults.chain = ChainSettings::with_iterations(3000, 2);
  o.defaults.draws_per_point = 50;
  o.defaults.value_draws = 100;
  BaidSolver s(single_stage(), toy_defender(), toy_attacker(), o);
  const auto aaps = s.reduce(s.plan()[0]);
  s.install(s.plan()[0], aaps);
  const auto& step = s.plan()[1];
  const auto art = s.reduce(step);
  auto rng = make_rng(s.stage_seed(step), {0, 0});
  const auto chain = run_chain(s.defender_problem(step), std::vector<double>(s.baid().size(), 0.0), o.defaults.chain, rng);
  CHECK(art.optimal[0] == chain.mode.value);
  CHECK(art.trace == chain.decisions);
}

TEST_CASE("parallel and serial reductions agree") {
  SolveOptions o;
  o.seed = 31;
  o.defaults.chain = ChainSettings::with_iterations(1000, 2);
  o.defaults.draws_per_point = 40;
  o.defaults.value_draws = 200;
  BaidSolver serial(single_stage(), toy_defender(), toy_attacker(), o);
  o.workers = 3;
  BaidSolver parallel(single_stage(), toy_defender(), toy_attacker(), o);
  const auto a = serial.reduce(serial.plan()[0]);
  const auto b = parallel.reduce(parallel.plan()[0]);
  CHECK(a.draws == b.draws);
  CHECK(a.values == b.values);
}

TEST_CASE("artifacts round-trip through CSV") {
  SolveOptions o;
  o.defaults.chain = ChainSettings::with_iterations(1000, 1);
  o.defaults.draws_per_point = 7;
  o.defaults.value_draws = 100;
  const auto arts = solve_baid(single_stage(), toy_defender(), toy_attacker(), o);
  const auto dir = std::filesystem::temp_directory_path() / "ara_artifact_test";
  std::filesystem::create_directories(dir);
  for (const auto& a : arts) {
    const auto path = dir / (a.decision + ".csv");
    save_artifact(path, a);
    const auto b = load_artifact(path);
    CHECK(b.decision == a.decision);
    CHECK(b.agent == a.agent);
    CHECK(b.conditioning == a.conditioning);
    CHECK(b.optimal == a.optimal);
    CHECK(b.draws == a.draws);
    CHECK(b.values == a.values);
    CHECK(b.trace == a.trace);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("lookup grids interpolate values and sample stored draws") {
  PolicyArtifact a;
  a.decision = "x";
  a.agent = Agent::attacker;
  a.conditioning = {"c"};
  a.grid.dims = {GridDim::range(0.0, 1.0, 0.5)};
  a.points = make_grid(a.grid);
  a.draws = {{0.1, 0.2}, {0.3, 0.4}, {0.5, 0.6}};
  a.values = {{10.0, 20.0}, {30.0, 40.0}, {50.0, 60.0}};
  const auto rv = lookup_random_value(a);
  AttackerDraw w;
  w.index = 3;  // column 1
  const std::array<double, 1> x{0.25};
  CHECK(rv.realize(w)(x) == doctest::Approx(30.0));
  const auto f = lookup_forecast(a);
  Rng rng(1);
  const std::array<double, 1> y{0.9};
  for (int i = 0; i < 20; ++i) {
    const double v = f.factor.sample(y, rng);
    CHECK((v == 0.5 || v == 0.6));
  }
  CHECK(f.factor.density(0.5, y) == doctest::Approx(0.5));
}

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "spiralflow/runner.hpp"
#include "spiralflow/scenarios.hpp"

using namespace spiralflow;

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST(RotatingExact, Examples) {
  const AngularProfile zero{};
  EXPECT_DOUBLE_EQ(rotating_exact(zero, 1.3, {1.0, 0.5}, 2.0), 2.6);
  const AngularProfile g{0.0, {0.3, 0.0}};
  EXPECT_NEAR(rotating_exact(g, 1.0, {1.0, 0.0}, kPi / 2), kPi / 2, 1e-15);
  EXPECT_NEAR(rotating_exact(g, 1.0, {0.0, 2.0}, kPi / 2), 0.3 + kPi / 2, 1e-15);
  for (Vec2 x : {Vec2{1.0, 0.0}, Vec2{-0.3, 0.7}, Vec2{1.5, -1.0}})
    EXPECT_DOUBLE_EQ(rotating_exact(g, 2.0, x, 0.0), InitialCondition::angular(g)(x));
  EXPECT_THROW(rotating_exact({0.0, {0.8, 0.7}}, 1.0, {1.0, 0.0}, 0.0), HypothesisViolated);
  EXPECT_THROW(rotating_exact(g, 1.0, {0.0, 0.0}, 0.0), SingularPoint);
}

TEST(RotatingExact, SatisfiesUnregularizedEquationByFiniteDifferences) {
  // u_t = |Du - Dtheta| (div((Du - Dtheta)/|.|) + c) at sample points, derivatives by
  // central differences of the closed form.
  const AngularProfile g{0.1, {0.3, 0.0}};
  const std::vector<SpiralCenter> c{{{0.0, 0.0}, 1}};
  const double c0 = 1.0, t = 0.4, d = 1e-4;
  auto u = [&](Vec2 x, double s) { return rotating_exact(g, c0, x, s); };
  for (Vec2 x : {Vec2{1.0, 0.3}, Vec2{-0.7, 0.9}, Vec2{0.2, -1.6}}) {
    auto p = [&](Vec2 y) {
      const Vec2 du{(u(y + Vec2{d, 0}, t) - u(y - Vec2{d, 0}, t)) / (2 * d),
                    (u(y + Vec2{0, d}, t) - u(y - Vec2{0, d}, t)) / (2 * d)};
      return du - grad_theta(y, c);
    };
    auto n = [&](Vec2 y) { return p(y) / norm(p(y)); };
    const double div = (n(x + Vec2{d, 0}).x - n(x - Vec2{d, 0}).x) / (2 * d) +
                       (n(x + Vec2{0, d}).y - n(x - Vec2{0, d}).y) / (2 * d);
    const double ut = (u(x, t + d) - u(x, t - d)) / (2 * d);
    EXPECT_NEAR(ut, norm(p(x)) * (div + c0 * norm(x)), 1e-5);
  }
}

TEST(Catalog, AllScenariosBuildAndAreConsistent) {
  for (const std::string& name : catalog_names()) {
    const Scenario sc = build_scenario(name);
    EXPECT_EQ(sc.name, name);
    EXPECT_NO_THROW(validate(sc.domain));
    EXPECT_NO_THROW(validate(sc.params));
    EXPECT_FALSE(sc.checks.empty());
    const Grid g = build_grid(sc.domain, sc.h);
    for (int k : g.interior) ASSERT_GT(sc.forcing(g.position(k)), 0.0) << name;
    if (sc.initial.kind() == InitialCondition::Kind::angular && sc.forcing.kind() == Forcing::Kind::radial) {
      EXPECT_LT(sc.initial.profile().gradient_sup(), 1.0);
    }
  }
  EXPECT_THROW(build_scenario("no_such_thing"), UnknownScenario);
  EXPECT_THROW(load_scenario("no_such_thing"), UnknownScenario);
}

TEST(Catalog, StaticReports) {
  const StaticReport ac = static_report(build_scenario("annulus_constant"));
  ASSERT_TRUE(ac.growth_bounds.has_value());
  EXPECT_DOUBLE_EQ(ac.growth_bounds->first, 1.5);
  EXPECT_DOUBLE_EQ(ac.growth_bounds->second, 6.0);
  EXPECT_DOUBLE_EQ(ac.C0, 2.0);
  EXPECT_DOUBLE_EQ(ac.K0, 1.5);

  const StaticReport lr = static_report(build_scenario("lipschitz_regime"));
  EXPECT_NEAR(lr.forcing_margin, 100.0 - 2.0 * 2.0 * 10.0 - 8.0 * 2.0 / 0.5, 1e-10);
  ASSERT_TRUE(lr.growth_bounds.has_value());
  EXPECT_DOUBLE_EQ(lr.growth_bounds->first, 10.0);
  EXPECT_DOUBLE_EQ(lr.growth_bounds->second, 20.0);

  const StaticReport ip = static_report(build_scenario("inactive_pair"));
  EXPECT_FALSE(ip.growth_bounds.has_value());
  // Centers at distance l = 0.8 <= 1 / max c.
  const Scenario sc = build_scenario("inactive_pair");
  EXPECT_LE(sc.domain.holes[1].center.x, 1.0 / sc.forcing.parameter());
}

TEST(Catalog, ExactSolutionResidualDecreasesWithRefinement) {
  // Discrete rhs of the rotating solution against its analytic time derivative, away from the
  // reflected ghost layer.
  const Scenario base = build_scenario("annulus_rotating");
  const AngularProfile g = base.initial.profile();
  double prev = INFINITY;
  for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    auto pb = make_problem(base.domain, h, base.forcing);
    const SolverState st = make_state(pb, base.initial, base.params);
    const ScalarField r = rhs(st);
    double res = 0.0;
    for (int k : pb->grid().interior) {
      const Vec2 x = pb->grid().position(k);
      if (signed_distance(base.domain, x) < 0.25) continue;
      const double d = 1e-6;
      const double ut = (rotating_exact(g, 1.0, x, d) - rotating_exact(g, 1.0, x, 0.0)) / d;
      res = std::max(res, std::abs(r[k] - ut));
    }
    EXPECT_LT(res, prev);
    prev = res;
  }
}

TEST(Json, RoundTripPreservesScenario) {
  for (const std::string& name : catalog_names()) {
    const Scenario a = build_scenario(name);
    const nlohmann::json j = to_json(a);
    const Scenario b = scenario_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(to_json(b), j) << name;
    EXPECT_EQ(b.h, a.h);
    EXPECT_EQ(b.params.t_end, a.params.t_end);
    EXPECT_EQ(b.checks, a.checks);
  }
}

TEST(Json, SampledFieldsRoundTrip) {
  Scenario sc = build_scenario("annulus_constant");
  SampledField2D f;
  f.origin = {-2.0, -2.0};
  f.spacing = 1.0;
  f.nx = f.ny = 5;
  for (int k = 0; k < 25; ++k) f.values.push_back(1.0 + 0.1 * k);
  sc.forcing = Forcing::sampled(f);
  sc.initial = InitialCondition::sampled(f);
  const Scenario b = scenario_from_json(to_json(sc));
  EXPECT_EQ(b.forcing.kind(), Forcing::Kind::sampled);
  EXPECT_EQ(b.forcing.samples().values, f.values);
  EXPECT_DOUBLE_EQ(b.forcing({-1.5, -2.0}), 1.05);
  EXPECT_DOUBLE_EQ(b.initial({0.0, 0.0}), f.values[12]);
}

TEST(Json, InvalidConfigurationsRaiseConfigError) {
  using nlohmann::json;
  const json good = to_json(build_scenario("annulus_constant"));
  json j = good;
  j["forcing"]["type"] = "spiral";
  EXPECT_THROW(scenario_from_json(j), ConfigError);
  j = good;
  j["domain"].erase("outer_radius");
  EXPECT_THROW(scenario_from_json(j), ConfigError);
  j = good;
  j["solver"]["cfl"] = 2.0;
  EXPECT_THROW(scenario_from_json(j), ConfigError);
  j = good;
  j["solver"]["scheme"] = "implicit";
  EXPECT_THROW(scenario_from_json(j), ConfigError);
  j = good;
  j["domain"]["holes"] = json::array();
  EXPECT_THROW(scenario_from_json(j), ConfigError);
  j = good;
  j["initial"]["slope"] = json::array({1.0});
  j["initial"]["type"] = "angular";
  EXPECT_THROW(scenario_from_json(j), ConfigError);
  j = good;
  j["forcing"] = {{"type", "grid"}, {"origin", {0, 0}}, {"spacing", 1.0}, {"nx", 3}, {"ny", 3}, {"values", {1, 2}}};
  EXPECT_THROW(scenario_from_json(j), ConfigError);
}

TEST(Json, MinimalConfigUsesDefaults) {
  const nlohmann::json j = nlohmann::json::parse(R"({
    "domain": {"outer_radius": 1.5, "hole_radius": 0.4, "holes": [{"center": [0, 0]}]},
    "forcing": {"type": "constant", "value": 2}
  })");
  const Scenario sc = scenario_from_json(j);
  EXPECT_EQ(sc.name, "custom");
  EXPECT_EQ(sc.domain.holes[0].strength, 1);
  EXPECT_EQ(sc.initial.kind(), InitialCondition::Kind::constant);
  EXPECT_EQ(sc.params.scheme, Scheme::upwind_forcing);
  EXPECT_DOUBLE_EQ(sc.h0, 2 * kPi);
}

TEST(Checks, UnknownCheckIsConfigError) {
  Scenario sc = build_scenario("annulus_constant");
  sc.params.t_end = 0.2;
  sc.checks = {"no_such_check"};
  EXPECT_THROW(execute(sc, {}), ConfigError);
}

TEST(Checks, ShortLipschitzRunPassesItsChecks) {
  Scenario sc = build_scenario("lipschitz_regime");
  sc.params.t_end = 2.0;
  const RunOutcome o = execute(sc, {});
  ASSERT_EQ(o.summary.checks.size(), sc.checks.size());
  for (const auto& [name, ok] : o.summary.checks) EXPECT_TRUE(ok) << name;
}

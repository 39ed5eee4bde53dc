#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spiralflow/errors.hpp"
#include "spiralflow/forcing.hpp"
#include "spiralflow/geometry.hpp"
#include "spiralflow/solver.hpp"

namespace spiralflow {

//! A complete, runnable configuration with the checks it is expected to pass.
struct Scenario {
  std::string name;
  DomainSpec domain;
  Forcing forcing = Forcing::constant(1.0);
  InitialCondition initial = InitialCondition::constant(0.0);
  SolverParams params;
  double h = 0.05;
  double h0 = 2.0 * std::numbers::pi;  // unit step height for height maps
  std::vector<std::string> checks;
};

//! g(R_{-c0 t} x/|x|) + c0 t: the exact solution for c = c0 |x| on a centered annulus.
inline double rotating_exact(const AngularProfile& g, double c0, Vec2 x, double t) {
  if (!(g.gradient_sup() < 1.0)) throw HypothesisViolated("rotating solution needs |Dg| < 1");
  const double r = norm(x);
  if (r == 0.0) throw SingularPoint("rotating solution is undefined at the origin");
  return g(rotate(x / r, -c0 * t)) + c0 * t;
}

namespace detail {

inline DomainSpec annulus(double outer, double inner) {
  DomainSpec d;
  d.outer_radius = outer;
  d.hole_radius = inner;
  d.holes = {{{0.0, 0.0}, 1}};
  return d;
}

inline DomainSpec opposite_pair(double outer, double inner, double l) {
  DomainSpec d;
  d.outer_radius = outer;
  d.hole_radius = inner;
  d.holes = {{{-l, 0.0}, 1}, {{l, 0.0}, -1}};
  return d;
}

}  // namespace detail

inline std::vector<std::string> catalog_names() {
  return {"annulus_constant", "annulus_radial",  "annulus_rotating", "lipschitz_regime",
          "opposite_pair_strip", "inactive_pair", "pinched_single"};
}

inline Scenario build_scenario(const std::string& name) {
  Scenario sc;
  sc.name = name;
  SolverParams& p = sc.params;
  if (name == "annulus_constant") {
    sc.domain = detail::annulus(2.0, 0.5);
    sc.forcing = Forcing::constant(3.0);
    sc.h = 0.05;
    p.t_end = 20.0;
    sc.checks = {"barrier", "growth_bounds", "height_residual", "height_sandwich", "spiral_endpoints"};
  } else if (name == "annulus_radial") {
    sc.domain = detail::annulus(2.0, 0.5);
    sc.forcing = Forcing::radial(1.0);
    sc.h = 0.05;
    p.t_end = 20.0;
    sc.checks = {"barrier",         "radial_growth_rate", "fekete_bound",    "rotating_exact",
                 "height_residual", "height_sandwich",    "spiral_endpoints"};
  } else if (name == "annulus_rotating") {
    sc.domain = detail::annulus(2.0, 0.5);
    sc.forcing = Forcing::radial(1.0);
    sc.initial = InitialCondition::angular({0.0, {0.3, 0.0}});
    sc.h = 1.0 / 64.0;
    p.epsilon = 1e-3;
    p.cfl = 0.9;
    p.t_end = 1.0;
    sc.checks = {"barrier", "rotating_exact", "spiral_rotation", "height_residual", "spiral_endpoints"};
  } else if (name == "lipschitz_regime") {
    sc.domain = detail::annulus(1.0, 0.5);
    sc.forcing = Forcing::constant(10.0);
    sc.h = 0.05;
    p.t_end = 20.0;
    sc.checks = {"barrier", "forcing_margin_positive", "lipschitz_bound", "ut_bound", "height_residual"};
  } else if (name == "opposite_pair_strip") {
    sc.domain = detail::opposite_pair(2.0, 0.3, 0.6);
    sc.domain.masks = {{{-0.6, 0.0}, {0.6, 0.0}, 0.12}};
    sc.forcing = Forcing::constant(2.0);
    sc.h = 0.025;
    p.cfl = 0.9;
    p.t_end = 10.0;
    sc.checks = {"barrier", "bounded_u", "height_residual", "height_sandwich", "spiral_endpoints"};
  } else if (name == "inactive_pair") {
    sc.domain = detail::opposite_pair(3.0, 0.3, 0.8);
    sc.forcing = Forcing::constant(1.0);
    sc.h = 0.03;
    p.cfl = 0.9;
    p.t_end = 50.0;
    p.sample_interval = 0.25;
    sc.checks = {"barrier", "inactive_rate", "plateau", "height_residual", "height_sandwich",
                 "spiral_endpoints"};
  } else if (name == "pinched_single") {
    DomainSpec d;
    d.outer_radius = 2.0;
    d.hole_radius = 0.3;
    d.holes = {{{-0.5, 0.0}, 1}};
    d.masks = {{{0.5, 0.0}, {2.5, 0.0}, 0.3}};
    sc.domain = d;
    sc.forcing = Forcing::constant(1.0);
    sc.h = 0.03;
    p.cfl = 0.9;
    p.t_end = 20.0;
    sc.checks = {"barrier", "height_residual", "height_sandwich"};
  } else {
    throw UnknownScenario("unknown scenario '" + name + "'");
  }
  return sc;
}

// ---------------------------------------------------------------------------
// JSON configuration

namespace detail {

using json = nlohmann::json;

inline json vec_json(Vec2 v) { return json::array({v.x, v.y}); }

inline Vec2 json_vec(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("expected a two-element array");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

inline json sampled_json(const SampledField2D& f) {
  return {{"type", "grid"},       {"origin", vec_json(f.origin)}, {"spacing", f.spacing},
          {"nx", f.nx},           {"ny", f.ny},                   {"values", f.values}};
}

inline SampledField2D json_sampled(const json& j) {
  SampledField2D f;
  f.origin = json_vec(j.at("origin"));
  f.spacing = j.at("spacing").get<double>();
  f.nx = j.at("nx").get<int>();
  f.ny = j.at("ny").get<int>();
  f.values = j.at("values").get<std::vector<double>>();
  return f;
}

}  // namespace detail

inline nlohmann::json to_json(const Scenario& sc) {
  using detail::json;
  using detail::vec_json;
  json holes = json::array();
  for (const Hole& h : sc.domain.holes) holes.push_back({{"center", vec_json(h.center)}, {"strength", h.strength}});
  json masks = json::array();
  for (const Capsule& m : sc.domain.masks)
    masks.push_back({{"a", vec_json(m.a)}, {"b", vec_json(m.b)}, {"radius", m.radius}});

  json forcing;
  switch (sc.forcing.kind()) {
    case Forcing::Kind::constant: forcing = {{"type", "constant"}, {"value", sc.forcing.parameter()}}; break;
    case Forcing::Kind::radial: forcing = {{"type", "radial"}, {"c0", sc.forcing.parameter()}}; break;
    case Forcing::Kind::sampled: forcing = detail::sampled_json(sc.forcing.samples()); break;
  }
  json initial;
  switch (sc.initial.kind()) {
    case InitialCondition::Kind::constant: initial = {{"type", "constant"}, {"value", sc.initial.alpha()}}; break;
    case InitialCondition::Kind::angular:
      initial = {{"type", "angular"},
                 {"offset", sc.initial.profile().offset},
                 {"slope", vec_json(sc.initial.profile().slope)}};
      break;
    case InitialCondition::Kind::sampled: initial = detail::sampled_json(sc.initial.samples()); break;
  }
  const SolverParams& p = sc.params;
  return {{"name", sc.name},
          {"domain",
           {{"outer_radius", sc.domain.outer_radius},
            {"hole_radius", sc.domain.hole_radius},
            {"holes", holes},
            {"masks", masks}}},
          {"forcing", forcing},
          {"initial", initial},
          {"solver",
           {{"h", sc.h},
            {"epsilon", p.epsilon},
            {"cfl", p.cfl},
            {"t_end", p.t_end},
            {"sample_interval", p.sample_interval},
            {"snapshot_interval", p.snapshot_interval},
            {"scheme", p.scheme == Scheme::central ? "central" : "upwind"}}},
          {"h0", sc.h0},
          {"checks", sc.checks}};
}

//! Missing optional keys keep their defaults; unknown types raise ConfigError.
inline Scenario scenario_from_json(const nlohmann::json& j) {
  using detail::json_vec;
  try {
    Scenario sc;
    sc.name = j.value("name", std::string("custom"));
    const auto& d = j.at("domain");
    sc.domain.outer_radius = d.at("outer_radius").get<double>();
    sc.domain.hole_radius = d.at("hole_radius").get<double>();
    for (const auto& h : d.at("holes")) sc.domain.holes.push_back({json_vec(h.at("center")), h.value("strength", 1)});
    if (d.contains("masks"))
      for (const auto& m : d.at("masks"))
        sc.domain.masks.push_back({json_vec(m.at("a")), json_vec(m.at("b")), m.at("radius").get<double>()});

    const auto& f = j.at("forcing");
    const std::string ftype = f.at("type").get<std::string>();
    if (ftype == "constant") sc.forcing = Forcing::constant(f.at("value").get<double>());
    else if (ftype == "radial") sc.forcing = Forcing::radial(f.at("c0").get<double>());
    else if (ftype == "grid") sc.forcing = Forcing::sampled(detail::json_sampled(f));
    else throw ConfigError("unknown forcing type '" + ftype + "'");

    if (j.contains("initial")) {
      const auto& u = j.at("initial");
      const std::string utype = u.at("type").get<std::string>();
      if (utype == "constant") sc.initial = InitialCondition::constant(u.at("value").get<double>());
      else if (utype == "angular")
        sc.initial = InitialCondition::angular({u.value("offset", 0.0), json_vec(u.at("slope"))});
      else if (utype == "grid") sc.initial = InitialCondition::sampled(detail::json_sampled(u));
      else throw ConfigError("unknown initial condition type '" + utype + "'");
    }

    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      SolverParams& p = sc.params;
      sc.h = s.value("h", sc.h);
      p.epsilon = s.value("epsilon", p.epsilon);
      p.cfl = s.value("cfl", p.cfl);
      p.t_end = s.value("t_end", p.t_end);
      p.sample_interval = s.value("sample_interval", p.sample_interval);
      p.snapshot_interval = s.value("snapshot_interval", p.snapshot_interval);
      const std::string scheme = s.value("scheme", std::string("upwind"));
      if (scheme == "central") p.scheme = Scheme::central;
      else if (scheme == "upwind") p.scheme = Scheme::upwind_forcing;
      else throw ConfigError("unknown scheme '" + scheme + "'");
    }
    sc.h0 = j.value("h0", sc.h0);
    sc.checks = j.value("checks", std::vector<std::string>{});
    validate(sc.domain);
    validate(sc.params);
    if (!(sc.h > 0.0)) throw ConfigError("h must be positive");
    if (!(sc.h0 > 0.0)) throw ConfigError("h0 must be positive");
    return sc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("scenario JSON: ") + e.what());
  } catch (const DegenerateDomain& e) {
    throw ConfigError(std::string("scenario domain: ") + e.what());
  }
}

//! Catalog name, or path to a JSON file.
inline Scenario load_scenario(const std::string& name_or_path) {
  for (const std::string& n : catalog_names())
    if (n == name_or_path) return build_scenario(n);
  if (!std::filesystem::is_regular_file(name_or_path))
    throw UnknownScenario("'" + name_or_path + "' is neither a catalog scenario nor a readable file");
  std::ifstream in(name_or_path);
  if (!in) throw ConfigError("cannot open " + name_or_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(name_or_path + ": " + e.what());
  }
  return scenario_from_json(j);
}

}  // namespace spiralflow

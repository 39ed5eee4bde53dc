#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spiralflow/analysis.hpp"
#include "spiralflow/extraction.hpp"
#include "spiralflow/geometry.hpp"
#include "spiralflow/io.hpp"
#include "spiralflow/run.hpp"
#include "spiralflow/scenarios.hpp"
#include "spiralflow/solver.hpp"

namespace spiralflow {

//! Geometric constants and forcing condition of a scenario; no time stepping.
struct StaticReport {
  double C0 = 0.0;
  double K0 = 0.0;
  double K0_numeric = 0.0;
  double forcing_margin = 0.0;
  std::optional<std::pair<double, double>> growth_bounds;
};

inline StaticReport static_report(const Scenario& sc) {
  validate(sc.domain);
  const Grid g = build_grid(sc.domain, sc.h);
  StaticReport r;
  r.C0 = compute_C0(sc.domain);
  r.K0 = compute_K0(sc.domain, sc.h);
  r.K0_numeric = compute_K0_numeric(sc.domain, 0.5 * sc.h, sc.h);
  r.forcing_margin = forcing_margin(sc.domain, g, sc.forcing, sc.forcing.gradient_sup());
  try {
    r.growth_bounds = growth_bounds(sc.domain, g, sc.forcing);
  } catch (const HypothesisViolated&) {
  }
  return r;
}

//! Everything reported for one run; optional values are null in summary.json.
struct Summary {
  std::string scenario;
  double h = 0.0;
  double epsilon = 0.0;
  double t_end = 0.0;
  StaticReport geometry;
  double M = 0.0;
  std::optional<double> Sc_slope;
  std::optional<double> Sc_fekete;
  std::optional<double> tip_rate;
  std::optional<double> S_over_T;
  std::vector<std::pair<std::string, bool>> checks;

  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.second; });
  }
};

inline nlohmann::ordered_json summary_json(const Summary& s) {
  using nlohmann::ordered_json;
  auto opt = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
  ordered_json j;
  j["scenario"] = s.scenario;
  j["h"] = s.h;
  j["epsilon"] = s.epsilon;
  j["t_end"] = s.t_end;
  j["C0"] = s.geometry.C0;
  j["K0"] = s.geometry.K0;
  j["K0_numeric"] = s.geometry.K0_numeric;
  j["M"] = s.M;
  j["forcing_margin"] = s.geometry.forcing_margin;
  j["growth_bounds"] = s.geometry.growth_bounds
                           ? ordered_json::array({s.geometry.growth_bounds->first, s.geometry.growth_bounds->second})
                           : ordered_json(nullptr);
  j["Sc_slope"] = opt(s.Sc_slope);
  j["Sc_fekete"] = opt(s.Sc_fekete);
  j["tip_rate"] = opt(s.tip_rate);
  j["S_over_T"] = opt(s.S_over_T);
  j["checks"] = ordered_json::object();
  for (const auto& [name, ok] : s.checks) j["checks"][name] = ok;
  return j;
}

struct ExecuteOptions {
  std::optional<std::filesystem::path> out_dir;  // write artifacts when set
  bool extract = true;                           // spiral extraction at every snapshot
  bool quiet = true;
};

struct RunOutcome {
  Scenario scenario;
  std::shared_ptr<const Problem> problem;
  RunResult result;
  std::vector<HeightMap> heights;   // one per snapshot
  std::vector<SpiralCurve> spirals; // all snapshots
  std::vector<double> spiral_times; // snapshot times whose extraction succeeded
  Summary summary;
};

//! Tolerances of the declared checks.
namespace tolerance {
constexpr double barrier = 1e-6;           // relative to 1 + M t
constexpr double growth_bounds = 0.3;
constexpr double radial_rate = 0.05;
constexpr double rotating_error = 0.08;
constexpr double rotation_hausdorff = 2.0;  // in units of h
constexpr double endpoint_distance = 1.5;   // in units of h
constexpr double inactive_rate = 0.1;
constexpr double plateau = 0.5;
constexpr double bounded_u_slack = 0.25;
constexpr double lipschitz_factor = 2.0;
}  // namespace tolerance

namespace detail {

inline double rotating_error(const RunOutcome& o) {
  const Scenario& sc = o.scenario;
  if (sc.forcing.kind() != Forcing::Kind::radial || !is_centered_annulus(sc.domain) ||
      sc.domain.holes[0].strength != 1)
    throw HypothesisViolated("rotating exact solution needs radial forcing on a centered annulus");
  AngularProfile g;
  if (sc.initial.kind() == InitialCondition::Kind::angular) g = sc.initial.profile();
  else if (sc.initial.kind() == InitialCondition::Kind::constant) g.offset = sc.initial.alpha();
  else throw HypothesisViolated("rotating exact solution needs an angular initial condition");
  const SolverState& st = o.result.final_state;
  const Grid& grid = o.problem->grid();
  double err = 0.0;
  for (int k : grid.interior)
    err = std::max(err, std::abs(st.u[k] - rotating_exact(g, sc.forcing.parameter(), grid.position(k), st.t)));
  return err;
}

inline std::vector<SpiralCurve> curves_at(const RunOutcome& o, double t) {
  std::vector<SpiralCurve> out;
  for (const SpiralCurve& c : o.spirals)
    if (c.t == t) out.push_back(c);
  return out;
}

inline std::vector<SpiralCurve> rotated(std::vector<SpiralCurve> curves, double angle) {
  for (SpiralCurve& c : curves)
    for (Vec2& x : c.points) x = rotate(x, angle);
  return curves;
}

inline bool evaluate_check(const std::string& name, const RunOutcome& o) {
  const Scenario& sc = o.scenario;
  const Diagnostics& diag = o.result.diagnostics;
  const auto& samples = diag.samples;
  const Summary& s = o.summary;
  const double T = sc.params.t_end;
  if (name == "barrier") {
    return std::all_of(samples.begin(), samples.end(),
                       [](const DiagnosticSample& d) { return d.barrier_excess <= tolerance::barrier; });
  }
  if (name == "growth_bounds") {
    if (!s.geometry.growth_bounds || !s.Sc_slope) return false;
    return *s.Sc_slope >= s.geometry.growth_bounds->first - tolerance::growth_bounds &&
           *s.Sc_slope <= s.geometry.growth_bounds->second + tolerance::growth_bounds;
  }
  if (name == "radial_growth_rate") {
    return s.Sc_slope && std::abs(*s.Sc_slope - sc.forcing.parameter()) <= tolerance::radial_rate;
  }
  if (name == "fekete_bound") {
    return s.Sc_fekete && *s.Sc_fekete >= sc.forcing.parameter() - tolerance::radial_rate;
  }
  if (name == "rotating_exact") return rotating_error(o) <= tolerance::rotating_error;
  if (name == "spiral_rotation") {
    if (o.spiral_times.size() < 2 || o.spiral_times.front() != 0.0) return false;
    const double t1 = o.spiral_times.back();
    const auto c0 = rotated(curves_at(o, 0.0), sc.forcing.parameter() * t1);
    const auto c1 = curves_at(o, t1);
    if (c0.empty() || c1.empty()) return false;
    return hausdorff_distance(c0, c1) <= tolerance::rotation_hausdorff * sc.h;
  }
  if (name == "spiral_endpoints") {
    for (const SpiralCurve& c : o.spirals) {
      if (c.closed) continue;
      for (Vec2 x : {c.points.front(), c.points.back()})
        if (std::abs(signed_distance(sc.domain, x)) > tolerance::endpoint_distance * sc.h) return false;
    }
    return true;
  }
  if (name == "forcing_margin_positive") return s.geometry.forcing_margin > 0.0;
  if (name == "lipschitz_bound") {
    double at_one = -1.0;
    for (const DiagnosticSample& d : samples)
      if (at_one < 0.0 && d.t >= 1.0) at_one = d.sup_grad;
    if (at_one < 0.0) return false;
    for (const DiagnosticSample& d : samples)
      if (d.t >= 1.0 && d.sup_grad > tolerance::lipschitz_factor * at_one) return false;
    return true;
  }
  if (name == "ut_bound") {
    return std::all_of(samples.begin(), samples.end(), [&](const DiagnosticSample& d) { return d.sup_ut <= diag.M; });
  }
  if (name == "bounded_u") {
    // A single-valued branch of theta has oscillation at most 2 pi on W; the
    // regularized speed adds at most c_max eps per unit time.
    const double drift = o.problem->c_max() * sc.params.epsilon;
    return std::all_of(samples.begin(), samples.end(), [&](const DiagnosticSample& d) {
      return d.S - drift * d.t <= diag.u0_sup + 2.0 * std::numbers::pi + tolerance::bounded_u_slack;
    });
  }
  if (name == "inactive_rate") return s.S_over_T && *s.S_over_T <= tolerance::inactive_rate;
  if (name == "plateau") {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const DiagnosticSample& d : samples) {
      if (d.t < 0.5 * T) continue;
      lo = std::min(lo, d.S);
      hi = std::max(hi, d.S);
    }
    return hi - lo <= tolerance::plateau;
  }
  if (name == "height_residual") {
    const Grid& g = o.problem->grid();
    const ScalarField& theta = o.problem->theta().principal();
    for (std::size_t n = 0; n < o.heights.size(); ++n) {
      const ScalarField& u = o.result.snapshots[n].u;
      for (int k : g.interior) {
        const double r = u[k] - theta[k] - 2.0 * std::numbers::pi * static_cast<double>(o.heights[n].k[k]);
        if (!(r >= -std::numbers::pi && r < std::numbers::pi)) return false;
      }
    }
    return true;
  }
  if (name == "height_sandwich") {
    double msum = 0.0;
    for (const Hole& hl : sc.domain.holes) msum += std::abs(hl.strength);
    const double C = (2.0 * std::numbers::pi + sc.h0) * (msum + 1.0);
    for (const DiagnosticSample& d : samples) {
      if (d.t <= 0.0) continue;
      if (std::abs(d.tip_height / d.t - sc.h0 / (2.0 * std::numbers::pi) * d.S / d.t) > C / d.t) return false;
    }
    return true;
  }
  throw ConfigError("unknown check '" + name + "'");
}

}  // namespace detail

inline std::string snapshot_name(const char* stem, std::size_t n) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04zu.vtk", stem, n);
  return buf;
}

//! Runs a scenario, computes heights, spirals and growth estimates, evaluates
//! its declared checks, and writes artifacts when an output directory is given.
inline RunOutcome execute(const Scenario& sc, const ExecuteOptions& opt = {}) {
  RunOutcome o;
  o.scenario = sc;
  o.summary.scenario = sc.name;
  o.summary.h = sc.h;
  o.summary.epsilon = sc.params.epsilon;
  o.summary.t_end = sc.params.t_end;
  o.summary.geometry = static_report(sc);
  if (opt.out_dir) ensure_directory(*opt.out_dir);

  o.problem = make_problem(sc.domain, sc.h, sc.forcing);
  SolverState st = make_state(o.problem, sc.initial, sc.params);
  o.summary.M = st.M;

  const Grid& g = o.problem->grid();
  const ThetaField& theta = o.problem->theta();
  RunOptions ro;
  ro.h0 = sc.h0;
  ro.on_snapshot = [&](const SolverState& s) {
    const std::size_t n = o.heights.size();
    o.heights.push_back(height(g, s.u, theta, sc.h0, s.t));
    if (opt.extract) {
      try {
        auto curves = extract_spirals(sc.domain, g, s.u, theta, s.t);
        o.spirals.insert(o.spirals.end(), curves.begin(), curves.end());
        o.spiral_times.push_back(s.t);
      } catch (const DegenerateLevelSet& e) {
        if (!opt.quiet) std::fprintf(stderr, "t=%g: spiral extraction skipped: %s\n", s.t, e.what());
      }
    }
    if (opt.out_dir) {
      write_text(*opt.out_dir / snapshot_name("snapshot", n), vtk_snapshot(g, s.u, theta, s.t));
      write_text(*opt.out_dir / snapshot_name("heights", n), vtk_heights(g, o.heights.back()));
    }
  };
  o.result = run(std::move(st), ro);

  const Diagnostics& diag = o.result.diagnostics;
  const double T = sc.params.t_end;
  if (T > 0.0) o.summary.S_over_T = diag.samples.back().S / T;
  try {
    const GrowthEstimate est = growth_rate(diag.growth());
    o.summary.Sc_slope = est.slope;
    o.summary.Sc_fekete = est.fekete;
  } catch (const InsufficientData&) {
  }
  try {
    std::vector<double> t, tip;
    for (const DiagnosticSample& d : diag.samples) {
      t.push_back(d.t);
      tip.push_back(d.tip_height);
    }
    o.summary.tip_rate = tip_growth_rate(t, tip);
  } catch (const InsufficientData&) {
  }
  for (const std::string& c : sc.checks) o.summary.checks.emplace_back(c, detail::evaluate_check(c, o));

  if (opt.out_dir) {
    write_text(*opt.out_dir / "diagnostics.csv", diagnostics_csv(diag));
    write_text(*opt.out_dir / "spirals.csv", spirals_csv(o.spirals));
    write_text(*opt.out_dir / "summary.json", summary_json(o.summary).dump(2) + "\n");
  }
  return o;
}

}  // namespace spiralflow

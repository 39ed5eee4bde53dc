#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spiralflow/analysis.hpp"
#include "spiralflow/extraction.hpp"
#include "spiralflow/io.hpp"
#include "spiralflow/runner.hpp"
#include "spiralflow/scenarios.hpp"
#include "spiralflow/solver.hpp"
#include "spiralflow/theta.hpp"

namespace spiralflow {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

inline std::string format_criterion(const CriterionResult& r) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%2d", r.id);
  return std::string(r.passed ? "[PASS] " : "[FAIL] ") + buf + " " + r.name + ": " + r.detail;
}

//! The analytic acceptance suite. Catalog runs are shared between criteria.
class AcceptanceSuite {
 public:
  explicit AcceptanceSuite(std::optional<std::filesystem::path> out_dir = std::nullopt)
      : out_dir_(std::move(out_dir)) {}

  //! Runs every criterion in order, calling `report` after each.
  std::vector<CriterionResult> run_all(const std::function<void(const CriterionResult&)>& report = {}) {
    std::vector<CriterionResult> out;
    const std::vector<std::function<CriterionResult()>> criteria = {
        [&] { return rotating_convergence(); }, [&] { return radial_growth(); },
        [&] { return growth_bounds_check(); }, [&] { return margin_arithmetic(); },
        [&] { return inactive_pair(); },       [&] { return barrier(); },
        [&] { return comparison(); },          [&] { return circulation_check(); },
        [&] { return heights(); },             [&] { return lipschitz(); },
        [&] { return extraction(); },          [&] { return determinism(); }};
    for (const auto& c : criteria) {
      CriterionResult r;
      try {
        r = c();
      } catch (const std::exception& e) {
        r.id = static_cast<int>(out.size()) + 1;
        r.name = "criterion";
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
      }
      if (report) report(r);
      out.push_back(std::move(r));
    }
    return out;
  }

  const RunOutcome& catalog_run(const std::string& name) {
    auto it = runs_.find(name);
    if (it != runs_.end()) return it->second;
    ExecuteOptions opt;
    if (out_dir_) opt.out_dir = *out_dir_ / name;
    return runs_.emplace(name, execute(build_scenario(name), opt)).first->second;
  }

  // 1. Rotating exact solution, convergence in h.
  CriterionResult rotating_convergence() {
    CriterionResult r{1, "rotating exact solution", false, ""};
    const double hs[] = {1.0 / 32, 1.0 / 64, 1.0 / 128};
    double err[3];
    for (int i = 0; i < 3; ++i) {
      if (i == 1) {
        err[i] = detail::rotating_error(catalog_run("annulus_rotating"));
        continue;
      }
      Scenario sc = build_scenario("annulus_rotating");
      sc.h = hs[i];
      err[i] = detail::rotating_error(execute(sc, {std::nullopt, false, true}));
    }
    const double order1 = std::log2(err[0] / err[1]);
    const double order2 = std::log2(err[1] / err[2]);
    r.passed = err[1] <= tolerance::rotating_error && order1 >= 0.7 && order2 >= 0.7;
    std::ostringstream ss;
    ss << "Linf error h=1/32: " << err[0] << ", h=1/64: " << err[1] << " (<= 0.08), h=1/128: " << err[2]
       << "; orders " << order1 << ", " << order2 << " (>= 0.7)";
    r.detail = ss.str();
    return r;
  }

  // 2. Radial forcing growth rate.
  CriterionResult radial_growth() {
    CriterionResult r{2, "radial forcing growth rate", false, ""};
    const Summary& s = catalog_run("annulus_radial").summary;
    const double slope = s.Sc_slope.value_or(std::nan(""));
    const double fekete = s.Sc_fekete.value_or(std::nan(""));
    r.passed = std::abs(slope - 1.0) <= 0.05 && fekete >= 0.95;
    std::ostringstream ss;
    ss << "Sc_slope=" << slope << " (|.-1| <= 0.05), Sc_fekete=" << fekete << " (>= 0.95)";
    r.detail = ss.str();
    return r;
  }

  // 3. Growth-rate bounds for constant forcing on the annulus.
  CriterionResult growth_bounds_check() {
    CriterionResult r{3, "growth-rate bounds", false, ""};
    const Summary& s = catalog_run("annulus_constant").summary;
    const double slope = s.Sc_slope.value_or(std::nan(""));
    const auto b = s.geometry.growth_bounds.value_or(std::pair{std::nan(""), std::nan("")});
    r.passed = slope >= 1.5 - 0.3 && slope <= 6.0 + 0.3 && b.first == 1.5 && b.second == 6.0;
    std::ostringstream ss;
    ss << "Sc_slope=" << slope << " in [1.2, 6.3]; growth_bounds=[" << b.first << ", " << b.second << "]";
    r.detail = ss.str();
    return r;
  }

  // 4. Forcing-margin arithmetic on the annulus R = 1, r = 0.5.
  CriterionResult margin_arithmetic() {
    CriterionResult r{4, "forcing-margin arithmetic", true, ""};
    DomainSpec d;
    d.outer_radius = 1.0;
    d.hole_radius = 0.5;
    d.holes = {{{0.0, 0.0}, 1}};
    const Grid g = build_grid(d, 0.05);
    std::ostringstream ss;
    for (auto [c, expected] : {std::pair{8.0, 0.0}, std::pair{9.0, 13.0}, std::pair{4.0, -32.0}}) {
      const Forcing f = Forcing::constant(c);
      const double m = forcing_margin(d, g, f, f.gradient_sup());
      r.passed = r.passed && std::abs(m - expected) <= 1e-10;
      ss << "c=" << c << ": " << m << " (expected " << expected << ") ";
    }
    r.detail = ss.str();
    return r;
  }

  // 5. Inactive pair: bounded growth.
  CriterionResult inactive_pair() {
    CriterionResult r{5, "inactive pair", false, ""};
    const RunOutcome& o = catalog_run("inactive_pair");
    const double T = o.scenario.params.t_end;
    double lo = INFINITY, hi = -INFINITY;
    for (const DiagnosticSample& d : o.result.diagnostics.samples) {
      if (d.t < 25.0) continue;
      lo = std::min(lo, d.S);
      hi = std::max(hi, d.S);
    }
    const double rate = o.result.diagnostics.samples.back().S / T;
    r.passed = T == 50.0 && rate <= 0.1 && hi - lo <= 0.5;
    std::ostringstream ss;
    ss << "S(T)/T=" << rate << " (<= 0.1), max-min of S on [25,50]=" << hi - lo << " (<= 0.5)";
    r.detail = ss.str();
    return r;
  }

  // 6. Barrier invariant in every catalog scenario.
  CriterionResult barrier() {
    CriterionResult r{6, "barrier invariant", true, ""};
    std::ostringstream ss;
    for (const std::string& name : catalog_names()) {
      const RunOutcome& o = catalog_run(name);
      double worst = -INFINITY;
      for (const DiagnosticSample& d : o.result.diagnostics.samples) worst = std::max(worst, d.barrier_excess);
      r.passed = r.passed && worst <= tolerance::barrier;
      ss << name << "=" << worst << " ";
    }
    r.detail = "max excess/(1+Mt): " + ss.str();
    return r;
  }

  // 7. Discrete comparison principle for the upwind scheme.
  CriterionResult comparison() {
    CriterionResult r{7, "comparison principle", true, ""};
    std::ostringstream ss;
    auto one = [&](const std::string& label, DomainSpec d, Forcing f) {
      auto pb = make_problem(std::move(d), 1.0 / 16.0, std::move(f));
      const Grid& g = pb->grid();
      ScalarField u0 = g.make_field<double>(), v0 = g.make_field<double>();
      for (int k : g.interior) {
        const Vec2 x = g.position(k);
        u0[k] = 0.3 * std::sin(x.x) + 0.2 * std::sin(1.7 * x.y);
        v0[k] = u0[k] + std::max(0.0, std::sin(2.0 * x.x) * std::cos(3.0 * x.y));
      }
      SolverParams p;
      p.scheme = Scheme::upwind_forcing;
      p.t_end = 1e9;
      SolverState a = make_state(pb, u0, p), b = make_state(pb, v0, p);
      double worst = 0.0;
      for (int n = 0; n < 500; ++n) {
        const double dt = std::min(stable_dt(a), stable_dt(b));
        step(a, dt);
        step(b, dt);
        for (int k : g.interior) worst = std::max(worst, a.u[k] - b.u[k]);
      }
      r.passed = r.passed && worst <= 1e-10;
      ss << label << " max(u-v)=" << worst << " ";
    };
    one("annulus", detail::annulus(2.0, 0.5), Forcing::radial(1.0));
    one("pair", detail::opposite_pair(2.0, 0.3, 0.8), Forcing::constant(3.0));
    r.detail = ss.str() + "over 500 steps at h=1/16 (<= 1e-10)";
    return r;
  }

  // 8. Circulation of D theta.
  CriterionResult circulation_check() {
    CriterionResult r{8, "circulation", true, ""};
    const std::vector<SpiralCenter> centers = {{{-0.8, 0.0}, 1}, {{0.8, 0.0}, -1}, {{0.0, 1.5}, 2}};
    double worst = 0.0;
    for (const SpiralCenter& c : centers) {
      const double got = circulation(centers, circle_loop(c.a, 0.3, 10000));
      worst = std::max(worst, std::abs(got - 2.0 * std::numbers::pi * c.m));
    }
    const double pair = circulation(centers, circle_loop({0.0, 0.0}, 1.2, 10000));
    const double empty = circulation(centers, circle_loop({0.0, -1.5}, 0.5, 10000));
    worst = std::max({worst, std::abs(pair), std::abs(empty)});
    r.passed = worst <= 1e-6;
    std::ostringstream ss;
    ss << "max deviation from 2 pi m_j (and 0 for a dipole loop and an empty loop)=" << worst << " (<= 1e-6)";
    r.detail = ss.str();
    return r;
  }

  // 9. Height reconstruction residual and tip sandwich in every catalog scenario.
  CriterionResult heights() {
    CriterionResult r{9, "height reconstruction", true, ""};
    std::ostringstream ss;
    for (const std::string& name : catalog_names()) {
      const RunOutcome& o = catalog_run(name);
      const bool residual = detail::evaluate_check("height_residual", o);
      const bool sandwich = detail::evaluate_check("height_sandwich", o);
      r.passed = r.passed && residual && sandwich;
      if (!residual || !sandwich) ss << name << (residual ? "" : " residual") << (sandwich ? "" : " sandwich") << " ";
    }
    r.detail = r.passed ? "residual in [-pi, pi) and sandwich bound hold in all catalog runs" : "failed: " + ss.str();
    return r;
  }

  // 10. Lipschitz regime.
  CriterionResult lipschitz() {
    CriterionResult r{10, "Lipschitz regime", false, ""};
    const RunOutcome& o = catalog_run("lipschitz_regime");
    double at_one = NAN, grad_max = 0.0, ut_ratio = 0.0;
    for (const DiagnosticSample& d : o.result.diagnostics.samples) {
      if (std::isnan(at_one) && d.t >= 1.0) at_one = d.sup_grad;
      if (d.t >= 1.0) grad_max = std::max(grad_max, d.sup_grad);
      ut_ratio = std::max(ut_ratio, d.sup_ut / o.result.diagnostics.M);
    }
    const double margin = o.summary.geometry.forcing_margin;
    r.passed = std::abs(margin - 28.0) <= 1e-10 && grad_max <= 2.0 * at_one && ut_ratio <= 1.0;
    std::ostringstream ss;
    ss << "margin=" << margin << ", max sup|Du| on [1,20]=" << grad_max << " vs 2x" << at_one
       << ", max sup|u_t|/M=" << ut_ratio;
    r.detail = ss.str();
    return r;
  }

  // 11. Spiral extraction on exact fields.
  CriterionResult extraction() {
    CriterionResult r{11, "spiral extraction", false, ""};
    const DomainSpec d = detail::annulus(2.0, 0.5);
    // u = 0 with one center: the segment from (r, 0) to (R, 0).
    const double h1 = 0.05;
    auto pb = make_problem(d, h1, Forcing::constant(1.0));
    const auto flat = extract_spirals(d, pb->grid(), pb->grid().make_field<double>(0.0), pb->theta());
    const std::vector<SpiralCurve> segment = {{{{0.5, 0.0}, {2.0, 0.0}}, 0.0, false}};
    std::vector<SpiralCurve> dense = segment;
    dense[0].points.clear();
    for (int i = 0; i <= 1500; ++i) dense[0].points.push_back({0.5 + 1.5 * i / 1500.0, 0.0});
    const double d1 = std::max(hausdorff_distance(flat, segment), hausdorff_distance(flat, dense));

    // Rotating exact solution sampled on the grid at t = 0 and t = 1.
    const double h2 = 1.0 / 64.0;
    const AngularProfile g{0.0, {0.3, 0.0}};
    auto pb2 = make_problem(d, h2, Forcing::radial(1.0));
    const Grid& grid = pb2->grid();
    auto sample = [&](double t) {
      ScalarField u = grid.make_field<double>();
      for (int k = 0; k < static_cast<int>(grid.size()); ++k)
        if (grid.has_value(k)) u[k] = rotating_exact(g, 1.0, grid.position(k), t);
      return extract_spirals(d, grid, u, pb2->theta(), t);
    };
    const auto c0 = detail::rotated(sample(0.0), 1.0);
    const auto c1 = sample(1.0);
    const double d2 = hausdorff_distance(c0, c1);
    r.passed = !flat.empty() && d1 <= h1 && !c1.empty() && d2 <= 2.0 * h2;
    std::ostringstream ss;
    ss << "segment Hausdorff=" << d1 << " (<= h=" << h1 << "), rotated Hausdorff=" << d2 << " (<= 2h=" << 2.0 * h2
       << ")";
    r.detail = ss.str();
    return r;
  }

  // 12. Determinism of the diagnostics output.
  CriterionResult determinism() {
    CriterionResult r{12, "determinism", true, ""};
    std::ostringstream ss;
    for (const char* name : {"annulus_constant", "lipschitz_regime"}) {
      const std::string first = diagnostics_csv(catalog_run(name).result.diagnostics);
      const std::string again = diagnostics_csv(execute(build_scenario(name), {std::nullopt, false, true}).result.diagnostics);
      const bool same = first == again;
      r.passed = r.passed && same;
      ss << name << (same ? " identical" : " DIFFERS") << " (" << first.size() << " bytes) ";
    }
    r.detail = "diagnostics.csv reruns: " + ss.str();
    return r;
  }

 private:
  std::optional<std::filesystem::path> out_dir_;
  std::map<std::string, RunOutcome> runs_;
};

}  // namespace spiralflow

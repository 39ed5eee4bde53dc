#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "spiralflow/errors.hpp"
#include "spiralflow/field.hpp"
#include "spiralflow/forcing.hpp"
#include "spiralflow/geometry.hpp"
#include "spiralflow/solver.hpp"
#include "spiralflow/theta.hpp"

namespace spiralflow {

//! k with -pi <= u - Theta - 2 pi k < pi.
inline long long winding_number(double u, double Theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double diff = u - Theta;
  auto k = static_cast<long long>(std::floor((diff + std::numbers::pi) / two_pi));
  // floor() can land one off when the residual sits on a rounding edge.
  while (diff - two_pi * static_cast<double>(k) >= std::numbers::pi) ++k;
  while (diff - two_pi * static_cast<double>(k) < -std::numbers::pi) --k;
  return k;
}

//! (h0 / 2 pi) [Theta + 2 pi k + pi sign(u - Theta - 2 pi k)] with sign(0) = +1.
inline double crystal_height(double u, double Theta, double h0) {
  const long long k = winding_number(u, Theta);
  const double base = Theta + 2.0 * std::numbers::pi * static_cast<double>(k);
  const double sign = (u - base) < 0.0 ? -1.0 : 1.0;
  return h0 / (2.0 * std::numbers::pi) * (base + std::numbers::pi * sign);
}

inline IntField winding_index(const Grid& g, const ScalarField& u, const ThetaField& theta) {
  IntField k = g.make_field<long long>(0);
  for (int n : g.interior) k[n] = winding_number(u[n], theta.principal()[n]);
  return k;
}

//! Crystal height reconstructed from u on the nodes of W.
struct HeightMap {
  IntField k;
  ScalarField height;
  double h0 = 1.0;
  double t = 0.0;
  double max_height = -std::numeric_limits<double>::infinity();
};

inline HeightMap height(const Grid& g, const ScalarField& u, const ThetaField& theta, double h0,
                        double t = 0.0) {
  HeightMap hm;
  hm.k = winding_index(g, u, theta);
  hm.height = g.make_field<double>(0.0);
  hm.h0 = h0;
  hm.t = t;
  for (int n : g.interior) {
    hm.height[n] = crystal_height(u[n], theta.principal()[n], h0);
    hm.max_height = std::max(hm.max_height, hm.height[n]);
  }
  return hm;
}

inline double max_height(const Grid& g, const ScalarField& u, const ThetaField& theta, double h0) {
  double best = -std::numeric_limits<double>::infinity();
  for (int n : g.interior) best = std::max(best, crystal_height(u[n], theta.principal()[n], h0));
  return best;
}

//! Samples (t, S(t)) of the running maximum of u.
struct GrowthSeries {
  std::vector<double> t;
  std::vector<double> S;
  double u0_sup = 0.0;
};

struct GrowthEstimate {
  double slope = 0.0;   // least-squares slope over the final half of the series
  double fekete = 0.0;  // min_t (S(t) + |u0|_inf) / t, an upper bound for the growth rate
};

//! Least-squares slope of y(t) over the samples with t >= t_last / 2.
inline double final_half_slope(std::span<const double> t, std::span<const double> y) {
  if (t.size() < 2 || t.size() != y.size()) throw InsufficientData("need at least two samples");
  const double t_half = 0.5 * t.back();
  std::size_t first = 0;
  while (first < t.size() && t[first] < t_half) ++first;
  first = std::min(first, t.size() - 2);
  const std::size_t n = t.size() - first;
  double tm = 0.0, ym = 0.0;
  for (std::size_t i = first; i < t.size(); ++i) {
    tm += t[i];
    ym += y[i];
  }
  tm /= static_cast<double>(n);
  ym /= static_cast<double>(n);
  double sty = 0.0, stt = 0.0;
  for (std::size_t i = first; i < t.size(); ++i) {
    sty += (t[i] - tm) * (y[i] - ym);
    stt += (t[i] - tm) * (t[i] - tm);
  }
  if (!(stt > 0.0)) throw InsufficientData("samples do not span a time interval");
  return sty / stt;
}

inline GrowthEstimate growth_rate(const GrowthSeries& s) {
  if (s.t.size() < 2 || s.t.size() != s.S.size()) throw InsufficientData("need at least two samples");
  if (s.t.back() < 1.0) throw InsufficientData("series must reach t >= 1");
  GrowthEstimate est;
  est.slope = final_half_slope(s.t, s.S);
  est.fekete = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.t.size(); ++i)
    if (s.t[i] > 0.0) est.fekete = std::min(est.fekete, (s.S[i] + s.u0_sup) / s.t[i]);
  return est;
}

//! (min, max) of c(x)/|x| over W for the centered annulus with one unit spiral.
//! Grid nodes of W plus samples on both circles (at their exact radii).
template <class ForcingFn>
std::pair<double, double> growth_bounds(const DomainSpec& d, const Grid& g, const ForcingFn& c) {
  if (d.holes.size() != 1 || d.holes[0].strength != 1 || !is_centered_annulus(d))
    throw HypothesisViolated("growth bounds need a single unit spiral at the center of an annulus");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  auto take = [&](double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  };
  for (int k : g.interior) {
    const Vec2 x = g.position(k);
    take(c(x) / norm(x));
  }
  for (double rho : {d.hole_radius, d.outer_radius}) {
    const int count = std::max(64, static_cast<int>(std::ceil(2 * std::numbers::pi * rho / g.h)));
    for (int s = 0; s < count; ++s) {
      const double phi = 2 * std::numbers::pi * s / count;
      take(c(rho * Vec2{std::cos(phi), std::sin(phi)}) / rho);
    }
  }
  return {lo, hi};
}

//! sup over interior nodes of | -w (div(D(v-theta)/w) + c) + S_c | for v = u - S_c t.
//! The operator sees only derivatives of v, so this is sup |rhs(u) - S_c|.
inline double ergodic_residual(const SolverState& st, double sc_estimate) {
  std::vector<double> r;
  detail::evaluate(st, r);
  double res = 0.0;
  for (double v : r) res = std::max(res, std::abs(v - sc_estimate));
  return res;
}

//! Slope of the tip height max_W h(., t) (final-half least squares).
inline double tip_growth_rate(std::span<const double> t, std::span<const double> tip) {
  if (t.size() < 2) throw InsufficientData("need at least two height snapshots");
  return final_half_slope(t, tip);
}

inline double tip_growth_rate(std::span<const HeightMap> heights) {
  std::vector<double> t, tip;
  for (const HeightMap& hm : heights) {
    t.push_back(hm.t);
    tip.push_back(hm.max_height);
  }
  return tip_growth_rate(t, tip);
}

}  // namespace spiralflow

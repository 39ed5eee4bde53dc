#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <sstream>
#include <vector>

#include "spiralflow/errors.hpp"
#include "spiralflow/field.hpp"
#include "spiralflow/geometry.hpp"
#include "spiralflow/vec2.hpp"

namespace spiralflow {

//! Screw dislocation at `a` with net strength m (counterclockwise minus clockwise spirals).
struct SpiralCenter {
  Vec2 a;
  int m = 1;
};

inline std::vector<SpiralCenter> centers_of(const DomainSpec& d) {
  std::vector<SpiralCenter> out;
  out.reserve(d.holes.size());
  for (const Hole& h : d.holes) out.push_back({h.center, h.strength});
  return out;
}

//! Symmetric 2x2 matrix (xx, xy, yy).
struct Sym2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;
};

namespace detail {

constexpr double kSingularRadius = 1e-12;

inline void check_regular(Vec2 x, const SpiralCenter& c) {
  if (distance(x, c.a) < kSingularRadius) {
    std::ostringstream ss;
    ss << "point (" << x.x << ", " << x.y << ") coincides with a spiral center";
    throw SingularPoint(ss.str());
  }
}

}  // namespace detail

//! D theta(x) = sum_j m_j (x - a_j)^perp / |x - a_j|^2.
inline Vec2 grad_theta(Vec2 x, std::span<const SpiralCenter> centers) {
  Vec2 g;
  for (const SpiralCenter& c : centers) {
    detail::check_regular(x, c);
    const Vec2 v = x - c.a;
    g += (c.m / norm2(v)) * perp(v);
  }
  return g;
}

//! Hessian of theta (harmonic, so xx = -yy).
inline Sym2 hess_theta(Vec2 x, std::span<const SpiralCenter> centers) {
  Sym2 hs;
  for (const SpiralCenter& c : centers) {
    detail::check_regular(x, c);
    const Vec2 v = x - c.a;
    const double r4 = norm2(v) * norm2(v);
    hs.xx += 2.0 * c.m * v.x * v.y / r4;
    hs.yy -= 2.0 * c.m * v.x * v.y / r4;
    hs.xy += c.m * (v.y * v.y - v.x * v.x) / r4;
  }
  return hs;
}

//! arg(x - a) lifted to [0, 2 pi).
inline double principal_arg(Vec2 x, Vec2 a) {
  double phi = std::atan2(x.y - a.y, x.x - a.x);
  if (phi < 0.0) phi += 2.0 * std::numbers::pi;
  if (phi >= 2.0 * std::numbers::pi) phi = 0.0;
  return phi;
}

//! Theta(x) = sum_j m_j Theta_j(x) with each Theta_j in [0, 2 pi). No final wrapping.
inline double principal_theta(Vec2 x, std::span<const SpiralCenter> centers) {
  double th = 0.0;
  for (const SpiralCenter& c : centers) {
    detail::check_regular(x, c);
    th += c.m * principal_arg(x, c.a);
  }
  return th;
}

//! Closed polyline: the last point connects back to the first.
using Loop = std::vector<Vec2>;

inline Loop circle_loop(Vec2 center, double radius, int segments) {
  Loop loop(segments);
  for (int k = 0; k < segments; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / segments;
    loop[k] = center + radius * Vec2{std::cos(phi), std::sin(phi)};
  }
  return loop;
}

//! Midpoint-rule line integral of D theta around a closed polyline.
inline double circulation(std::span<const SpiralCenter> centers, const Loop& loop) {
  const std::size_t n = loop.size();
  if (n < 3) throw ConfigError("loop needs at least three points");
  double total = 0.0;
  double comp = 0.0;  // Kahan compensation
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 p = loop[k];
    const Vec2 q = loop[(k + 1) % n];
    const Vec2 mid = 0.5 * (p + q);
    const double seg = distance(p, q);
    for (const SpiralCenter& c : centers) {
      if (distance(mid, c.a) < seg) throw SingularPoint("loop passes too close to a spiral center");
    }
    const double term = dot(grad_theta(mid, centers), q - p) - comp;
    const double sum = total + term;
    comp = (sum - total) - term;
    total = sum;
  }
  return total;
}

//! Theta and its derivatives cached at every node that carries a value.
class ThetaField {
 public:
  ThetaField() = default;
  ThetaField(const Grid& g, std::vector<SpiralCenter> centers)
      : centers_(std::move(centers)),
        principal_(g.make_field<double>()),
        gx_(g.make_field<double>()),
        gy_(g.make_field<double>()) {
    for (int k = 0; k < static_cast<int>(g.size()); ++k) {
      if (!g.has_value(k)) continue;
      const Vec2 x = g.position(k);
      principal_[k] = principal_theta(x, centers_);
      const Vec2 d = grad_theta(x, centers_);
      gx_[k] = d.x;
      gy_[k] = d.y;
    }
  }

  std::span<const SpiralCenter> centers() const { return centers_; }
  const ScalarField& principal() const { return principal_; }
  Vec2 grad(int k) const { return {gx_[k], gy_[k]}; }
  Vec2 grad(Vec2 x) const { return grad_theta(x, centers_); }
  Sym2 hess(Vec2 x) const { return hess_theta(x, centers_); }
  double principal(Vec2 x) const { return principal_theta(x, centers_); }

 private:
  std::vector<SpiralCenter> centers_;
  ScalarField principal_;
  ScalarField gx_;
  ScalarField gy_;
};

}  // namespace spiralflow

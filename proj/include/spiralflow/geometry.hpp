#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "spiralflow/errors.hpp"
#include "spiralflow/field.hpp"
#include "spiralflow/vec2.hpp"

namespace spiralflow {

//! Spiral center carried by a removed disk B(center, r).
struct Hole {
  Vec2 center;
  int strength = 1;
};

//! Extra excluded region: the set of points within `radius` of segment [a, b].
//! A capsule with a == b is a disk. Used for strips joining holes and for
//! notches cut into the outer disk.
struct Capsule {
  Vec2 a;
  Vec2 b;
  double radius = 0.0;
};

//! W = B(0, R) minus the closed-off holes B(a_j, r) minus the capsule masks.
struct DomainSpec {
  double outer_radius = 1.0;
  double hole_radius = 0.1;
  std::vector<Hole> holes;
  std::vector<Capsule> masks;
};

inline void validate(const DomainSpec& d) {
  auto fail = [](const std::string& what) { throw DegenerateDomain(what); };
  if (!(d.outer_radius > 0.0)) fail("outer radius must be positive");
  if (!(d.hole_radius > 0.0)) fail("hole radius must be positive");
  if (d.holes.empty()) fail("at least one spiral center is required");
  for (std::size_t j = 0; j < d.holes.size(); ++j) {
    const Hole& hj = d.holes[j];
    if (hj.strength == 0) fail("spiral strength must be nonzero");
    if (!(norm(hj.center) + d.hole_radius < d.outer_radius)) {
      std::ostringstream ss;
      ss << "hole " << j << " is not contained in the outer disk";
      fail(ss.str());
    }
    for (std::size_t k = j + 1; k < d.holes.size(); ++k) {
      if (!(distance(hj.center, d.holes[k].center) > 2.0 * d.hole_radius)) {
        std::ostringstream ss;
        ss << "holes " << j << " and " << k << " overlap";
        fail(ss.str());
      }
    }
  }
  for (const Capsule& m : d.masks) {
    if (!(m.radius > 0.0)) fail("mask radius must be positive");
  }
}

enum class PieceKind : std::uint8_t { outer, hole, mask };

//! One of the smooth curves whose union contains the boundary of W.
struct BoundaryPiece {
  PieceKind kind = PieceKind::outer;
  int index = 0;
  friend bool operator==(BoundaryPiece, BoundaryPiece) = default;
};

namespace detail {

inline Vec2 closest_on_segment(Vec2 a, Vec2 b, Vec2 x) {
  const Vec2 ab = b - a;
  const double len2 = norm2(ab);
  if (len2 == 0.0) return a;
  const double s = std::clamp(dot(x - a, ab) / len2, 0.0, 1.0);
  return a + s * ab;
}

inline std::vector<BoundaryPiece> pieces(const DomainSpec& d) {
  std::vector<BoundaryPiece> out;
  out.push_back({PieceKind::outer, 0});
  for (int j = 0; j < static_cast<int>(d.holes.size()); ++j) out.push_back({PieceKind::hole, j});
  for (int k = 0; k < static_cast<int>(d.masks.size()); ++k) out.push_back({PieceKind::mask, k});
  return out;
}

}  // namespace detail

//! Signed distance to one piece, positive on the side where W lies.
inline double piece_signed_distance(const DomainSpec& d, BoundaryPiece p, Vec2 x) {
  switch (p.kind) {
    case PieceKind::outer:
      return d.outer_radius - norm(x);
    case PieceKind::hole:
      return distance(x, d.holes[p.index].center) - d.hole_radius;
    case PieceKind::mask: {
      const Capsule& m = d.masks[p.index];
      return distance(x, detail::closest_on_segment(m.a, m.b, x)) - m.radius;
    }
  }
  return 0.0;
}

//! Signed distance to the boundary of W: positive inside W. Exact for points of
//! W; for points outside W it is the (negative) depth inside the deepest piece.
inline double signed_distance(const DomainSpec& d, Vec2 x) {
  double sd = d.outer_radius - norm(x);
  for (const Hole& hj : d.holes) sd = std::min(sd, distance(x, hj.center) - d.hole_radius);
  for (const Capsule& m : d.masks)
    sd = std::min(sd, distance(x, detail::closest_on_segment(m.a, m.b, x)) - m.radius);
  return sd;
}

inline bool contains(const DomainSpec& d, Vec2 x) { return signed_distance(d, x) >= 0.0; }

//! Closest point of a boundary piece together with the outward unit normal of W there.
struct BoundaryFoot {
  BoundaryPiece piece;
  Vec2 point;
  Vec2 normal;
  double distance = 0.0;
};

//! Projection of x onto the curve of piece `p`; nullopt when the direction is undefined.
inline std::optional<BoundaryFoot> project_to_piece(const DomainSpec& d, BoundaryPiece p, Vec2 x) {
  BoundaryFoot f;
  f.piece = p;
  switch (p.kind) {
    case PieceKind::outer: {
      const double rho = norm(x);
      if (rho == 0.0) return std::nullopt;
      f.normal = x / rho;
      f.point = d.outer_radius * f.normal;
      break;
    }
    case PieceKind::hole: {
      const Vec2 v = x - d.holes[p.index].center;
      const double rho = norm(v);
      if (rho == 0.0) return std::nullopt;
      f.point = d.holes[p.index].center + (d.hole_radius / rho) * v;
      f.normal = -(v / rho);
      break;
    }
    case PieceKind::mask: {
      const Capsule& m = d.masks[p.index];
      const Vec2 cp = detail::closest_on_segment(m.a, m.b, x);
      const Vec2 v = x - cp;
      const double rho = norm(v);
      if (rho == 0.0) return std::nullopt;
      f.point = cp + (m.radius / rho) * v;
      f.normal = -(v / rho);
      break;
    }
  }
  f.distance = distance(x, f.point);
  return f;
}

//! Nearest point of the boundary of W among the piece projections that actually
//! lie on the boundary (not swallowed by another excluded region).
inline std::optional<BoundaryFoot> nearest_boundary(const DomainSpec& d, Vec2 x) {
  const double tol = 1e-9 * std::max(1.0, d.outer_radius);
  std::optional<BoundaryFoot> best;
  for (BoundaryPiece p : detail::pieces(d)) {
    auto f = project_to_piece(d, p, x);
    if (!f) continue;
    if (signed_distance(d, f->point) < -tol) continue;
    if (!best || f->distance < best->distance) best = f;
  }
  return best;
}

//! Outward unit normal of W at a boundary point x (within `tolerance` of the boundary).
inline Vec2 outward_normal(const DomainSpec& d, Vec2 x, double tolerance) {
  if (std::abs(signed_distance(d, x)) > tolerance) {
    std::ostringstream ss;
    ss << "point (" << x.x << ", " << x.y << ") is farther than " << tolerance
       << " from the boundary";
    throw NotOnBoundary(ss.str());
  }
  auto f = nearest_boundary(d, x);
  if (!f || f->distance > tolerance) throw NotOnBoundary("no boundary piece near point");
  return f->normal;
}

enum class NodeKind : std::uint8_t { interior, outer_boundary, hole_boundary, mask_boundary, exterior };

//! Ghost node outside W (within two cells of the boundary) together with the
//! data of its Neumann reflection: u_g = sum w_k u[stencil_k] + d * (Dtheta(foot) . n).
struct GhostNode {
  int node = 0;
  BoundaryFoot foot;
  double mirror_distance = 0.0;
  std::array<int, 4> stencil{};
  std::array<double, 4> weights{};
  int stencil_size = 0;
};

//! Uniform node-centred grid on [-n h, n h]^2 masked to W.
class Grid {
 public:
  double h = 0.0;
  int half = 0;  // nodes run over i, j in [0, 2*half]
  int nx = 0;    // node counts (cells = nodes - 1)
  int ny = 0;
  Vec2 origin;
  std::vector<NodeKind> kind;
  std::vector<int> piece_index;   // hole or mask index of ghost nodes, -1 otherwise
  std::vector<int> interior;      // indices of nodes in the closure of W
  std::vector<GhostNode> ghosts;
  std::vector<int> ghost_slot;    // node -> position in `ghosts`, -1 if not a ghost

  std::size_t size() const { return kind.size(); }
  int index(int i, int j) const { return j * nx + i; }
  int col(int k) const { return k % nx; }
  int row(int k) const { return k / nx; }
  Vec2 position(int i, int j) const { return {(i - half) * h, (j - half) * h}; }
  Vec2 position(int k) const { return position(col(k), row(k)); }
  bool is_interior(int k) const { return kind[k] == NodeKind::interior; }
  bool is_ghost(int k) const {
    return kind[k] != NodeKind::interior && kind[k] != NodeKind::exterior;
  }
  bool has_value(int k) const { return kind[k] != NodeKind::exterior; }

  //! Node nearest to a point (clamped to the grid).
  int nearest_node(Vec2 x) const {
    const int i = std::clamp(static_cast<int>(std::lround(x.x / h)) + half, 0, nx - 1);
    const int j = std::clamp(static_cast<int>(std::lround(x.y / h)) + half, 0, ny - 1);
    return index(i, j);
  }

  template <class T>
  NodeField<T> make_field(T init = T{}) const {
    return NodeField<T>(nx, ny, init);
  }
};

namespace detail {

inline NodeKind ghost_kind(PieceKind k) {
  switch (k) {
    case PieceKind::outer: return NodeKind::outer_boundary;
    case PieceKind::hole: return NodeKind::hole_boundary;
    case PieceKind::mask: return NodeKind::mask_boundary;
  }
  return NodeKind::exterior;
}

// Bilinear stencil at x using only interior nodes; false if a corner is not interior.
inline bool interior_bilinear(const Grid& g, Vec2 x, std::array<int, 4>& idx,
                              std::array<double, 4>& w) {
  const double fi = x.x / g.h + g.half;
  const double fj = x.y / g.h + g.half;
  const int i0 = static_cast<int>(std::floor(fi));
  const int j0 = static_cast<int>(std::floor(fj));
  if (i0 < 0 || j0 < 0 || i0 + 1 >= g.nx || j0 + 1 >= g.ny) return false;
  const double fx = fi - i0;
  const double fy = fj - j0;
  idx = {g.index(i0, j0), g.index(i0 + 1, j0), g.index(i0, j0 + 1), g.index(i0 + 1, j0 + 1)};
  w = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
  for (int k : idx)
    if (!g.is_interior(k)) return false;
  return true;
}

}  // namespace detail

//! Builds the masked grid. Requires h < r/4 (and h < radius/4 for each mask).
inline Grid build_grid(const DomainSpec& d, double h) {
  validate(d);
  if (!(h > 0.0)) throw ConfigError("grid spacing must be positive");
  if (!(h < d.hole_radius / 4.0)) {
    std::ostringstream ss;
    ss << "grid spacing " << h << " resolves the hole radius " << d.hole_radius
       << " with fewer than 4 cells";
    throw HoleTooSmall(ss.str());
  }
  for (const Capsule& m : d.masks)
    if (!(h < m.radius / 4.0)) throw HoleTooSmall("grid spacing too coarse for a mask radius");

  Grid g;
  g.h = h;
  g.half = static_cast<int>(std::ceil(d.outer_radius / h)) + 2;
  g.nx = g.ny = 2 * g.half + 1;
  g.origin = g.position(0, 0);
  const std::size_t n = static_cast<std::size_t>(g.nx) * g.ny;
  g.kind.assign(n, NodeKind::exterior);
  g.piece_index.assign(n, -1);
  g.ghost_slot.assign(n, -1);

  std::vector<BoundaryFoot> feet(n);
  for (int k = 0; k < static_cast<int>(n); ++k) {
    const Vec2 x = g.position(k);
    const double sd = signed_distance(d, x);
    if (sd >= 0.0) {
      g.kind[k] = NodeKind::interior;
      g.interior.push_back(k);
    } else if (sd >= -2.0 * h) {
      auto f = nearest_boundary(d, x);
      if (f && f->distance <= 2.0 * h + 1e-12) {
        g.kind[k] = detail::ghost_kind(f->piece.kind);
        if (f->piece.kind != PieceKind::outer) g.piece_index[k] = f->piece.index;
        feet[k] = *f;
      }
    }
  }

  for (int k = 0; k < static_cast<int>(n); ++k) {
    if (!g.is_ghost(k)) continue;
    GhostNode gn;
    gn.node = k;
    gn.foot = feet[k];
    const double depth = gn.foot.distance;
    bool found = false;
    // Symmetric reflection first; slide the mirror inward until its cell is fully interior.
    for (int step = 0; step <= 12 && !found; ++step) {
      const double s = depth + 0.25 * h * step;
      const Vec2 xm = gn.foot.point - s * gn.foot.normal;
      if (detail::interior_bilinear(g, xm, gn.stencil, gn.weights)) {
        gn.stencil_size = 4;
        gn.mirror_distance = depth + s;
        found = true;
      }
    }
    if (!found) {
      // Nearest interior node in a 7x7 neighbourhood, offset measured along the normal.
      const Vec2 x = g.position(k);
      double best = std::numeric_limits<double>::infinity();
      const int ci = g.col(k), cj = g.row(k);
      for (int dj = -3; dj <= 3; ++dj) {
        for (int di = -3; di <= 3; ++di) {
          const int i = ci + di, j = cj + dj;
          if (i < 0 || j < 0 || i >= g.nx || j >= g.ny) continue;
          const int m = g.index(i, j);
          if (!g.is_interior(m)) continue;
          const double dist = distance(x, g.position(m));
          if (dist < best) {
            best = dist;
            gn.stencil = {m, 0, 0, 0};
            gn.weights = {1.0, 0.0, 0.0, 0.0};
            gn.stencil_size = 1;
            gn.mirror_distance = std::max(0.0, dot(x - g.position(m), gn.foot.normal));
          }
        }
      }
      if (gn.stencil_size == 0) throw NumericalFailure("ghost node without interior neighbour");
    }
    g.ghost_slot[k] = static_cast<int>(g.ghosts.size());
    g.ghosts.push_back(gn);
  }
  return g;
}

//! Maximal negative curvature of the boundary of W. The outer circle is convex
//! (curvature 1/R, contributing -1/R); holes and mask end caps curve around W.
inline double compute_C0(const DomainSpec& d) {
  double c0 = std::max(-1.0 / d.outer_radius, 1.0 / d.hole_radius);
  for (const Capsule& m : d.masks) c0 = std::max(c0, 1.0 / m.radius);
  return c0;
}

//! Point of the boundary of W with its outward normal.
struct BoundarySample {
  BoundaryPiece piece;
  Vec2 point;
  Vec2 normal;
};

//! Samples the boundary of W with spacing at most `spacing`, keeping only points
//! that are on the boundary (not covered by another excluded region).
inline std::vector<BoundarySample> boundary_samples(const DomainSpec& d, double spacing) {
  const double tol = 1e-9 * std::max(1.0, d.outer_radius);
  std::vector<BoundarySample> out;
  auto push = [&](BoundaryPiece p, Vec2 x, Vec2 n) {
    if (std::abs(signed_distance(d, x)) <= tol) out.push_back({p, x, n});
  };
  auto circle = [&](BoundaryPiece p, Vec2 c, double rad, double sign) {
    const int count = std::max(8, static_cast<int>(std::ceil(2 * std::numbers::pi * rad / spacing)));
    for (int k = 0; k < count; ++k) {
      const double phi = 2 * std::numbers::pi * k / count;
      const Vec2 e{std::cos(phi), std::sin(phi)};
      push(p, c + rad * e, sign * e);
    }
  };
  circle({PieceKind::outer, 0}, {}, d.outer_radius, 1.0);
  for (int j = 0; j < static_cast<int>(d.holes.size()); ++j)
    circle({PieceKind::hole, j}, d.holes[j].center, d.hole_radius, -1.0);
  for (int k = 0; k < static_cast<int>(d.masks.size()); ++k) {
    const Capsule& m = d.masks[k];
    const BoundaryPiece p{PieceKind::mask, k};
    const Vec2 ab = m.b - m.a;
    const double len = norm(ab);
    if (len == 0.0) {
      circle(p, m.a, m.radius, -1.0);
      continue;
    }
    const Vec2 t = ab / len;
    const Vec2 nrm = perp(t);
    const int count = std::max(2, static_cast<int>(std::ceil(len / spacing)));
    for (int s = 0; s <= count; ++s) {
      const Vec2 c = m.a + (len * s / count) * t;
      push(p, c + m.radius * nrm, -nrm);
      push(p, c - m.radius * nrm, nrm);
    }
    // End caps: half circles facing away from the segment.
    const int caps = std::max(4, static_cast<int>(std::ceil(std::numbers::pi * m.radius / spacing)));
    for (int s = 0; s <= caps; ++s) {
      const double phi = std::numbers::pi * s / caps - std::numbers::pi / 2;
      const Vec2 eb = rotate(t, phi);
      push(p, m.b + m.radius * eb, -eb);
      push(p, m.a - m.radius * eb, eb);
    }
  }
  return out;
}

//! Diameter of the largest ball inside W tangent to the boundary at every
//! sampled boundary point (minimum over samples). Bisection on the radius with
//! the exact interior distance `signed_distance`.
inline double compute_K0_numeric(const DomainSpec& d, double sample_spacing, double h) {
  validate(d);
  if (!(sample_spacing > 0.0) || sample_spacing > h) {
    std::ostringstream ss;
    ss << "boundary sample spacing " << sample_spacing << " exceeds grid spacing " << h;
    throw NumericalFailure(ss.str());
  }
  double min_radius = std::numeric_limits<double>::infinity();
  for (const BoundarySample& s : boundary_samples(d, sample_spacing)) {
    auto fits = [&](double rho) {
      return signed_distance(d, s.point - rho * s.normal) >= rho * (1.0 - 1e-12) - 1e-13;
    };
    double lo = 0.0, hi = d.outer_radius;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (fits(mid) ? lo : hi) = mid;
    }
    min_radius = std::min(min_radius, lo);
  }
  if (!std::isfinite(min_radius)) throw NumericalFailure("no boundary samples");
  return 2.0 * min_radius;
}

//! True for the annulus B(0,R) \ B(0,r) with a single centered hole and no masks.
inline bool is_centered_annulus(const DomainSpec& d) {
  return d.holes.size() == 1 && d.masks.empty() && d.holes[0].center == Vec2{};
}

//! Interior tangent-ball diameter: R - r in closed form for the centered annulus,
//! otherwise the numeric value with samples at half the given spacing.
inline double compute_K0(const DomainSpec& d, double h) {
  validate(d);
  if (is_centered_annulus(d)) return d.outer_radius - d.hole_radius;
  return compute_K0_numeric(d, 0.5 * h, h);
}

//! min over the nodes of W of c^2 - 2|Dc| - 2 C0 c - 8 C0 / K0. Positive means the
//! uniform Lipschitz forcing condition holds with delta equal to the margin.
template <class Forcing>
double forcing_margin(const DomainSpec& d, const Grid& g, const Forcing& c, double dc_sup) {
  const double c0 = compute_C0(d);
  const double k0 = compute_K0(d, g.h);
  double margin = std::numeric_limits<double>::infinity();
  for (int k : g.interior) {
    const double cx = c(g.position(k));
    margin = std::min(margin, cx * cx - 2.0 * dc_sup - 2.0 * c0 * std::abs(cx) - 8.0 * c0 / k0);
  }
  return margin;
}

//! Constant forcing above which the margin is positive.
inline double forcing_threshold(double c0, double k0) {
  return c0 * (1.0 + std::sqrt(1.0 + 8.0 / (c0 * k0)));
}

}  // namespace spiralflow

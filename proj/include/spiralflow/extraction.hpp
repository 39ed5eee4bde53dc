#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "spiralflow/errors.hpp"
#include "spiralflow/field.hpp"
#include "spiralflow/geometry.hpp"
#include "spiralflow/theta.hpp"

namespace spiralflow {

//! Polyline approximating a piece of the spiral set {u - theta in 2 pi Z}.
struct SpiralCurve {
  std::vector<Vec2> points;
  double t = 0.0;
  bool closed = false;
};

//! sin and cos of u - Theta on every node that carries a value (0 and -1 elsewhere).
struct PhaseResidual {
  ScalarField s;
  ScalarField c;
};

inline PhaseResidual phase_residual(const Grid& g, const ScalarField& u, const ThetaField& theta) {
  PhaseResidual pr{g.make_field<double>(0.0), g.make_field<double>(-1.0)};
  for (int k = 0; k < static_cast<int>(g.size()); ++k) {
    if (!g.has_value(k)) continue;
    const double r = u[k] - theta.principal()[k];
    pr.s[k] = std::sin(r);
    pr.c[k] = std::cos(r);
  }
  return pr;
}

namespace detail {

constexpr double kDegenerateTolerance = 1e-9;
constexpr double kDegenerateFraction = 0.1;

// Edge ids: horizontal edge from node k to k+1 is 2k, vertical edge from k to k+nx is 2k+1.
struct EdgePoint {
  long long edge;
  Vec2 x;
};

struct Segment {
  EdgePoint a, b;
};

inline double bilinear(double v00, double v10, double v01, double v11, double tx, double ty) {
  return (1 - tx) * (1 - ty) * v00 + tx * (1 - ty) * v10 + (1 - tx) * ty * v01 + tx * ty * v11;
}

// Cuts a polyline at sd = 0 and keeps the pieces inside the closure of W.
inline std::vector<std::vector<Vec2>> clip_to_domain(const DomainSpec& d, const std::vector<Vec2>& pts) {
  std::vector<std::vector<Vec2>> pieces;
  std::vector<Vec2> cur;
  auto crossing = [&](Vec2 in, Vec2 out) {
    double lo = 0.0, hi = 1.0;  // sd(in + lo (out - in)) >= 0 > sd(in + hi (out - in))
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (signed_distance(d, in + mid * (out - in)) >= 0.0 ? lo : hi) = mid;
    }
    return in + lo * (out - in);
  };
  auto flush = [&] {
    if (cur.size() >= 2) pieces.push_back(std::move(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const bool inside = signed_distance(d, pts[i]) >= 0.0;
    if (i > 0) {
      const bool prev_inside = signed_distance(d, pts[i - 1]) >= 0.0;
      if (prev_inside && !inside) {
        cur.push_back(crossing(pts[i - 1], pts[i]));
        flush();
      } else if (!prev_inside && inside) {
        cur.push_back(crossing(pts[i], pts[i - 1]));
      }
    }
    if (inside) cur.push_back(pts[i]);
  }
  flush();
  return pieces;
}

}  // namespace detail

//! Marching squares on sin(u - Theta) over cells whose corners all carry values,
//! keeping segments whose midpoint has cos(u - Theta) > 0, chained into
//! polylines and clipped to the closure of W.
inline std::vector<SpiralCurve> extract_spirals(const DomainSpec& d, const Grid& g,
                                                const ScalarField& u, const ThetaField& theta,
                                                double t = 0.0) {
  const PhaseResidual pr = phase_residual(g, u, theta);
  std::size_t flat = 0;
  for (int k : g.interior)
    if (std::abs(pr.s[k]) < detail::kDegenerateTolerance && pr.c[k] > 0.0) ++flat;
  if (static_cast<double>(flat) > detail::kDegenerateFraction * static_cast<double>(g.interior.size()))
    throw DegenerateLevelSet("phase residual vanishes on more than 10% of the interior nodes");

  const int nx = g.nx;
  std::vector<detail::Segment> segs;
  for (int j = 0; j + 1 < g.ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const int k00 = g.index(i, j), k10 = k00 + 1, k01 = k00 + nx, k11 = k01 + 1;
      if (!g.has_value(k00) || !g.has_value(k10) || !g.has_value(k01) || !g.has_value(k11)) continue;
      const double s00 = pr.s[k00], s10 = pr.s[k10], s01 = pr.s[k01], s11 = pr.s[k11];
      const int mask = (s00 >= 0) | (s10 >= 0) << 1 | (s11 >= 0) << 2 | (s01 >= 0) << 3;
      if (mask == 0 || mask == 15) continue;
      const Vec2 x00 = g.position(k00);
      // Crossing on each cell edge: 0 bottom, 1 right, 2 top, 3 left.
      auto point = [&](int e) -> detail::EdgePoint {
        auto lerp = [&](double sa, double sb, Vec2 xa, Vec2 xb) {
          const double a = sa / (sa - sb);
          return xa + a * (xb - xa);
        };
        const Vec2 x10 = x00 + Vec2{g.h, 0}, x01 = x00 + Vec2{0, g.h}, x11 = x00 + Vec2{g.h, g.h};
        switch (e) {
          case 0: return {2LL * k00, lerp(s00, s10, x00, x10)};
          case 1: return {2LL * k10 + 1, lerp(s10, s11, x10, x11)};
          case 2: return {2LL * k01, lerp(s01, s11, x01, x11)};
          default: return {2LL * k00 + 1, lerp(s00, s01, x00, x01)};
        }
      };
      auto emit = [&](int ea, int eb) {
        const detail::EdgePoint a = point(ea), b = point(eb);
        const Vec2 mid = 0.5 * (a.x + b.x);
        const double tx = (mid.x - x00.x) / g.h, ty = (mid.y - x00.y) / g.h;
        const double cm = detail::bilinear(pr.c[k00], pr.c[k10], pr.c[k01], pr.c[k11], tx, ty);
        if (cm > 0.0) segs.push_back({a, b});
      };
      switch (mask) {
        case 1: case 14: emit(3, 0); break;
        case 2: case 13: emit(0, 1); break;
        case 3: case 12: emit(3, 1); break;
        case 4: case 11: emit(1, 2); break;
        case 6: case 9: emit(0, 2); break;
        case 7: case 8: emit(3, 2); break;
        case 5: case 10: {
          const bool centre_positive = 0.25 * (s00 + s10 + s01 + s11) >= 0.0;
          // mask 5: corners 00 and 11 positive.
          if ((mask == 5) == centre_positive) {
            emit(3, 2);
            emit(0, 1);
          } else {
            emit(3, 0);
            emit(1, 2);
          }
          break;
        }
        default: break;
      }
    }
  }

  // Chain segments through shared edge points.
  std::unordered_map<long long, std::array<int, 2>> at_edge;
  at_edge.reserve(segs.size() * 2);
  auto attach = [&](long long e, int s) {
    auto [it, fresh] = at_edge.try_emplace(e, std::array<int, 2>{-1, -1});
    (it->second[0] < 0 ? it->second[0] : it->second[1]) = s;
  };
  for (int s = 0; s < static_cast<int>(segs.size()); ++s) {
    attach(segs[s].a.edge, s);
    attach(segs[s].b.edge, s);
  }
  auto other = [&](long long e, int s) {
    const auto& pair = at_edge.at(e);
    return pair[0] == s ? pair[1] : pair[0];
  };

  std::vector<char> used(segs.size(), 0);
  std::vector<SpiralCurve> curves;
  auto walk = [&](int s0, long long start_edge) {
    SpiralCurve cv;
    cv.t = t;
    long long e = start_edge;
    int s = s0;
    cv.points.push_back(segs[s].a.edge == e ? segs[s].a.x : segs[s].b.x);
    while (s >= 0 && !used[s]) {
      used[s] = 1;
      const detail::EdgePoint& far = segs[s].a.edge == e ? segs[s].b : segs[s].a;
      cv.points.push_back(far.x);
      e = far.edge;
      s = other(e, s);
    }
    cv.closed = s >= 0 && s == s0;
    if (cv.closed) cv.points.pop_back();
    return cv;
  };
  // Open chains first, starting from edge points with a single segment.
  for (int s = 0; s < static_cast<int>(segs.size()); ++s) {
    for (long long e : {segs[s].a.edge, segs[s].b.edge})
      if (!used[s] && at_edge.at(e)[1] < 0) curves.push_back(walk(s, e));
  }
  for (int s = 0; s < static_cast<int>(segs.size()); ++s)
    if (!used[s]) curves.push_back(walk(s, segs[s].a.edge));

  std::vector<SpiralCurve> out;
  for (SpiralCurve& cv : curves) {
    const bool inside = std::all_of(cv.points.begin(), cv.points.end(),
                                    [&](Vec2 x) { return signed_distance(d, x) >= 0.0; });
    if (cv.closed && inside) {
      out.push_back(std::move(cv));
      continue;
    }
    if (cv.closed) cv.points.push_back(cv.points.front());
    for (auto& piece : detail::clip_to_domain(d, cv.points)) out.push_back({std::move(piece), t, false});
  }
  std::sort(out.begin(), out.end(), [](const SpiralCurve& a, const SpiralCurve& b) {
    const Vec2 pa = a.points.front(), pb = b.points.front();
    return pa.x != pb.x ? pa.x < pb.x : pa.y < pb.y;
  });
  return out;
}

//! Distance from x to the polyline through `pts`.
inline double distance_to_polyline(Vec2 x, std::span<const Vec2> pts, bool closed = false) {
  if (pts.empty()) return std::numeric_limits<double>::infinity();
  double best = distance(x, pts[0]);
  const std::size_t n = pts.size();
  const std::size_t edges = closed ? n : n - 1;
  for (std::size_t i = 0; i < edges; ++i)
    best = std::min(best, distance(x, detail::closest_on_segment(pts[i], pts[(i + 1) % n], x)));
  return best;
}

//! Symmetric Hausdorff distance between two families of polylines, measured
//! from the vertices of each family to the polylines of the other.
inline double hausdorff_distance(std::span<const SpiralCurve> a, std::span<const SpiralCurve> b) {
  auto one_way = [](std::span<const SpiralCurve> from, std::span<const SpiralCurve> to) {
    double worst = 0.0;
    for (const SpiralCurve& cf : from) {
      for (Vec2 x : cf.points) {
        double best = std::numeric_limits<double>::infinity();
        for (const SpiralCurve& ct : to) best = std::min(best, distance_to_polyline(x, ct.points, ct.closed));
        worst = std::max(worst, best);
      }
    }
    return worst;
  };
  return std::max(one_way(a, b), one_way(b, a));
}

}  // namespace spiralflow

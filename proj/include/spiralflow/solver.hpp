#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <vector>

#include "spiralflow/errors.hpp"
#include "spiralflow/field.hpp"
#include "spiralflow/forcing.hpp"
#include "spiralflow/geometry.hpp"
#include "spiralflow/theta.hpp"

namespace spiralflow {

//! Treatment of the forcing term c(x) sqrt(eps^2 + |D(u - theta)|^2).
enum class Scheme {
  central,         // central differences everywhere
  upwind_forcing,  // Godunov upwinding of the forcing term, shifted by D theta
};

struct SolverParams {
  double epsilon = 1e-2;          // regularization of |D(u - theta)|
  double cfl = 0.5;               // fraction of the explicit stability limit
  double t_end = 1.0;
  double sample_interval = 0.1;   // model time between diagnostic samples
  double snapshot_interval = 0.0; // model time between snapshots, 0: first and last only
  Scheme scheme = Scheme::upwind_forcing;
};

inline void validate(const SolverParams& p) {
  if (!(p.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(p.cfl > 0.0 && p.cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
  if (!(p.t_end >= 0.0)) throw ConfigError("t_end must be nonnegative");
  if (!(p.sample_interval > 0.0)) throw ConfigError("sample interval must be positive");
  if (!(p.snapshot_interval >= 0.0)) throw ConfigError("snapshot interval must be nonnegative");
}

//! Immutable discretization of one problem: grid, phase field, forcing and the
//! per-node coefficients of the stencil. Shared by all states built on it.
class Problem {
 public:
  Problem(DomainSpec domain, double h, Forcing forcing)
      : Problem(domain, h, std::move(forcing), centers_of(domain)) {}

  //! Spiral centers placed anywhere inside the holes (not necessarily at their centers).
  Problem(DomainSpec domain, double h, Forcing forcing, std::vector<SpiralCenter> centers)
      : domain_(std::move(domain)),
        grid_(build_grid(domain_, h)),
        theta_(grid_, checked_centers(domain_, std::move(centers))),
        forcing_(std::move(forcing)) {
    const std::size_t n = grid_.interior.size();
    qx_.resize(n);
    qy_.resize(n);
    hxx_.resize(n);
    hxy_.resize(n);
    hyy_.resize(n);
    c_.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
      const Vec2 x = grid_.position(grid_.interior[s]);
      const Vec2 q = grad_theta(x, theta_.centers());
      const Sym2 hs = hess_theta(x, theta_.centers());
      qx_[s] = q.x;
      qy_[s] = q.y;
      hxx_[s] = hs.xx;
      hxy_[s] = hs.xy;
      hyy_[s] = hs.yy;
      c_[s] = forcing_(x);
      if (!(c_[s] > 0.0)) throw ConfigError("forcing must be positive on W");
      c_max_ = std::max(c_max_, c_[s]);
    }
    for (std::size_t s = 0; s < n; ++s) {
      const int k = grid_.interior[s];
      if (!runs_.empty() && runs_.back().k0 + runs_.back().len == k)
        ++runs_.back().len;
      else
        runs_.push_back({k, static_cast<int>(s), 1});
    }
    ghost_offset_.resize(grid_.ghosts.size());
    for (std::size_t s = 0; s < grid_.ghosts.size(); ++s) {
      const GhostNode& gn = grid_.ghosts[s];
      ghost_offset_[s] =
          gn.mirror_distance * dot(grad_theta(gn.foot.point, theta_.centers()), gn.foot.normal);
    }
  }

  static std::vector<SpiralCenter> checked_centers(const DomainSpec& d, std::vector<SpiralCenter> centers) {
    if (centers.empty()) throw DegenerateDomain("at least one spiral center is required");
    for (const SpiralCenter& c : centers) {
      if (c.m == 0) throw DegenerateDomain("spiral strength must be nonzero");
      const bool inside = std::any_of(d.holes.begin(), d.holes.end(),
                                      [&](const Hole& h) { return distance(c.a, h.center) < d.hole_radius; });
      if (!inside) throw DegenerateDomain("spiral center is not inside a hole");
    }
    return centers;
  }

  const DomainSpec& domain() const { return domain_; }
  const Grid& grid() const { return grid_; }
  const ThetaField& theta() const { return theta_; }
  const Forcing& forcing() const { return forcing_; }
  double c_max() const { return c_max_; }

  // Coefficients indexed by position in grid().interior.
  const std::vector<double>& theta_x() const { return qx_; }
  const std::vector<double>& theta_y() const { return qy_; }
  const std::vector<double>& theta_xx() const { return hxx_; }
  const std::vector<double>& theta_xy() const { return hxy_; }
  const std::vector<double>& theta_yy() const { return hyy_; }
  const std::vector<double>& forcing_values() const { return c_; }
  //! d * (D theta(foot) . n) for each ghost node.
  const std::vector<double>& ghost_offset() const { return ghost_offset_; }

  //! Maximal horizontal runs of consecutive interior nodes.
  struct Run {
    int k0;  // first node index
    int q0;  // its position in grid().interior
    int len;
  };
  const std::vector<Run>& runs() const { return runs_; }

 private:
  DomainSpec domain_;
  Grid grid_;
  ThetaField theta_;
  Forcing forcing_;
  std::vector<double> qx_, qy_, hxx_, hxy_, hyy_, c_;
  std::vector<double> ghost_offset_;
  std::vector<Run> runs_;
  double c_max_ = 0.0;
};

inline std::shared_ptr<const Problem> make_problem(DomainSpec domain, double h, Forcing forcing) {
  return std::make_shared<const Problem>(std::move(domain), h, std::move(forcing));
}

inline std::shared_ptr<const Problem> make_problem(DomainSpec domain, double h, Forcing forcing,
                                                   std::vector<SpiralCenter> centers) {
  return std::make_shared<const Problem>(std::move(domain), h, std::move(forcing), std::move(centers));
}

//! Evolving simulation: the field u, time, and the a-priori bound M from u0.
struct SolverState {
  std::shared_ptr<const Problem> problem;
  SolverParams params;
  ScalarField u;
  ScalarField u0;
  double t = 0.0;
  double M = 0.0;       // 4 |D^2(u0 - theta)| + |(1 + |D(u0 - theta)|^2)^(1/2) c|
  double u0_sup = 0.0;  // sup over W of |u0|
  bool ghosts_fresh = false;
  double last_dt = 0.0;
  double last_increment = 0.0;  // max |u^{n+1} - u^n| of the last step
  long long steps = 0;
};

//! Sets ghost values by reflection across the boundary with the D theta . n source,
//! so that D(u - theta) . n = 0 holds to first order.
inline void apply_neumann_bc(SolverState& st) {
  const Problem& pb = *st.problem;
  const auto& ghosts = pb.grid().ghosts;
  const auto& offset = pb.ghost_offset();
  double* u = st.u.data();
  for (std::size_t s = 0; s < ghosts.size(); ++s) {
    const GhostNode& gn = ghosts[s];
    double v = offset[s];
    for (int q = 0; q < gn.stencil_size; ++q) v += gn.weights[q] * u[gn.stencil[q]];
    u[gn.node] = v;
  }
  st.ghosts_fresh = true;
}

namespace detail {

struct NodeStencil {
  double c, e, w, n, s, ne, nw, se, sw;
};

inline NodeStencil gather(const double* u, int k, int nx) {
  return {u[k], u[k + 1], u[k - 1], u[k + nx], u[k - nx],
          u[k + nx + 1], u[k + nx - 1], u[k - nx + 1], u[k - nx - 1]};
}

// Right-hand side at one interior node; also returns tr(b)/2 through `half_trace`.
template <Scheme scheme>
inline double node_rhs(const NodeStencil& v, double inv_h, double eps2, double qx, double qy,
                       double hxx, double hxy, double hyy, double c, double& half_trace) {
  const double inv_h2 = inv_h * inv_h;
  const double px = 0.5 * (v.e - v.w) * inv_h - qx;
  const double py = 0.5 * (v.n - v.s) * inv_h - qy;
  const double fxx = (v.e - 2.0 * v.c + v.w) * inv_h2 - hxx;
  const double fyy = (v.n - 2.0 * v.c + v.s) * inv_h2 - hyy;
  const double fxy = 0.25 * (v.ne - v.nw - v.se + v.sw) * inv_h2 - hxy;
  const double p2 = px * px + py * py;
  const double inv_w2 = 1.0 / (eps2 + p2);
  const double curvature = fxx + fyy - (px * px * fxx + 2.0 * px * py * fxy + py * py * fyy) * inv_w2;
  half_trace = 1.0 - 0.5 * p2 * inv_w2;

  double speed2;
  if constexpr (scheme == Scheme::central) {
    speed2 = eps2 + p2;
  } else {
    const double ax = (v.c - v.w) * inv_h - qx;
    const double bx = (v.e - v.c) * inv_h - qx;
    const double ay = (v.c - v.s) * inv_h - qy;
    const double by = (v.n - v.c) * inv_h - qy;
    const double mx = std::min(ax, 0.0), Mx = std::max(bx, 0.0);
    const double my = std::min(ay, 0.0), My = std::max(by, 0.0);
    speed2 = eps2 + mx * mx + Mx * Mx + my * my + My * My;
  }
  return curvature + c * std::sqrt(speed2);
}

inline double node_rhs(const NodeStencil& v, double inv_h, double eps2, double qx, double qy,
                       double hxx, double hxy, double hyy, double c, Scheme scheme,
                       double& half_trace) {
  return scheme == Scheme::central
             ? node_rhs<Scheme::central>(v, inv_h, eps2, qx, qy, hxx, hxy, hyy, c, half_trace)
             : node_rhs<Scheme::upwind_forcing>(v, inv_h, eps2, qx, qy, hxx, hxy, hyy, c,
                                                half_trace);
}

template <Scheme scheme>
inline double evaluate_runs(const Problem& pb, const double* u, double eps2, double* r) {
  const int nx = pb.grid().nx;
  const double inv_h = 1.0 / pb.grid().h;
  const double* qx = pb.theta_x().data();
  const double* qy = pb.theta_y().data();
  const double* hxx = pb.theta_xx().data();
  const double* hxy = pb.theta_xy().data();
  const double* hyy = pb.theta_yy().data();
  const double* c = pb.forcing_values().data();
  const auto& runs = pb.runs();
  const long nr = static_cast<long>(runs.size());
  double s_max = 0.0;
#pragma omp parallel for reduction(max : s_max) schedule(static)
  for (long ir = 0; ir < nr; ++ir) {
    const Problem::Run run = runs[ir];
    for (int t = 0; t < run.len; ++t) {
      const int q = run.q0 + t;
      double half_trace;
      r[q] = node_rhs<scheme>(gather(u, run.k0 + t, nx), inv_h, eps2, qx[q], qy[q], hxx[q],
                              hxy[q], hyy[q], c[q], half_trace);
      s_max = std::max(s_max, half_trace);
    }
  }
  return s_max;
}

// Evaluates the right-hand side at every interior node (position-indexed into
// grid().interior) and returns max tr(b)/2.
inline double evaluate(const SolverState& st, std::vector<double>& out) {
  if (!st.ghosts_fresh) throw NotReady("ghost layer is stale; call apply_neumann_bc first");
  const Problem& pb = *st.problem;
  out.resize(pb.grid().interior.size());
  const double eps2 = st.params.epsilon * st.params.epsilon;
  return st.params.scheme == Scheme::central
             ? evaluate_runs<Scheme::central>(pb, st.u.data(), eps2, out.data())
             : evaluate_runs<Scheme::upwind_forcing>(pb, st.u.data(), eps2, out.data());
}

// Bound on |d (c w) / d u_center| * h for the upwind forcing, uniform in the data.
constexpr double kForcingSpeedBound = 2.0;

// cfl * min(parabolic, advective), capped so that the centre coefficient of the
// update, 1 - dt (4 s / h^2 + 2 c_max / h), stays nonnegative.
inline double dt_from_bounds(const SolverState& st, double half_trace_max) {
  const double h = st.problem->grid().h;
  const double s = std::max(half_trace_max, 0.5);
  const double parabolic = h * h / (4.0 * s);
  const double advective = h / (st.problem->c_max() * kForcingSpeedBound);
  const double monotone = 1.0 / (1.0 / parabolic + 1.0 / advective);
  return std::min(st.params.cfl * std::min(parabolic, advective), monotone);
}

inline void apply_update(SolverState& st, const std::vector<double>& r, double dt) {
  const Grid& g = st.problem->grid();
  const auto& idx = g.interior;
  double* u = st.u.data();
  const long n = static_cast<long>(idx.size());
  double max_inc = 0.0;
  double max_abs = 0.0;
  bool finite = true;
#pragma omp parallel for reduction(max : max_inc, max_abs) reduction(&& : finite) schedule(static)
  for (long q = 0; q < n; ++q) {
    const double inc = dt * r[q];
    const double v = u[idx[q]] + inc;
    u[idx[q]] = v;
    finite = finite && std::isfinite(v);
    max_inc = std::max(max_inc, std::abs(inc));
    max_abs = std::max(max_abs, std::abs(v));
  }
  const double t_new = st.t + dt;
  const double bound = st.u0_sup + 2.0 * st.M * t_new;
  if (!finite || max_abs > bound * (1.0 + 1e-12) + 1e-12) {
    std::ostringstream ss;
    ss << "solution left the a-priori band at t=" << t_new << ": sup|u|=" << max_abs
       << " > " << bound;
    throw Blowup(ss.str());
  }
  st.t = t_new;
  st.last_dt = dt;
  st.last_increment = max_inc;
  ++st.steps;
  apply_neumann_bc(st);
}

inline double spectral_norm(double xx, double xy, double yy) {
  return std::abs(0.5 * (xx + yy)) + std::hypot(0.5 * (xx - yy), xy);
}

// M from the discrete derivatives of u0 (ghosts filled) at the interior nodes.
inline double compute_M(const SolverState& st) {
  const Problem& pb = *st.problem;
  const Grid& g = pb.grid();
  const int nx = g.nx;
  const double inv_h = 1.0 / g.h;
  const double* u = st.u0.data();
  double hess_sup = 0.0;
  double forcing_sup = 0.0;
  for (std::size_t q = 0; q < g.interior.size(); ++q) {
    const NodeStencil v = gather(u, g.interior[q], nx);
    const double fxx = (v.e - 2.0 * v.c + v.w) * inv_h * inv_h - pb.theta_xx()[q];
    const double fyy = (v.n - 2.0 * v.c + v.s) * inv_h * inv_h - pb.theta_yy()[q];
    const double fxy = 0.25 * (v.ne - v.nw - v.se + v.sw) * inv_h * inv_h - pb.theta_xy()[q];
    hess_sup = std::max(hess_sup, spectral_norm(fxx, fxy, fyy));
    const double qx = pb.theta_x()[q], qy = pb.theta_y()[q];
    const double px = 0.5 * (v.e - v.w) * inv_h - qx;
    const double py = 0.5 * (v.n - v.s) * inv_h - qy;
    // The upwind forcing uses one-sided differences; bound its Godunov sum too.
    const double ax = (v.c - v.w) * inv_h - qx, bx = (v.e - v.c) * inv_h - qx;
    const double ay = (v.c - v.s) * inv_h - qy, by = (v.n - v.c) * inv_h - qy;
    const double godunov = std::pow(std::min(ax, 0.0), 2) + std::pow(std::max(bx, 0.0), 2) +
                           std::pow(std::min(ay, 0.0), 2) + std::pow(std::max(by, 0.0), 2);
    const double p2 = std::max(px * px + py * py, godunov);
    forcing_sup = std::max(forcing_sup, std::sqrt(1.0 + p2) * pb.forcing_values()[q]);
  }
  return 4.0 * hess_sup + forcing_sup;
}

}  // namespace detail

//! Builds a state from nodal values of u0 (only nodes of W are read).
inline SolverState make_state(std::shared_ptr<const Problem> problem, ScalarField u0,
                              SolverParams params) {
  validate(params);
  const Grid& g = problem->grid();
  if (u0.nx() != g.nx || u0.ny() != g.ny) throw ConfigError("initial field does not match grid");
  SolverState st;
  st.problem = std::move(problem);
  st.params = params;
  st.u = std::move(u0);
  for (std::size_t k = 0; k < g.size(); ++k)
    if (!g.is_interior(static_cast<int>(k))) st.u[k] = 0.0;
  apply_neumann_bc(st);
  st.u0 = st.u;
  for (int k : g.interior) st.u0_sup = std::max(st.u0_sup, std::abs(st.u[k]));
  st.M = detail::compute_M(st);
  return st;
}

inline SolverState make_state(std::shared_ptr<const Problem> problem, const InitialCondition& ic,
                              SolverParams params) {
  const Grid& g = problem->grid();
  ScalarField u0 = g.make_field<double>();
  for (int k : g.interior) u0[k] = ic(g.position(k));
  return make_state(std::move(problem), std::move(u0), params);
}

//! tr[(I - p p^T / w^2) D^2(u - theta)] + c w with p = D(u - theta), w^2 = eps^2 + |p|^2.
//! Zero outside the interior nodes.
inline ScalarField rhs(const SolverState& st) {
  std::vector<double> r;
  detail::evaluate(st, r);
  const Grid& g = st.problem->grid();
  ScalarField out = g.make_field<double>();
  for (std::size_t q = 0; q < r.size(); ++q) out[g.interior[q]] = r[q];
  return out;
}

//! cfl * min(h^2 / (4 s), h / (c_max * 2)), s = max tr(b)/2 in [1/2, 1], capped at the
//! largest step that keeps the upwind update monotone.
inline double stable_dt(const SolverState& st) {
  std::vector<double> r;
  const double s = detail::evaluate(st, r);
  return detail::dt_from_bounds(st, s);
}

//! Forward Euler step u <- u + dt * rhs(u); refreshes the ghost layer.
inline void step(SolverState& st, double dt) {
  if (dt == 0.0) return;
  std::vector<double> r;
  detail::evaluate(st, r);
  detail::apply_update(st, r, dt);
}

//! Takes one stable step without passing `t_limit`; returns the step taken.
inline double advance(SolverState& st, double t_limit, std::vector<double>& scratch) {
  const double s = detail::evaluate(st, scratch);
  const double dt_stable = detail::dt_from_bounds(st, s);
  const double remaining = t_limit - st.t;
  if (remaining <= 0.0) return 0.0;
  // Land exactly on t_limit when within one step (or a sliver beyond it).
  const bool last = remaining <= dt_stable * (1.0 + 1e-9);
  const double dt = last ? remaining : dt_stable;
  detail::apply_update(st, scratch, dt);
  if (last) st.t = t_limit;
  return dt;
}

}  // namespace spiralflow

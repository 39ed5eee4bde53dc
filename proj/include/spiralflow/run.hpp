#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "spiralflow/analysis.hpp"
#include "spiralflow/solver.hpp"

namespace spiralflow {

struct DiagnosticSample {
  double t = 0.0;
  double S = 0.0;         // max_W u
  double min_u = 0.0;
  double sup_grad = 0.0;  // max |Du| (central differences)
  double sup_ut = 0.0;    // max |u^{n+1} - u^n| / dt of the last step
  double tip_height = 0.0;
  double barrier_excess = 0.0;  // max of (u - u0 - Mt, u0 - Mt - u) / (1 + Mt); <= 0 inside
};

struct Diagnostics {
  double M = 0.0;
  double u0_sup = 0.0;
  double h0 = 1.0;
  std::vector<DiagnosticSample> samples;

  GrowthSeries growth() const {
    GrowthSeries g;
    g.u0_sup = u0_sup;
    for (const DiagnosticSample& s : samples) {
      g.t.push_back(s.t);
      g.S.push_back(s.S);
    }
    return g;
  }
};

struct Snapshot {
  double t = 0.0;
  ScalarField u;
};

struct RunOptions {
  double h0 = 1.0;  // unit step height for the tip diagnostic
  bool keep_snapshots = true;
  std::function<void(const SolverState&)> on_snapshot;  // may throw SnapshotIOFailure
};

struct RunResult {
  Diagnostics diagnostics;
  std::vector<Snapshot> snapshots;
  SolverState final_state;
};

inline DiagnosticSample sample_diagnostics(const SolverState& st, double h0) {
  const Problem& pb = *st.problem;
  const Grid& g = pb.grid();
  const double* u = st.u.data();
  const double* u0 = st.u0.data();
  const double inv_2h = 0.5 / g.h;
  const double mt = st.M * st.t;
  DiagnosticSample d;
  d.t = st.t;
  d.S = -std::numeric_limits<double>::infinity();
  d.min_u = std::numeric_limits<double>::infinity();
  d.barrier_excess = -std::numeric_limits<double>::infinity();
  for (int k : g.interior) {
    d.S = std::max(d.S, u[k]);
    d.min_u = std::min(d.min_u, u[k]);
    const double gx = (u[k + 1] - u[k - 1]) * inv_2h;
    const double gy = (u[k + g.nx] - u[k - g.nx]) * inv_2h;
    d.sup_grad = std::max(d.sup_grad, std::hypot(gx, gy));
    const double excess = std::max(u[k] - (u0[k] + mt), (u0[k] - mt) - u[k]);
    d.barrier_excess = std::max(d.barrier_excess, excess / (1.0 + mt));
  }
  if (st.steps == 0) {
    std::vector<double> r;
    detail::evaluate(st, r);
    for (double v : r) d.sup_ut = std::max(d.sup_ut, std::abs(v));
  } else {
    d.sup_ut = st.last_increment / st.last_dt;
  }
  d.tip_height = max_height(g, st.u, pb.theta(), h0);
  return d;
}

//! Steps to params.t_end, sampling diagnostics every sample_interval and
//! emitting snapshots at t = 0, every snapshot_interval, and t_end.
inline RunResult run(SolverState st, const RunOptions& opt = {}) {
  RunResult res;
  res.diagnostics.M = st.M;
  res.diagnostics.u0_sup = st.u0_sup;
  res.diagnostics.h0 = opt.h0;
  const SolverParams& p = st.params;
  const double t_end = p.t_end;

  auto emit_snapshot = [&] {
    if (opt.on_snapshot) opt.on_snapshot(st);
    if (opt.keep_snapshots) res.snapshots.push_back({st.t, st.u});
  };

  long long next_sample = 1;
  long long next_snapshot = 1;
  auto sample_time = [&](long long k) { return std::min(t_end, k * p.sample_interval); };
  auto snapshot_time = [&](long long k) {
    return p.snapshot_interval > 0.0 ? std::min(t_end, k * p.snapshot_interval) : t_end;
  };

  res.diagnostics.samples.push_back(sample_diagnostics(st, opt.h0));
  emit_snapshot();

  std::vector<double> scratch;
  while (st.t < t_end) {
    const double target = std::min(sample_time(next_sample), snapshot_time(next_snapshot));
    while (st.t < target) advance(st, target, scratch);
    if (st.t >= sample_time(next_sample)) {
      res.diagnostics.samples.push_back(sample_diagnostics(st, opt.h0));
      ++next_sample;
    }
    if (st.t >= snapshot_time(next_snapshot)) {
      emit_snapshot();
      ++next_snapshot;
    }
  }
  res.final_state = std::move(st);
  return res;
}

}  // namespace spiralflow

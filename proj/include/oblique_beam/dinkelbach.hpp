#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <vector>

#include "oblique_beam/oblique_manifold.hpp"
#include "oblique_beam/problem_model.hpp"
#include "oblique_beam/rcg_solver.hpp"

namespace oblique_beam {

struct DtConfig {
  double mu0 = 1.0;
  double eps = 1e-5;
  int max_outer = 1000;
  RcgConfig rcg;

  void validate() const {
    if (!std::isfinite(eps) || !(eps > 0.0))
      throw InvalidInput("eps", "must be finite and > 0");
    if (!std::isfinite(mu0) || !(mu0 > eps))
      throw InvalidInput("mu0", "must be finite and > eps");
    if (max_outer < 1) throw InvalidInput("max_outer", "must be >= 1");
    rcg.validate();
  }
};

/// One outer round. `t` and `mu` are the values after the round's update.
struct OuterRecord {
  int iteration = 0;
  double t = 0.0;
  double mu = 0.0;
  int inner_iters = 0;
  bool accepted = false;
  double improvement = 0.0;  // F(W_new, t_prev) - F(W_prev, t_prev)
};

struct SolveReport {
  BeamMatrix beams;
  double t = 0.0;
  double t0 = 0.0;
  double mu = 0.0;  // final smoothing level
  std::vector<OuterRecord> trace;
  SinrTable sinr;
  int total_inner_iters = 0;
  bool converged = false;    // stopped on mu < eps
  bool hit_outer_cap = false;
  bool degenerate = false;   // achieved min SINR is exactly zero
  double max_unit_norm_error = 0.0;
  double wall_ms = 0.0;

  int outer_iters() const noexcept { return static_cast<int>(trace.size()); }
};

/// Dinkelbach-type outer loop with adaptive smoothing.
///
/// Each round ascends F(., t, mu) from the current point. The new point is
/// kept only if it strictly improves F(., t) and strictly raises the
/// achieved min SINR; otherwise mu is halved. Stops once mu < eps.
inline SolveReport dt_rcg_solve(const NormalizedProblem& prob,
                                const BeamMatrix& W0, const DtConfig& cfg) {
  cfg.validate();
  prob.check_beams(W0);
  const auto start = std::chrono::steady_clock::now();

  SolveReport report;
  BeamMatrix W = W0;
  double t = sinr_min(prob, W);
  double mu = cfg.mu0;
  report.t0 = t;
  report.max_unit_norm_error = manifold::unit_norm_error(W);

  for (int k = 1; k <= cfg.max_outer; ++k) {
    RcgResult inner = rcg_solve(prob, W, SmoothingParams{t, mu}, cfg.rcg);
    report.total_inner_iters += inner.iterations;
    report.max_unit_norm_error =
        std::max(report.max_unit_norm_error, inner.max_unit_norm_error);

    const double before = margin(prob, W, t).value;
    const double after = margin(prob, inner.point, t).value;
    const double t_new = sinr_min(prob, inner.point);

    OuterRecord rec;
    rec.iteration = k;
    rec.inner_iters = inner.iterations;
    rec.improvement = after - before;
    // F(W, t) > 0 and SINR(W) > t coincide in exact arithmetic; checking
    // both keeps the t sequence monotone under rounding.
    if (after > before && t_new > t) {
      W = std::move(inner.point);
      t = t_new;
      rec.accepted = true;
    } else {
      mu *= 0.5;
    }
    rec.t = t;
    rec.mu = mu;
    report.trace.push_back(rec);

    if (mu < cfg.eps) {
      report.converged = true;
      break;
    }
  }

  report.hit_outer_cap = !report.converged;
  report.beams = std::move(W);
  report.t = t;
  report.mu = mu;
  report.sinr = sinr_table(prob, report.beams);
  report.degenerate = (t == 0.0);
  report.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return report;
}

struct PhysicalSolution {
  PhysicalBeamformers beamformers;
  SolveReport report;
};

/// normalize -> random start -> dt_rcg_solve -> denormalize.
inline PhysicalSolution solve_physical(const NetworkInstance& inst,
                                       std::uint64_t seed,
                                       const DtConfig& cfg) {
  const NormalizedProblem prob = NormalizedProblem::from(inst);
  const BeamMatrix W0 = manifold::random_point(prob.dim(), prob.L(), seed);
  PhysicalSolution out;
  out.report = dt_rcg_solve(prob, W0, cfg);
  out.beamformers = denormalize(prob, out.report.beams, inst.budgets);
  return out;
}

}  // namespace oblique_beam

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oblique_beam/cli.hpp"
#include "oblique_beam/oblique_beam.hpp"

using namespace oblique_beam;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Criterion 6 is checked inside the other runs and reported on its own.
struct Feasibility {
  double worst_power_excess = -std::numeric_limits<double>::infinity();
  double worst_unit_norm = 0.0;
  long solves = 0;

  void record(const NetworkInstance& inst, const PhysicalSolution& sol) {
    for (int l = 0; l < inst.L; ++l)
      worst_power_excess = std::max(
          worst_power_excess,
          sol.beamformers.beams.col(l).squaredNorm() - inst.budgets(l));
    worst_unit_norm = std::max(worst_unit_norm, sol.report.max_unit_norm_error);
    ++solves;
  }
  void record(const SolveReport& report) {
    worst_unit_norm = std::max(worst_unit_norm, report.max_unit_norm_error);
    ++solves;
  }
  bool ok() const { return worst_power_excess <= 1e-9 && worst_unit_norm <= 1e-12; }
};

Feasibility g_feasible;

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

ScenarioConfig scenario(int L, int K, int M) {
  ScenarioConfig cfg;
  cfg.L = L;
  cfg.K = K;
  cfg.M = M;
  cfg.budget_pattern = default_budget_pattern(L);
  return cfg;
}

bool trace_monotone(const SolveReport& r) {
  double t = r.t0;
  double mu = std::numeric_limits<double>::infinity();
  for (const auto& rec : r.trace) {
    if (rec.t < t || rec.mu > mu) return false;
    t = rec.t;
    mu = rec.mu;
  }
  return true;
}

Outcome monotone_convergence() {
  const ScenarioConfig cfg = scenario(3, 10, 8);
  const DtConfig solver;
  int monotone = 0, converged = 0, max_outer = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const NetworkInstance inst = generate_instance(cfg, trial);
    const PhysicalSolution sol = solve_physical(inst, trial_start_seed(cfg, trial), solver);
    g_feasible.record(inst, sol);
    monotone += trace_monotone(sol.report) ? 1 : 0;
    converged += (sol.report.converged && sol.report.mu < solver.eps) ? 1 : 0;
    max_outer = std::max(max_outer, sol.report.outer_iters());
  }
  return {monotone == 50 && converged == 50,
          fmt("monotone %g/50, converged %g/50, max outer iters %g", monotone,
              converged, max_outer)};
}

Outcome smoothing_sandwich() {
  const int Ms[] = {1, 2, 4, 8, 16, 32};
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = -std::numeric_limits<double>::infinity();
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const int L = 1 + i % 4;
    const int K = 1 + (i / 4) % 10;
    const int M = Ms[(i / 40) % 6];
    const auto prob = NormalizedProblem::from(
        generate_instance(scenario(L, K, M), i, db_to_linear(-10.0 + 30.0 * unit(rng))));
    const BeamMatrix W = manifold::random_point(M + 1, L, rng());
    const double t = 3.0 * unit(rng);
    const double mu = std::pow(10.0, -6.0 + 7.0 * unit(rng));
    const double F = margin(prob, W, t).value;
    const double Fs = smoothed_value(prob, W, {t, mu});
    const double lower = Fs - F;
    const double upper = F - Fs - mu * std::log(static_cast<double>(K * L));
    worst = std::max({worst, lower, upper});
    if (lower > 1e-10 || upper > 1e-10) ++violations;
  }
  return {violations == 0,
          fmt("1000 triples, %g violations, worst excess %.3g", violations, worst)};
}

Outcome gradient_check() {
  std::mt19937_64 rng(77);
  double worst = 0.0;
  int checks = 0;
  for (int inst_i = 0; inst_i < 20; ++inst_i) {
    const int L = 1 + inst_i % 4;
    const int K = 1 + (3 * inst_i) % 10;
    const int M = 1 + (5 * inst_i) % 12;
    const auto prob = NormalizedProblem::from(generate_instance(scenario(L, K, M), inst_i));
    const BeamMatrix W = manifold::random_point(M + 1, L, rng());
    const double t = 0.5 * sinr_min(prob, W);
    for (double mu : {1.0, 0.1, 0.01}) {
      const SmoothingParams p{t, mu};
      const TangentVector G = riemannian_gradient(prob, W, p);
      const double a = 1e-5 * mu;
      for (int d = 0; d < 20; ++d) {
        const TangentVector U = manifold::random_tangent(W, rng());
        const double fd = (smoothed_value(prob, manifold::retract(W, a * U), p) -
                           smoothed_value(prob, manifold::retract(W, -a * U), p)) /
                          (2.0 * a);
        const double exact = manifold::inner(W, G, U);
        worst = std::max(worst, std::abs(fd - exact) / std::abs(exact));
        ++checks;
      }
    }
  }
  return {worst < 1e-4, fmt("%g directional checks, worst relative error %.3g", checks, worst)};
}

Outcome closed_form_oracle() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int Ms[] = {1, 2, 4, 8};
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    ScenarioConfig cfg = scenario(1, 1, Ms[i % 4]);
    cfg.noise_power = 0.1 + 2.0 * unit(rng);
    cfg.gamma = 0.5 + 2.0 * unit(rng);
    const NetworkInstance inst = generate_instance(cfg, i, db_to_linear(-10.0 + 30.0 * unit(rng)));
    const PhysicalSolution sol = solve_physical(inst, trial_start_seed(cfg, i), DtConfig{});
    g_feasible.record(inst, sol);
    worst = std::max(worst, std::abs(sol.report.t / oracles::single_user_optimum(inst) - 1.0));
  }
  return {worst <= 1e-3, fmt("100 instances, worst relative gap %.3g", worst)};
}

Outcome grid_oracle() {
  struct Family {
    int L, K, M, resolution;
  };
  const Family families[] = {{1, 2, 2, 99}, {2, 1, 1, 1000}};
  int passed = 0;
  double worst = std::numeric_limits<double>::infinity();
  std::string misses;
  for (const Family& f : families) {
    const ScenarioConfig cfg = scenario(f.L, f.K, f.M);
    for (int trial = 0; trial < 5; ++trial) {
      const NetworkInstance inst = generate_instance(cfg, trial);
      const auto prob = NormalizedProblem::from(inst);
      const auto grid = oracles::grid_search(prob, oracles::GridSpec{f.resolution},
                                             workers_from_env());
      const PhysicalSolution sol =
          solve_physical(inst, trial_start_seed(cfg, trial), DtConfig{});
      g_feasible.record(inst, sol);
      const double ratio = sol.report.t / grid.t;
      worst = std::min(worst, ratio);
      if (ratio >= 0.99) {
        ++passed;
      } else {
        misses += fmt(" (L=%g M=%g trial %g", f.L, f.M, trial) +
                  fmt(": %.4g vs grid %.4g)", sol.report.t, grid.t);
      }
    }
  }
  return {passed == 10,
          fmt("%g/10 within 1%% of grid, worst solver/grid ratio %.4f", passed, worst) + misses};
}

Outcome feasibility() {
  return {g_feasible.ok(),
          fmt("%g solves, worst power excess %.3g, worst unit-norm error %.3g",
              g_feasible.solves, g_feasible.worst_power_excess, g_feasible.worst_unit_norm)};
}

Outcome sweep_shape() {
  ScenarioConfig cfg = scenario(3, 10, 8);
  cfg.trials = 50;
  const SweepResult r = run_sweep(cfg, {0.0, 3.0, 6.0, 9.0, 12.0}, DtConfig{}, workers_from_env());
  bool ok = true;
  std::string column;
  for (std::size_t p = 0; p < r.points.size(); ++p) {
    if (p > 0 && r.points[p].mean_min_sinr_db < r.points[p - 1].mean_min_sinr_db) ok = false;
    if (r.points[p].failures > 0) ok = false;
    column += fmt(p ? ", %.3f" : "%.3f", r.points[p].mean_min_sinr_db);
  }
  double excess = -std::numeric_limits<double>::infinity();
  for (const auto& rec : r.trials) excess = std::max(excess, rec.max_power_violation);
  g_feasible.worst_power_excess = std::max(g_feasible.worst_power_excess, excess);
  g_feasible.solves += static_cast<long>(r.trials.size());
  return {ok, "mean min-SINR dB at 0..12 dB: " + column};
}

Outcome complexity_scaling() {
  auto per_iter_ms = [](int M) {
    const ScenarioConfig cfg = scenario(3, 10, M);
    RcgConfig rcg;
    rcg.relative_grad_tol = false;
    rcg.grad_tol = 1e-300;
    rcg.max_iters = 60;
    std::vector<double> samples;
    for (int trial = 0; trial < 15; ++trial) {
      const auto prob = NormalizedProblem::from(generate_instance(cfg, trial));
      const BeamMatrix W0 = manifold::random_point(M + 1, 3, trial_start_seed(cfg, trial));
      const SmoothingParams p{0.5 * sinr_min(prob, W0), 0.1};
      const auto start = std::chrono::steady_clock::now();
      const RcgResult r = rcg_solve(prob, W0, p, rcg);
      const double ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start).count();
      if (r.iterations > 0) samples.push_back(ms / r.iterations);
    }
    std::sort(samples.begin(), samples.end());
    return samples.empty() ? 0.0 : samples[samples.size() / 2];
  };
  per_iter_ms(16);  // warm-up
  const double t16 = per_iter_ms(16);
  const double t32 = per_iter_ms(32);
  const double ratio = t32 / t16;
  return {ratio >= 1.3 && ratio <= 6.0,
          fmt("median ms/iter M=16 %.4f, M=32 %.4f, ratio %.3f", t16, t32, ratio)};
}

Outcome determinism() {
  auto trace_csv = [](int trial) {
    const ScenarioConfig cfg = scenario(3, 10, 8);
    const NetworkInstance inst = generate_instance(cfg, trial, db_to_linear(6.0));
    const PhysicalSolution sol = solve_physical(inst, trial_start_seed(cfg, trial), DtConfig{});
    std::ostringstream os;
    csv::write_trace(os, sol.report);
    return os.str();
  };
  auto cli_trace = [] {
    const char* argv[] = {"oblique_beam", "trace", "--trial", "3", "--power-db", "9"};
    std::ostringstream out, err;
    cli::run(6, argv, out, err);
    return out.str();
  };
  int identical = 0;
  for (int trial = 0; trial < 3; ++trial) identical += trace_csv(trial) == trace_csv(trial);
  const std::string a = cli_trace();
  identical += (a == cli_trace() && a.size() > 50) ? 1 : 0;
  return {identical == 4, fmt("%g/4 repeated traces byte-identical", identical)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  // 6 runs last so it sees every solve from the others
  const std::vector<Criterion> criteria = {
      {1, "monotone convergence", monotone_convergence},
      {2, "smoothing sandwich", smoothing_sandwich},
      {3, "gradient correctness", gradient_check},
      {4, "closed-form oracle", closed_form_oracle},
      {5, "grid oracle", grid_oracle},
      {7, "sweep shape", sweep_shape},
      {8, "complexity scaling", complexity_scaling},
      {9, "determinism", determinism},
      {6, "feasibility", feasibility},
  };
  std::vector<std::string> lines(10);
  bool all = true;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all = all && o.pass;
    lines[c.id] = std::string(o.pass ? "PASS" : "FAIL") + " criterion " + std::to_string(c.id) +
                  " " + c.name + ": " + o.detail + fmt(" [%.1fs]", s);
    std::fprintf(stderr, "%s\n", lines[c.id].c_str());
  }
  for (int id = 1; id <= 9; ++id) std::printf("%s\n", lines[id].c_str());
  return all ? 0 : 1;
}

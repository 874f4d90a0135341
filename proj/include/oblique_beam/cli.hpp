#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "oblique_beam/csv.hpp"
#include "oblique_beam/dinkelbach.hpp"
#include "oblique_beam/instance_json.hpp"
#include "oblique_beam/parallel.hpp"
#include "oblique_beam/sim_harness.hpp"

namespace oblique_beam::cli {

enum ExitCode : int { kOk = 0, kValidation = 2, kIo = 3 };

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverFlags {
  double mu0 = DtConfig{}.mu0;
  double mu_eps = DtConfig{}.eps;
  int max_outer = DtConfig{}.max_outer;
  int max_inner = RcgConfig{}.max_iters;
  double grad_tol = RcgConfig{}.grad_tol;
  std::string hs_rule = "plain";

  void attach(CLI::App& app) {
    app.add_option("--mu0", mu0, "initial smoothing level");
    app.add_option("--mu-eps", mu_eps, "stop once the smoothing level drops below this");
    app.add_option("--max-outer", max_outer, "outer iteration cap");
    app.add_option("--max-inner", max_inner, "inner (RCG) iteration cap");
    app.add_option("--grad-tol", grad_tol, "relative RCG gradient tolerance");
    app.add_option("--hs-rule", hs_rule, "conjugate rule: plain | ascent")
        ->check(CLI::IsMember({"plain", "ascent"}));
  }

  DtConfig config() const {
    DtConfig cfg;
    cfg.mu0 = mu0;
    cfg.eps = mu_eps;
    cfg.max_outer = max_outer;
    cfg.rcg.max_iters = max_inner;
    cfg.rcg.grad_tol = grad_tol;
    cfg.rcg.hs_rule = hs_rule == "ascent" ? HsRule::kAscent : HsRule::kPlain;
    cfg.validate();
    return cfg;
  }
};

struct ScenarioFlags {
  int cells = 3;
  int users = 10;
  int antennas = 8;
  double eps = 0.25;
  double gamma = 1.0;
  double noise = 1.0;
  int trials = 500;
  std::uint64_t seed = 1;
  std::vector<double> budget_pattern;

  void attach(CLI::App& app) {
    app.add_option("--cells", cells, "number of cells L");
    app.add_option("--users", users, "users per cell K");
    app.add_option("--antennas", antennas, "antennas per BS M");
    app.add_option("--eps", eps, "intercell channel variance");
    app.add_option("--gamma", gamma, "common SINR target");
    app.add_option("--noise", noise, "noise power per user");
    app.add_option("--trials", trials, "channel realizations per power level");
    app.add_option("--seed", seed, "base seed");
    app.add_option("--budget-pattern", budget_pattern,
                   "per-BS budget multipliers (default 1,1,2 for three cells)")
        ->delimiter(',');
  }

  ScenarioConfig config() const {
    ScenarioConfig cfg;
    cfg.L = cells;
    cfg.K = users;
    cfg.M = antennas;
    cfg.intercell_var = eps;
    cfg.gamma = gamma;
    cfg.noise_power = noise;
    cfg.trials = trials;
    cfg.base_seed = seed;
    cfg.budget_pattern =
        budget_pattern.empty() ? default_budget_pattern(cells) : budget_pattern;
    cfg.validate();
    return cfg;
  }
};

inline NetworkInstance read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open instance file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput("instance", std::string("malformed JSON: ") + e.what());
  }
  return instance_json::from_json(doc);
}

/// Writes to `path`, or to `fallback` when the path is empty or "-".
template <typename Writer>
void emit(const std::string& path, std::ostream& fallback, Writer&& write) {
  if (path.empty() || path == "-") {
    write(fallback);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file '" + path + "'");
  write(out);
  if (!out) throw IoError("failed writing '" + path + "'");
}

inline nlohmann::json solve_result_json(const NetworkInstance& inst,
                                        const PhysicalSolution& sol) {
  using nlohmann::json;
  json out;
  const double t = sol.report.t;
  out["final_sinr_linear"] = t;
  // JSON has no -inf; a zero SINR reports null in dB
  out["final_sinr_dB"] = t > 0.0 ? json(linear_to_db(t)) : json(nullptr);
  json beams = json::array();
  for (int l = 0; l < inst.L; ++l) {
    json col = json::array();
    for (int m = 0; m < inst.M; ++m)
      col.push_back(instance_json::complex_to_json(sol.beamformers.beams(m, l)));
    beams.push_back(std::move(col));
  }
  out["beamformers"] = std::move(beams);
  const RealVector& used = sol.beamformers.used_power;
  out["used_power"] = std::vector<double>(used.data(), used.data() + used.size());
  out["outer_iters"] = sol.report.outer_iters();
  out["inner_iters"] = sol.report.total_inner_iters;
  out["converged"] = sol.report.converged;
  out["degenerate"] = sol.report.degenerate;
  json per_user = json::array();
  for (int l = 0; l < inst.L; ++l) {
    json row = json::array();
    for (int k = 0; k < inst.K; ++k) row.push_back(sol.report.sinr.per_user(l, k));
    per_user.push_back(std::move(row));
  }
  out["per_user_sinr"] = std::move(per_user);
  return out;
}

inline std::vector<double> power_grid(double pmin, double pmax, double pstep) {
  if (!std::isfinite(pmin) || !std::isfinite(pmax))
    throw InvalidInput("pmin-db", "power range must be finite");
  if (!(pstep > 0.0) || !std::isfinite(pstep))
    throw InvalidInput("pstep-db", "must be > 0");
  if (pmax < pmin) throw InvalidInput("pmax-db", "must be >= pmin-db");
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((pmax - pmin) / pstep + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(pmin + static_cast<double>(i) * pstep);
  return out;
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"Max-min fair multicell multicast beamforming on the oblique manifold"};
  app.require_subcommand(1);

  // solve
  CLI::App* solve = app.add_subcommand("solve", "solve one instance file");
  std::string solve_input, solve_output, solve_trace;
  std::uint64_t solve_seed = 1;
  SolverFlags solve_flags;
  solve->add_option("input,--input", solve_input, "instance JSON")->required();
  solve->add_option("-o,--output", solve_output, "result JSON (default stdout)");
  solve->add_option("--trace", solve_trace, "also write the convergence trace CSV");
  solve->add_option("--seed", solve_seed, "seed for the random starting point");
  solve_flags.attach(*solve);

  // sweep
  CLI::App* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep over BS power");
  ScenarioFlags sweep_scenario;
  SolverFlags sweep_flags;
  double pmin = 0.0, pmax = 12.0, pstep = 3.0;
  std::string sweep_output;
  sweep_scenario.attach(*sweep);
  sweep_flags.attach(*sweep);
  sweep->add_option("--pmin-db", pmin, "lowest power P in dB");
  sweep->add_option("--pmax-db", pmax, "highest power P in dB");
  sweep->add_option("--pstep-db", pstep, "power step in dB");
  sweep->add_option("-o,--output", sweep_output, "summary CSV (default stdout)");

  // trace
  CLI::App* trace = app.add_subcommand("trace", "per-outer-iteration convergence trace");
  std::string trace_input, trace_output;
  ScenarioFlags trace_scenario;
  SolverFlags trace_flags;
  int trace_trial = 0;
  double trace_power_db = 0.0;
  trace->add_option("--input", trace_input, "instance JSON (else a generated scenario)");
  trace->add_option("--trial", trace_trial, "trial index of the generated scenario");
  trace->add_option("--power-db", trace_power_db, "power P in dB of the generated scenario");
  trace->add_option("-o,--output", trace_output, "trace CSV (default stdout)");
  trace_scenario.attach(*trace);
  trace_flags.attach(*trace);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }

  try {
    if (*solve) {
      const DtConfig cfg = solve_flags.config();
      const NetworkInstance inst = read_instance(solve_input);
      const PhysicalSolution sol = solve_physical(inst, solve_seed, cfg);
      nlohmann::json result = solve_result_json(inst, sol);
      if (!solve_trace.empty()) {
        emit(solve_trace, out, [&](std::ostream& os) { csv::write_trace(os, sol.report); });
        result["trace_file"] = solve_trace;
      }
      emit(solve_output, out, [&](std::ostream& os) { os << result.dump(2) << '\n'; });
    } else if (*sweep) {
      const ScenarioConfig scenario = sweep_scenario.config();
      const DtConfig cfg = sweep_flags.config();
      const std::vector<double> powers = power_grid(pmin, pmax, pstep);
      const SweepResult result = run_sweep(scenario, powers, cfg, workers_from_env());
      emit(sweep_output, out, [&](std::ostream& os) { csv::write_sweep(os, result); });
    } else if (*trace) {
      const DtConfig cfg = trace_flags.config();
      NetworkInstance inst;
      std::uint64_t start_seed = trace_scenario.seed;
      if (!trace_input.empty()) {
        inst = read_instance(trace_input);
      } else {
        if (trace_trial < 0) throw InvalidInput("trial", "must be >= 0");
        if (!std::isfinite(trace_power_db))
          throw InvalidInput("power-db", "must be finite");
        const ScenarioConfig scenario = trace_scenario.config();
        const auto trial = static_cast<std::uint64_t>(trace_trial);
        inst = generate_instance(scenario, trial, db_to_linear(trace_power_db));
        start_seed = trial_start_seed(scenario, trial);
      }
      const PhysicalSolution sol = solve_physical(inst, start_seed, cfg);
      emit(trace_output, out, [&](std::ostream& os) { csv::write_trace(os, sol.report); });
    }
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const ShapeMismatch& e) {
    err << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const SweepAborted& e) {
    err << "sweep aborted: " << e.what() << '\n';
    return 1;
  }
  return kOk;
}

}  // namespace oblique_beam::cli

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "oblique_beam/dinkelbach.hpp"
#include "oblique_beam/parallel.hpp"
#include "oblique_beam/problem_model.hpp"

namespace oblique_beam {

/// Per-BS budget multipliers: [1, 1, 2] for three cells, all ones otherwise.
inline std::vector<double> default_budget_pattern(int L) {
  if (L == 3) return {1.0, 1.0, 2.0};
  return std::vector<double>(static_cast<std::size_t>(std::max(L, 0)), 1.0);
}

/// Monte-Carlo scenario: i.i.d. Rayleigh channels, CN(0, intracell_var) from
/// the serving BS and CN(0, intercell_var) from every other BS.
struct ScenarioConfig {
  int L = 3;
  int K = 10;
  int M = 8;
  double intracell_var = 1.0;
  double intercell_var = 0.25;
  double noise_power = 1.0;
  double gamma = 1.0;
  std::vector<double> budget_pattern = default_budget_pattern(3);
  int trials = 500;
  std::uint64_t base_seed = 1;

  void validate() const {
    if (L < 1) throw InvalidInput("cells", "must be >= 1");
    if (K < 1) throw InvalidInput("users", "must be >= 1");
    if (M < 1) throw InvalidInput("antennas", "must be >= 1");
    if (!(intracell_var > 0.0) || !std::isfinite(intracell_var))
      throw InvalidInput("intracell_var", "must be finite and > 0");
    if (!(intercell_var > 0.0) || !std::isfinite(intercell_var))
      throw InvalidInput("eps", "intercell variance must be finite and > 0");
    if (!(noise_power > 0.0) || !std::isfinite(noise_power))
      throw InvalidInput("noise_power", "must be finite and > 0");
    if (!(gamma > 0.0) || !std::isfinite(gamma))
      throw InvalidInput("gamma", "must be finite and > 0");
    if (static_cast<int>(budget_pattern.size()) != L)
      throw InvalidInput("budget_pattern", "expected one multiplier per cell");
    for (double b : budget_pattern)
      if (!(b > 0.0) || !std::isfinite(b))
        throw InvalidInput("budget_pattern", "multipliers must be > 0");
    if (trials < 1) throw InvalidInput("trials", "must be >= 1");
  }
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// Independent stream for (base seed, trial index, stream id).
inline std::mt19937_64 trial_rng(std::uint64_t base_seed,
                                 std::uint64_t trial_index,
                                 std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(base_seed),
                    static_cast<std::uint32_t>(base_seed >> 32),
                    static_cast<std::uint32_t>(trial_index),
                    static_cast<std::uint32_t>(trial_index >> 32), stream};
  return std::mt19937_64(seq);
}

inline constexpr std::uint32_t kChannelStream = 0;
inline constexpr std::uint32_t kStartStream = 1;

/// Seed for the solver's random starting point of a given trial.
inline std::uint64_t trial_start_seed(const ScenarioConfig& cfg,
                                      std::uint64_t trial_index) {
  return trial_rng(cfg.base_seed, trial_index, kStartStream)();
}

/// Channels depend only on (base seed, trial index), so every power level
/// of a sweep sees the same realizations.
inline NetworkInstance generate_instance(const ScenarioConfig& cfg,
                                         std::uint64_t trial_index,
                                         double power = 1.0) {
  cfg.validate();
  auto rng = trial_rng(cfg.base_seed, trial_index, kChannelStream);
  std::normal_distribution<double> gauss(0.0, 1.0);

  NetworkInstance inst;
  inst.L = cfg.L;
  inst.K = cfg.K;
  inst.M = cfg.M;
  inst.channels.reserve(cfg.L);
  for (int j = 0; j < cfg.L; ++j) {
    ComplexMatrix block(cfg.M, cfg.L * cfg.K);
    for (int l = 0; l < cfg.L; ++l) {
      const double sd =
          std::sqrt(0.5 * (j == l ? cfg.intracell_var : cfg.intercell_var));
      for (int k = 0; k < cfg.K; ++k) {
        for (int m = 0; m < cfg.M; ++m) {
          const double re = sd * gauss(rng);
          const double im = sd * gauss(rng);
          block(m, l * cfg.K + k) = Complex(re, im);
        }
      }
    }
    inst.channels.push_back(std::move(block));
  }
  inst.noise_power = RealMatrix::Constant(cfg.L, cfg.K, cfg.noise_power);
  inst.targets = RealVector::Constant(cfg.L, cfg.gamma);
  inst.budgets.resize(cfg.L);
  for (int l = 0; l < cfg.L; ++l) inst.budgets(l) = power * cfg.budget_pattern[l];
  return inst;
}

struct TrialRecord {
  int point = 0;
  int trial = 0;
  double power_db = 0.0;
  double min_sinr = 0.0;
  int outer_iters = 0;
  int inner_iters = 0;
  double ms = 0.0;
  double max_power_violation = 0.0;  // max_l (used_l - P_l), <= 0 if feasible
  bool cap_hit = false;
  bool failed = false;
  std::string error;
};

struct SweepPoint {
  double power_db = 0.0;
  double mean_min_sinr_db = 0.0;  // 10 log10 of the mean linear min-SINR
  double stderr_db = 0.0;
  double mean_outer_iters = 0.0;
  double mean_inner_iters = 0.0;
  double mean_ms = 0.0;
  int completed = 0;
  int failures = 0;
  int cap_hits = 0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::vector<TrialRecord> trials;  // point-major, trials x points entries
};

class SweepAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solves one trial at one power level. Exceptions become a failed record.
inline TrialRecord run_trial(const ScenarioConfig& cfg, int trial,
                             double power_db, const DtConfig& solver) {
  TrialRecord rec;
  rec.trial = trial;
  rec.power_db = power_db;
  try {
    const NetworkInstance inst =
        generate_instance(cfg, static_cast<std::uint64_t>(trial),
                          db_to_linear(power_db));
    PhysicalSolution sol =
        solve_physical(inst, trial_start_seed(cfg, trial), solver);
    rec.min_sinr = sol.report.t;
    rec.outer_iters = sol.report.outer_iters();
    rec.inner_iters = sol.report.total_inner_iters;
    rec.ms = sol.report.wall_ms;
    rec.cap_hit = sol.report.hit_outer_cap;
    rec.max_power_violation =
        (sol.beamformers.used_power - inst.budgets).maxCoeff();
    if (!std::isfinite(rec.min_sinr)) {
      rec.failed = true;
      rec.error = "non-finite objective";
    }
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.error = e.what();
  }
  return rec;
}

/// Runs cfg.trials solves per power level and aggregates them. Work items
/// may run concurrently; aggregation walks a fixed index order.
inline SweepResult run_sweep(const ScenarioConfig& cfg,
                             const std::vector<double>& power_db,
                             const DtConfig& solver, unsigned workers = 1) {
  cfg.validate();
  solver.validate();
  for (double p : power_db)
    if (!std::isfinite(p)) throw InvalidInput("power", "values must be finite");

  const std::size_t n_points = power_db.size();
  const std::size_t n_trials = static_cast<std::size_t>(cfg.trials);
  SweepResult out;
  out.trials.resize(n_points * n_trials);
  parallel_for(out.trials.size(), workers, [&](std::size_t i) {
    const std::size_t p = i / n_trials;
    const int trial = static_cast<int>(i % n_trials);
    TrialRecord rec = run_trial(cfg, trial, power_db[p], solver);
    rec.point = static_cast<int>(p);
    out.trials[i] = std::move(rec);
  });

  std::size_t failures = 0;
  for (const auto& rec : out.trials) failures += rec.failed ? 1 : 0;
  if (!out.trials.empty() &&
      static_cast<double>(failures) > 0.01 * static_cast<double>(out.trials.size()))
    throw SweepAborted("more than 1% of sweep trials failed (" +
                       std::to_string(failures) + " of " +
                       std::to_string(out.trials.size()) + ")");

  for (std::size_t p = 0; p < n_points; ++p) {
    SweepPoint pt;
    pt.power_db = power_db[p];
    double sum = 0.0, sum_sq = 0.0, outer = 0.0, inner = 0.0, ms = 0.0;
    for (std::size_t r = 0; r < n_trials; ++r) {
      const TrialRecord& rec = out.trials[p * n_trials + r];
      if (rec.failed) {
        ++pt.failures;
        continue;
      }
      ++pt.completed;
      pt.cap_hits += rec.cap_hit ? 1 : 0;
      sum += rec.min_sinr;
      sum_sq += rec.min_sinr * rec.min_sinr;
      outer += rec.outer_iters;
      inner += rec.inner_iters;
      ms += rec.ms;
    }
    const double n = pt.completed;
    if (n > 0) {
      const double mean = sum / n;
      pt.mean_min_sinr_db = linear_to_db(mean);
      if (n > 1 && mean > 0.0) {
        const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1));
        // delta method: d(10 log10 x) = 10 / (x ln 10) dx
        pt.stderr_db = 10.0 / (mean * std::log(10.0)) * std::sqrt(var / n);
      }
      pt.mean_outer_iters = outer / n;
      pt.mean_inner_iters = inner / n;
      pt.mean_ms = ms / n;
    } else {
      pt.mean_min_sinr_db = std::nan("");
    }
    out.points.push_back(pt);
  }
  return out;
}

}  // namespace oblique_beam

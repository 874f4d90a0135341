#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "oblique_beam/parallel.hpp"
#include "oblique_beam/problem_model.hpp"

namespace oblique_beam::oracles {

/// Closed-form optimum for one cell with one user: matched filter at full
/// power, t* = P ||h||^2 / (Gamma sigma^2).
inline double single_user_optimum(const NetworkInstance& inst) {
  inst.validate();
  if (inst.L != 1 || inst.K != 1)
    throw InvalidInput("L", "single_user_optimum needs L = 1 and K = 1");
  return inst.budgets(0) * inst.channels[0].col(0).squaredNorm() /
         (inst.targets(0) * inst.noise_power(0, 0));
}

class GridTooLarge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kMaxGridParameters = 5;
inline constexpr double kMaxGridPoints = 1e8;

/// Exhaustive grid over the manifold, one global phase fixed per column.
///
/// Column l is parameterized by a slack angle phi, M-1 hyperspherical
/// magnitude angles and M-1 relative phases:
///   w = [cos(phi) * a(theta, psi); sin(phi)], a_1 real.
/// Angles in [0, pi/2] use `resolution` points including both ends; phases
/// use `resolution` points on [0, 2 pi).
struct GridSpec {
  int resolution = 32;

  static int parameter_count(int M, int L) { return L * (2 * M - 1); }
};

struct GridResult {
  double t = 0.0;
  BeamMatrix beams;
  std::uint64_t points = 0;
};

namespace detail {

struct ColumnLayout {
  int M = 0;
  int params_per_column = 0;
};

inline void fill_column(const std::vector<double>& angles, int offset, int M,
                        Eigen::Ref<ComplexVector> column) {
  const double phi = angles[offset];
  double tail = 1.0;  // product of sines so far
  for (int i = 0; i < M; ++i) {
    double magnitude = tail;
    if (i < M - 1) {
      const double theta = angles[offset + 1 + i];
      magnitude *= std::cos(theta);
      tail *= std::sin(theta);
    }
    const double psi = (i == 0) ? 0.0 : angles[offset + M + i - 1];
    column(i) = std::polar(std::cos(phi) * magnitude, psi);
  }
  column(M) = Complex(std::sin(phi), 0.0);
}

}  // namespace detail

/// Best min-SINR on the grid: a lower bound on the true optimum.
inline GridResult grid_search(const NormalizedProblem& prob,
                              const GridSpec& spec, unsigned workers = 1) {
  if (spec.resolution < 8)
    throw InvalidInput("resolution", "grid resolution must be >= 8");
  const int M = prob.M();
  const int L = prob.L();
  const int per_col = 2 * M - 1;
  const int n_params = GridSpec::parameter_count(M, L);
  if (n_params > kMaxGridParameters)
    throw GridTooLarge("grid search supports at most 5 parameters, got " +
                       std::to_string(n_params));
  const double total_d = std::pow(static_cast<double>(spec.resolution), n_params);
  if (total_d > kMaxGridPoints)
    throw GridTooLarge("grid exceeds 1e8 points");
  const auto total = static_cast<std::uint64_t>(std::llround(total_d));
  const std::uint64_t res = static_cast<std::uint64_t>(spec.resolution);

  // parameter kinds: slack and magnitude angles sweep [0, pi/2] inclusive,
  // phases sweep [0, 2 pi)
  std::vector<bool> is_phase(n_params, false);
  for (int l = 0; l < L; ++l)
    for (int p = M; p < per_col; ++p) is_phase[l * per_col + p] = true;
  const double angle_step = (std::numbers::pi / 2.0) / (spec.resolution - 1);
  const double phase_step = 2.0 * std::numbers::pi / spec.resolution;

  const std::uint64_t chunk = 4096;
  const std::uint64_t n_chunks = (total + chunk - 1) / chunk;
  std::vector<double> chunk_best(n_chunks, -1.0);
  std::vector<std::uint64_t> chunk_arg(n_chunks, 0);

  auto decode = [&](std::uint64_t index, std::vector<double>& angles) {
    for (int p = n_params - 1; p >= 0; --p) {
      const double step = static_cast<double>(index % res);
      angles[p] = is_phase[p] ? step * phase_step : step * angle_step;
      index /= res;
    }
  };
  auto build = [&](const std::vector<double>& angles, BeamMatrix& W) {
    for (int l = 0; l < L; ++l) detail::fill_column(angles, l * per_col, M, W.col(l));
  };

  parallel_for(n_chunks, workers, [&](std::size_t c) {
    std::vector<double> angles(n_params);
    BeamMatrix W(M + 1, L);
    const std::uint64_t begin = c * chunk;
    const std::uint64_t end = std::min(total, begin + chunk);
    double best = -1.0;
    std::uint64_t arg = begin;
    for (std::uint64_t i = begin; i < end; ++i) {
      decode(i, angles);
      build(angles, W);
      const double t = sinr_min(prob, W);
      if (t > best) {  // strict: first index wins ties
        best = t;
        arg = i;
      }
    }
    chunk_best[c] = best;
    chunk_arg[c] = arg;
  });

  GridResult out;
  out.points = total;
  std::uint64_t arg = 0;
  out.t = -1.0;
  for (std::uint64_t c = 0; c < n_chunks; ++c) {
    if (chunk_best[c] > out.t) {
      out.t = chunk_best[c];
      arg = chunk_arg[c];
    }
  }
  std::vector<double> angles(n_params);
  decode(arg, angles);
  out.beams.resize(M + 1, L);
  build(angles, out.beams);
  return out;
}

}  // namespace oblique_beam::oracles

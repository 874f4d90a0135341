#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "oblique_beam/oblique_manifold.hpp"
#include "oblique_beam/smoothed_objective.hpp"

namespace oblique_beam {

/// Which sign convention the Hestenes-Stiefel coefficient uses.
enum class HsRule {
  /// nu = max(0, <G-Z, G> / <G-Z, Y>).
  kPlain,
  /// nu = max(0, <G-Z, G> / <Z-G, Y>): the minimization HS coefficient
  /// rewritten for ascent.
  kAscent,
};

struct RcgConfig {
  double grad_tol = 1e-6;
  /// When set, the stopping threshold is grad_tol * (1 + |F(X0)|).
  bool relative_grad_tol = true;
  int max_iters = 200;
  double armijo_c = 1e-4;
  double armijo_floor = 1e-10;
  int max_halvings = 60;
  HsRule hs_rule = HsRule::kPlain;

  void validate() const {
    if (!(grad_tol > 0.0) || !std::isfinite(grad_tol))
      throw InvalidInput("grad_tol", "must be finite and > 0");
    if (max_iters < 1) throw InvalidInput("max_iters", "must be >= 1");
    if (!(armijo_c > 0.0 && armijo_c < 1.0))
      throw InvalidInput("armijo_c", "must lie in (0, 1)");
    if (!(armijo_floor > 0.0))
      throw InvalidInput("armijo_floor", "must be > 0");
    if (max_halvings < 1) throw InvalidInput("max_halvings", "must be >= 1");
  }
};

inline constexpr double kHsDegenerateDenominator = 1e-30;

/// Modified Hestenes-Stiefel coefficient, clamped at zero. A vanishing
/// denominator yields 0.
inline double hs_coefficient(const BeamMatrix& W, const TangentVector& G,
                             const TangentVector& Z, const TangentVector& Y,
                             HsRule rule = HsRule::kPlain) {
  const TangentVector diff = G - Z;
  const double num = manifold::inner(W, diff, G);
  double den = manifold::inner(W, diff, Y);
  if (rule == HsRule::kAscent) den = -den;
  if (std::abs(den) < kHsDegenerateDenominator) return 0.0;
  const double nu = num / den;
  return std::isfinite(nu) ? std::max(0.0, nu) : 0.0;
}

/// D = G + nu * T(prev_D), falling back to G whenever <G, D> < 0.
inline TangentVector conjugate_direction(const BeamMatrix& W,
                                         const TangentVector& G,
                                         const TangentVector& prev_D,
                                         const TangentVector& prev_G,
                                         HsRule rule = HsRule::kPlain) {
  const TangentVector Y = manifold::transport(W, prev_D);
  const TangentVector Z = manifold::transport(W, prev_G);
  const double nu = hs_coefficient(W, G, Z, Y, rule);
  TangentVector D = G + nu * Y;
  if (manifold::inner(W, G, D) < 0.0) return G;
  return D;
}

struct ArmijoResult {
  double alpha = 0.0;
  bool stalled = false;
  int halvings = 0;
  BeamMatrix point;  // retract(X, alpha D) on success
  double value = 0.0;
};

/// Backtracking search for sufficient increase along an ascent direction.
///
/// `objective(Y)` returns F(Y). `slope` is <grad F(X), D>. When the previous
/// iterate's value is known the first trial step is 2 (F(X) - F(X_prev)) /
/// slope, else 1/||D||; tiny trial steps are reset to 1/||D||.
template <typename Objective>
ArmijoResult armijo_search(Objective&& objective, const BeamMatrix& X,
                           const TangentVector& D, double value_at_x,
                           double slope, std::optional<double> previous_value,
                           const RcgConfig& cfg) {
  ArmijoResult out;
  const double d_norm = manifold::norm(D);
  if (!(slope > 0.0) || !(d_norm > 0.0)) {
    out.stalled = true;
    return out;
  }
  double alpha = 1.0 / d_norm;
  if (previous_value) {
    alpha = 2.0 * (value_at_x - *previous_value) / slope;
  }
  if (!std::isfinite(alpha) || alpha * d_norm <= cfg.armijo_floor) {
    alpha = 1.0 / d_norm;
  }

  for (int h = 0;; ++h) {
    bool sufficient = false;
    try {
      BeamMatrix trial = manifold::retract(X, alpha * D);
      const double v = objective(trial);
      if (v - value_at_x >= cfg.armijo_c * alpha * slope) {
        out.point = std::move(trial);
        out.value = v;
        sufficient = true;
      }
    } catch (const ZeroColumn&) {
      // treated like an insufficient step
    }
    if (sufficient) {
      out.alpha = alpha;
      out.halvings = h;
      return out;
    }
    if (h >= cfg.max_halvings) {
      out.alpha = alpha;
      out.halvings = h;
      out.stalled = true;
      return out;
    }
    alpha *= 0.5;
  }
}

enum class RcgTermination { kGradientTolerance, kMaxIterations, kStepStalled };

struct RcgResult {
  BeamMatrix point;
  int iterations = 0;
  double grad_norm = 0.0;
  double initial_value = 0.0;
  double value = 0.0;
  RcgTermination termination = RcgTermination::kGradientTolerance;
  std::vector<double> objective_trace;  // F at X_0, X_1, ...
  double max_unit_norm_error = 0.0;     // over every iterate
};

/// Riemannian conjugate gradient ascent on F(., t, mu) starting at X0.
inline RcgResult rcg_solve(const NormalizedProblem& prob, const BeamMatrix& X0,
                           const SmoothingParams& params,
                           const RcgConfig& cfg) {
  params.validate();
  cfg.validate();
  prob.check_beams(X0);

  GradientWorkspace ws;
  GradientWorkspace trial_ws;
  auto objective = [&](const BeamMatrix& Y) {
    return evaluate(prob, Y, params, trial_ws);
  };

  RcgResult out;
  BeamMatrix X = X0;
  double value = evaluate(prob, X, params, ws);
  TangentVector G =
      manifold::project_tangent(X, euclidean_gradient(prob, params, ws));
  TangentVector D = G;
  TangentVector prev_G;
  TangentVector prev_D;
  std::optional<double> previous_value;

  out.initial_value = value;
  out.objective_trace.push_back(value);
  out.max_unit_norm_error = manifold::unit_norm_error(X);
  const double threshold =
      cfg.relative_grad_tol ? cfg.grad_tol * (1.0 + std::abs(value))
                            : cfg.grad_tol;

  for (int n = 0;; ++n) {
    out.grad_norm = manifold::norm(G);
    if (out.grad_norm <= threshold) {
      out.termination = RcgTermination::kGradientTolerance;
      break;
    }
    if (n >= cfg.max_iters) {
      out.termination = RcgTermination::kMaxIterations;
      break;
    }
    D = (n == 0) ? G : conjugate_direction(X, G, prev_D, prev_G, cfg.hs_rule);

    const double slope = manifold::inner(X, G, D);
    ArmijoResult step =
        armijo_search(objective, X, D, value, slope, previous_value, cfg);
    if (step.stalled) {
      out.termination = RcgTermination::kStepStalled;
      break;
    }

    previous_value = value;
    prev_G = std::move(G);
    prev_D = std::move(D);
    X = std::move(step.point);
    std::swap(ws, trial_ws);  // trial_ws holds the accepted point
    value = ws.value;
    G = manifold::project_tangent(X, euclidean_gradient(prob, params, ws));
    out.iterations = n + 1;
    out.objective_trace.push_back(value);
    out.max_unit_norm_error =
        std::max(out.max_unit_norm_error, manifold::unit_norm_error(X));
  }

  out.point = std::move(X);
  out.value = value;
  return out;
}

}  // namespace oblique_beam

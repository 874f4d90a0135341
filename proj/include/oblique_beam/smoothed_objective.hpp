#pragma once

#include <cmath>

#include "oblique_beam/oblique_manifold.hpp"
#include "oblique_beam/problem_model.hpp"

namespace oblique_beam {

struct SmoothingParams {
  double t = 0.0;   // Dinkelbach parameter
  double mu = 1.0;  // smoothing level

  void validate() const {
    if (!std::isfinite(t) || t < 0.0)
      throw InvalidInput("t", "must be finite and >= 0");
    if (!std::isfinite(mu) || mu <= 0.0)
      throw InvalidInput("mu", "must be finite and > 0");
  }
};

/// Per-point cache shared by the value, the softmax weights and the
/// gradient. Everything is indexed by flattened user u = l*K + k.
struct GradientWorkspace {
  ComplexMatrix projections;  // L x (L*K), h_{j,u}^H w_j
  RealMatrix gains;           // L x (L*K), |projections|^2
  RealVector margins;         // f_u(W, t)
  RealVector weights;         // beta_u, sums to one
  double min_margin = 0.0;    // F(W, t)
  double value = 0.0;         // F(W, t, mu)
};

/// Fills `ws` at W and returns F(W, t, mu) = -mu log sum_u exp(-f_u / mu),
/// evaluated around the smallest margin so no exponent is positive.
inline double evaluate(const NormalizedProblem& prob, const BeamMatrix& W,
                       const SmoothingParams& params, GradientWorkspace& ws) {
  prob.check_beams(W);
  const int L = prob.L();
  const int K = prob.K();
  const int U = prob.users();
  ws.projections.resize(L, U);
  ws.gains.resize(L, U);
  for (int j = 0; j < L; ++j) {
    ws.projections.row(j).noalias() =
        (prob.channels_from(j).adjoint() * W.col(j)).transpose();
  }
  ws.gains = ws.projections.cwiseAbs2();

  ws.margins.resize(U);
  for (int l = 0; l < L; ++l) {
    const double inv_target = 1.0 / prob.targets()(l);
    for (int k = 0; k < K; ++k) {
      const int u = l * K + k;
      const double signal = ws.gains(l, u);
      const double interference = interference_at(ws.gains, l, u);
      ws.margins(u) = signal * inv_target - params.t * (interference + 1.0);
    }
  }
  ws.min_margin = ws.margins.minCoeff();

  ws.weights = (-(ws.margins.array() - ws.min_margin) / params.mu).exp();
  const double total = ws.weights.sum();  // in [1, U]
  ws.weights /= total;
  ws.value = ws.min_margin - params.mu * std::log(total);
  return ws.value;
}

/// Gradient over the realified variables: column l is
/// 2 sum_{m,k} a_{l,m} beta_{m,k} h_{l,m,k} (h_{l,m,k}^H w_l), with
/// a_{l,l} = 1/Gamma_l and a_{l,m} = -t otherwise. Needs a filled `ws`.
inline ComplexMatrix euclidean_gradient(const NormalizedProblem& prob,
                                        const SmoothingParams& params,
                                        const GradientWorkspace& ws) {
  const int L = prob.L();
  const int K = prob.K();
  ComplexMatrix grad(prob.dim(), L);
  ComplexVector coeff(prob.users());
  for (int l = 0; l < L; ++l) {
    for (int m = 0; m < L; ++m) {
      const double a = (l == m) ? 1.0 / prob.targets()(m) : -params.t;
      for (int k = 0; k < K; ++k) {
        const int u = m * K + k;
        coeff(u) = 2.0 * a * ws.weights(u) * ws.projections(l, u);
      }
    }
    grad.col(l).noalias() = prob.channels_from(l) * coeff;
  }
  return grad;
}

inline double smoothed_value(const NormalizedProblem& prob,
                             const BeamMatrix& W,
                             const SmoothingParams& params) {
  GradientWorkspace ws;
  return evaluate(prob, W, params, ws);
}

/// beta table, L x K.
inline RealMatrix softmax_weights(const NormalizedProblem& prob,
                                  const BeamMatrix& W,
                                  const SmoothingParams& params) {
  GradientWorkspace ws;
  evaluate(prob, W, params, ws);
  RealMatrix out(prob.L(), prob.K());
  for (int l = 0; l < prob.L(); ++l)
    for (int k = 0; k < prob.K(); ++k) out(l, k) = ws.weights(l * prob.K() + k);
  return out;
}

inline ComplexMatrix euclidean_gradient(const NormalizedProblem& prob,
                                        const BeamMatrix& W,
                                        const SmoothingParams& params) {
  GradientWorkspace ws;
  evaluate(prob, W, params, ws);
  return euclidean_gradient(prob, params, ws);
}

inline TangentVector riemannian_gradient(const NormalizedProblem& prob,
                                         const BeamMatrix& W,
                                         const SmoothingParams& params) {
  return manifold::project_tangent(W, euclidean_gradient(prob, W, params));
}

}  // namespace oblique_beam

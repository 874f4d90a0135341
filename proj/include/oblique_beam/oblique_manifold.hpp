#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include "oblique_beam/types.hpp"

namespace oblique_beam {

/// A retraction step landed on (numerically) the origin in some column.
class ZeroColumn : public std::runtime_error {
 public:
  explicit ZeroColumn(int column)
      : std::runtime_error("retraction produced a zero column " +
                           std::to_string(column)),
        column_(column) {}
  int column() const noexcept { return column_; }

 private:
  int column_;
};

/// Geometry of the complex oblique manifold {W : ddiag(W^H W) = I}, i.e. a
/// product of unit spheres in C^n, with metric <U, V> = Re tr(U^H V).
namespace manifold {

inline constexpr double kZeroColumnNorm = 1e-300;

inline void check_same_shape(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeMismatch("manifold operands must have identical shapes");
}

inline double inner(const BeamMatrix& /*W*/, const TangentVector& U,
                    const TangentVector& V) {
  check_same_shape(U, V);
  // Re tr(U^H V) = sum of Re(conj(u_ij) v_ij)
  return (U.real().array() * V.real().array() +
          U.imag().array() * V.imag().array())
      .sum();
}

inline double norm(const TangentVector& U) { return U.norm(); }

/// Per-column Re(w_l^H z_l).
inline RealVector column_real_inner(const ComplexMatrix& W,
                                    const ComplexMatrix& Z) {
  check_same_shape(W, Z);
  return (W.real().array() * Z.real().array() +
          W.imag().array() * Z.imag().array())
      .colwise()
      .sum()
      .transpose();
}

/// Z - W ddiag(Re(W^H Z)).
inline TangentVector project_tangent(const BeamMatrix& W,
                                     const ComplexMatrix& Z) {
  const RealVector coeff = column_real_inner(W, Z);
  TangentVector out = Z;
  for (Eigen::Index l = 0; l < W.cols(); ++l) out.col(l) -= coeff(l) * W.col(l);
  return out;
}

/// Largest |Re(w_l^H u_l)|; zero for an exact tangent vector.
inline double tangency_residual(const BeamMatrix& W, const TangentVector& U) {
  return column_real_inner(W, U).cwiseAbs().maxCoeff();
}

/// Largest | ||w_l|| - 1 | over columns.
inline double unit_norm_error(const BeamMatrix& W) {
  return (W.colwise().norm().array() - 1.0).abs().maxCoeff();
}

inline bool on_manifold(const BeamMatrix& W, double tol = 1e-12) {
  return unit_norm_error(W) <= tol;
}

/// Metric projection: column-wise (w_l + u_l) / ||w_l + u_l||.
inline BeamMatrix retract(const BeamMatrix& W, const TangentVector& U) {
  check_same_shape(W, U);
  BeamMatrix out = W + U;
  for (Eigen::Index l = 0; l < out.cols(); ++l) {
    if (U.col(l).isZero(0.0)) {
      out.col(l) = W.col(l);  // R_W(0) = W exactly
      continue;
    }
    const double n = out.col(l).norm();
    if (!(n >= kZeroColumnNorm)) throw ZeroColumn(static_cast<int>(l));
    out.col(l) /= n;
  }
  return out;
}

/// Transport a tangent vector to T_{W_plus} by projection.
inline TangentVector transport(const BeamMatrix& W_plus,
                               const TangentVector& U) {
  return project_tangent(W_plus, U);
}

/// Columns i.i.d. CN(0, I) then normalized; fixed seed gives a fixed point.
inline BeamMatrix random_point(int rows, int cols, std::uint64_t seed) {
  if (rows < 1 || cols < 1)
    throw InvalidInput("dimensions", "random_point needs rows, cols >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  BeamMatrix W(rows, cols);
  for (int l = 0; l < cols; ++l) {
    for (int i = 0; i < rows; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      W(i, l) = Complex(re, im);
    }
  }
  // a Gaussian column is nonzero with probability one
  for (int l = 0; l < cols; ++l) W.col(l).normalize();
  return W;
}

/// Random tangent vector at W (Gaussian ambient draw, then projected).
inline TangentVector random_tangent(const BeamMatrix& W, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  ComplexMatrix Z(W.rows(), W.cols());
  for (Eigen::Index l = 0; l < W.cols(); ++l) {
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      Z(i, l) = Complex(re, im);
    }
  }
  return project_tangent(W, Z);
}

}  // namespace manifold
}  // namespace oblique_beam

#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "oblique_beam/types.hpp"

namespace oblique_beam {

/// Raw multicell multicast problem.
///
/// Users are flattened as u = l*K + k. `channels[j]` is M x (L*K) and its
/// column u holds the channel from BS j to user k of cell l.
struct NetworkInstance {
  int L = 0;
  int K = 0;
  int M = 0;
  std::vector<ComplexMatrix> channels;
  RealMatrix noise_power;  // L x K, sigma^2 per user
  RealVector targets;      // per-cell SINR target Gamma_l
  RealVector budgets;      // per-BS power budget P_l (linear)

  int users() const noexcept { return L * K; }

  void validate() const {
    if (L < 1) throw InvalidInput("L", "must be >= 1");
    if (K < 1) throw InvalidInput("K", "must be >= 1");
    if (M < 1) throw InvalidInput("M", "must be >= 1");
    if (static_cast<int>(channels.size()) != L)
      throw InvalidInput("channels", "expected L transmitter blocks");
    for (const auto& block : channels) {
      if (block.rows() != M || block.cols() != users())
        throw InvalidInput("channels", "each block must be M x (L*K)");
      if (!block.allFinite())
        throw InvalidInput("channels", "entries must be finite");
    }
    auto positive_finite = [](const auto& v) {
      return v.allFinite() && (v.array() > 0.0).all();
    };
    if (noise_power.rows() != L || noise_power.cols() != K)
      throw InvalidInput("noise_power", "expected L x K entries");
    if (!positive_finite(noise_power))
      throw InvalidInput("noise_power", "entries must be finite and > 0");
    if (targets.size() != L)
      throw InvalidInput("targets", "expected L entries");
    if (!positive_finite(targets))
      throw InvalidInput("targets", "entries must be finite and > 0");
    if (budgets.size() != L)
      throw InvalidInput("budgets", "expected L entries");
    if (!positive_finite(budgets))
      throw InvalidInput("budgets", "entries must be finite and > 0");
  }
};

/// Sphere-lifted problem: budgets and noise are absorbed into the
/// augmented channels, each of length M+1 with a zero slack coordinate.
class NormalizedProblem {
 public:
  NormalizedProblem(int L, int K, int M, std::vector<ComplexMatrix> channels,
                    RealVector targets)
      : L_(L), K_(K), M_(M), channels_(std::move(channels)),
        targets_(std::move(targets)) {
    if (L_ < 1 || K_ < 1 || M_ < 1)
      throw InvalidInput("dimensions", "L, K, M must be >= 1");
    if (static_cast<int>(channels_.size()) != L_)
      throw InvalidInput("channels", "expected L transmitter blocks");
    for (const auto& block : channels_) {
      if (block.rows() != M_ + 1 || block.cols() != L_ * K_)
        throw InvalidInput("channels", "each block must be (M+1) x (L*K)");
      if (!block.allFinite())
        throw InvalidInput("channels", "entries must be finite");
      if (!(block.row(M_).array() == Complex(0.0)).all())
        throw InvalidInput("channels", "slack coordinate must be zero");
    }
    if (targets_.size() != L_ || !targets_.allFinite() ||
        !(targets_.array() > 0.0).all())
      throw InvalidInput("targets", "expected L finite positive entries");
  }

  static NormalizedProblem from(const NetworkInstance& inst) {
    inst.validate();
    std::vector<ComplexMatrix> augmented;
    augmented.reserve(inst.L);
    for (int j = 0; j < inst.L; ++j) {
      ComplexMatrix h = ComplexMatrix::Zero(inst.M + 1, inst.users());
      const double sqrt_p = std::sqrt(inst.budgets(j));
      for (int l = 0; l < inst.L; ++l) {
        for (int k = 0; k < inst.K; ++k) {
          const int u = l * inst.K + k;
          const double scale = sqrt_p / std::sqrt(inst.noise_power(l, k));
          h.col(u).head(inst.M) = scale * inst.channels[j].col(u);
        }
      }
      augmented.push_back(std::move(h));
    }
    return NormalizedProblem(inst.L, inst.K, inst.M, std::move(augmented),
                             inst.targets);
  }

  int L() const noexcept { return L_; }
  int K() const noexcept { return K_; }
  int M() const noexcept { return M_; }
  int users() const noexcept { return L_ * K_; }
  int dim() const noexcept { return M_ + 1; }

  /// (M+1) x (L*K) block of augmented channels leaving BS j.
  const ComplexMatrix& channels_from(int j) const { return channels_[j]; }
  const RealVector& targets() const noexcept { return targets_; }

  void check_beams(const BeamMatrix& W) const {
    if (W.rows() != dim() || W.cols() != L_)
      throw ShapeMismatch("beam matrix must be (M+1) x L");
  }

 private:
  int L_;
  int K_;
  int M_;
  std::vector<ComplexMatrix> channels_;
  RealVector targets_;
};

/// gains(j, u) = |h_{j,u}^H w_j|^2, shape L x (L*K).
inline RealMatrix channel_gains(const NormalizedProblem& prob,
                                const BeamMatrix& W) {
  prob.check_beams(W);
  RealMatrix gains(prob.L(), prob.users());
  for (int j = 0; j < prob.L(); ++j) {
    gains.row(j) =
        (prob.channels_from(j).adjoint() * W.col(j)).cwiseAbs2().transpose();
  }
  return gains;
}

/// Sum of gains(j, u) over j != l.
inline double interference_at(const RealMatrix& gains, int l, int u) {
  double acc = 0.0;
  for (int j = 0; j < gains.rows(); ++j) {
    if (j != l) acc += gains(j, u);
  }
  return acc;
}

struct SinrTable {
  RealMatrix per_user;  // L x K weighted SINR
  double min = 0.0;
  int argmin_cell = 0;
  int argmin_user = 0;
};

inline SinrTable sinr_table_from_gains(const NormalizedProblem& prob,
                                       const RealMatrix& gains) {
  SinrTable out;
  out.per_user.resize(prob.L(), prob.K());
  out.min = std::numeric_limits<double>::infinity();
  for (int l = 0; l < prob.L(); ++l) {
    for (int k = 0; k < prob.K(); ++k) {
      const int u = l * prob.K() + k;
      const double signal = gains(l, u);
      const double interference = interference_at(gains, l, u);
      const double s = signal / (prob.targets()(l) * (interference + 1.0));
      out.per_user(l, k) = s;
      // strict '<' keeps the lexicographically smallest (l, k) on ties
      if (s < out.min) {
        out.min = s;
        out.argmin_cell = l;
        out.argmin_user = k;
      }
    }
  }
  return out;
}

inline SinrTable sinr_table(const NormalizedProblem& prob,
                            const BeamMatrix& W) {
  return sinr_table_from_gains(prob, channel_gains(prob, W));
}

/// Minimum weighted SINR over all users.
inline double sinr_min(const NormalizedProblem& prob, const BeamMatrix& W) {
  return sinr_table(prob, W).min;
}

struct MarginTable {
  double value = 0.0;   // F(W, t) = min over users
  RealMatrix per_user;  // f_{l,k}(W, t), L x K
};

inline MarginTable margin_from_gains(const NormalizedProblem& prob,
                                     const RealMatrix& gains, double t) {
  MarginTable out;
  out.per_user.resize(prob.L(), prob.K());
  for (int l = 0; l < prob.L(); ++l) {
    for (int k = 0; k < prob.K(); ++k) {
      const int u = l * prob.K() + k;
      const double signal = gains(l, u);
      const double interference = interference_at(gains, l, u);
      out.per_user(l, k) =
          signal / prob.targets()(l) - t * (interference + 1.0);
    }
  }
  out.value = out.per_user.minCoeff();
  return out;
}

/// Power shortage/redundancy f_{l,k}(W, t) and its minimum F(W, t).
inline MarginTable margin(const NormalizedProblem& prob, const BeamMatrix& W,
                          double t) {
  return margin_from_gains(prob, channel_gains(prob, W), t);
}

struct PhysicalBeamformers {
  ComplexMatrix beams;    // M x L, column l is BS l's beamformer
  RealVector used_power;  // ||w~_l||^2
};

inline PhysicalBeamformers denormalize(const NormalizedProblem& prob,
                                       const BeamMatrix& W,
                                       const RealVector& budgets) {
  prob.check_beams(W);
  if (budgets.size() != prob.L())
    throw ShapeMismatch("budgets must have L entries");
  PhysicalBeamformers out;
  out.beams.resize(prob.M(), prob.L());
  out.used_power.resize(prob.L());
  for (int l = 0; l < prob.L(); ++l) {
    out.beams.col(l) = std::sqrt(budgets(l)) * W.col(l).head(prob.M());
    out.used_power(l) = out.beams.col(l).squaredNorm();
  }
  return out;
}

/// Weighted min-SINR of physical beamformers against the raw instance.
inline double physical_sinr_min(const NetworkInstance& inst,
                                const ComplexMatrix& beams) {
  if (beams.rows() != inst.M || beams.cols() != inst.L)
    throw ShapeMismatch("physical beams must be M x L");
  RealMatrix gains(inst.L, inst.users());
  for (int j = 0; j < inst.L; ++j) {
    gains.row(j) =
        (inst.channels[j].adjoint() * beams.col(j)).cwiseAbs2().transpose();
  }
  double best = std::numeric_limits<double>::infinity();
  for (int l = 0; l < inst.L; ++l) {
    for (int k = 0; k < inst.K; ++k) {
      const int u = l * inst.K + k;
      const double signal = gains(l, u);
      const double interference = interference_at(gains, l, u);
      best = std::min(best, signal / (inst.targets(l) *
                                      (interference + inst.noise_power(l, k))));
    }
  }
  return best;
}

}  // namespace oblique_beam

#pragma once

#include "mapirl/types.hpp"

#include <optional>

namespace mapirl {

/// Least-squares temporal-difference statistics of a demonstration set and
/// the reward-to-value map C solving (A + ridge*I) C = Z.
struct LstdqMatrices {
  Mat A;  // m_Q x m_Q
  Mat Z;  // m_Q x m_R
  Mat C;  // m_Q x m_R
  double ridge = 0.0;
  double gamma = 1.0;
  double residual = 0.0;  // ||(A + ridge*I)C - Z||_F after the solve
  int skipped_short = 0;  // trajectories too short to contribute a transition
};

struct AccumulateResult {
  Mat A;
  Mat Z;
  int skipped_short = 0;
};

/// A = sum over transitions of q (q - gamma*q')^T and Z = sum of q r^T, where
/// q = g_Q(s_t, a_t), q' = g_Q(s_{t+1}, a_{t+1}), r = g_R(s_t, a_t), summed
/// over t = 0..T_k-2 of each trajectory. Single-state trajectories contribute
/// nothing and are counted in skipped_short.
AccumulateResult accumulate(const DemonstrationSet& demos, const FeatureMaps& maps, double gamma);

/// 1e-6 * trace(A) / m_Q; zero for empty data.
double default_ridge(const Mat& A);

/// Dense solve of (A + ridge*I) C = Z. Throws SingularityError when the
/// regularized matrix has reciprocal condition below 1e-12. `residual`
/// receives ||(A + ridge*I)C - Z||_F when non-null.
Mat solve_c(const Mat& A, const Mat& Z, double ridge, double* residual = nullptr);

/// accumulate + solve_c; ridge defaults to default_ridge(A).
LstdqMatrices build_lstdq(const DemonstrationSet& demos, const FeatureMaps& maps, double gamma,
                          std::optional<double> ridge = std::nullopt);

/// g_Q(s,a)^T C w_R.
double q_hat(const RewardParams& reward, const Mat& C, StateId s, ActionId a,
             const FeatureMaps& maps);

}  // namespace mapirl

#include "mapirl/lstdq.hpp"

#include <Eigen/LU>

#include <stdexcept>

namespace mapirl {

AccumulateResult accumulate(const DemonstrationSet& demos, const FeatureMaps& maps, double gamma) {
  if (!(gamma > 0.0) || gamma > 1.0) throw std::invalid_argument("gamma must be in (0, 1]");
  AccumulateResult out;
  out.A = Mat::Zero(maps.m_Q, maps.m_Q);
  out.Z = Mat::Zero(maps.m_Q, maps.m_R);
  for (const Trajectory& tr : demos.trajectories) {
    const int transitions = tr.transition_count();
    if (transitions == 0) {
      ++out.skipped_short;
      continue;
    }
    Vec q = maps.g_Q(tr.states[0], tr.actions[0]);
    for (int t = 0; t < transitions; ++t) {
      if (q.size() != maps.m_Q) throw std::invalid_argument("g_Q dimension mismatch");
      const Vec r = maps.g_R(tr.states[static_cast<std::size_t>(t)],
                             tr.actions[static_cast<std::size_t>(t)]);
      if (r.size() != maps.m_R) throw std::invalid_argument("g_R dimension mismatch");
      Vec q_next = maps.g_Q(tr.states[static_cast<std::size_t>(t) + 1],
                            tr.actions[static_cast<std::size_t>(t) + 1]);
      if (q_next.size() != maps.m_Q) throw std::invalid_argument("g_Q dimension mismatch");
      out.A.noalias() += q * (q - gamma * q_next).transpose();
      out.Z.noalias() += q * r.transpose();
      q = std::move(q_next);
    }
  }
  return out;
}

double default_ridge(const Mat& A) {
  if (A.rows() == 0) return 0.0;
  return 1e-6 * A.trace() / static_cast<double>(A.rows());
}

Mat solve_c(const Mat& A, const Mat& Z, double ridge, double* residual) {
  if (A.rows() != A.cols()) throw std::invalid_argument("A must be square");
  if (Z.rows() != A.rows()) throw std::invalid_argument("Z row count must match A");
  if (ridge < 0.0) throw std::invalid_argument("ridge must be >= 0");
  const Mat M = A + ridge * Mat::Identity(A.rows(), A.cols());
  Eigen::PartialPivLU<Mat> lu(M);
  if (!(lu.rcond() > 1e-12)) {
    throw SingularityError(
        "LSTDQ matrix is numerically singular; increase the ridge or provide more data");
  }
  Mat C = lu.solve(Z);
  if (residual != nullptr) *residual = (M * C - Z).norm();
  return C;
}

LstdqMatrices build_lstdq(const DemonstrationSet& demos, const FeatureMaps& maps, double gamma,
                          std::optional<double> ridge) {
  AccumulateResult acc = accumulate(demos, maps, gamma);
  LstdqMatrices out;
  out.A = std::move(acc.A);
  out.Z = std::move(acc.Z);
  out.skipped_short = acc.skipped_short;
  out.gamma = gamma;
  out.ridge = ridge.value_or(default_ridge(out.A));
  out.C = solve_c(out.A, out.Z, out.ridge, &out.residual);
  return out;
}

double q_hat(const RewardParams& reward, const Mat& C, StateId s, ActionId a,
             const FeatureMaps& maps) {
  if (C.cols() != reward.w_R.size()) throw std::invalid_argument("C columns must match w_R");
  const Vec q = maps.g_Q(s, a);
  if (q.size() != C.rows()) throw std::invalid_argument("C rows must match g_Q");
  return q.dot(C * reward.w_R);
}

}  // namespace mapirl

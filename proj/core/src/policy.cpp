#include "mapirl/policy.hpp"

#include <cmath>
#include <stdexcept>

namespace mapirl {

LegalFn all_actions_legal(int action_count) {
  std::vector<ActionId> all(static_cast<std::size_t>(action_count));
  for (int a = 0; a < action_count; ++a) all[static_cast<std::size_t>(a)] = a;
  return [all](StateId) { return all; };
}

double log_sum_exp(const Vec& z) {
  const double m = z.maxCoeff();
  double s = 0.0;
  for (int i = 0; i < z.size(); ++i) s += std::exp(z[i] - m);
  return m + std::log(s);
}

namespace {

Vec q_values(const QParams& params, StateId s, const std::vector<ActionId>& legal,
             const FeatureMaps& maps) {
  Vec q(static_cast<Eigen::Index>(legal.size()));
  for (std::size_t i = 0; i < legal.size(); ++i) {
    Vec f = maps.g_Q(s, legal[i]);
    if (f.size() != params.w_Q.size())
      throw std::invalid_argument("softmax_policy: g_Q dimension " + std::to_string(f.size()) +
                                  " does not match w_Q dimension " +
                                  std::to_string(params.w_Q.size()));
    q[static_cast<Eigen::Index>(i)] = f.dot(params.w_Q);
  }
  return q;
}

}  // namespace

Vec softmax_policy(const QParams& params, StateId s, const std::vector<ActionId>& legal,
                   const FeatureMaps& maps) {
  if (legal.empty()) throw std::domain_error("softmax_policy: empty legal action set");
  Vec z = params.beta * q_values(params, s, legal, maps);
  const double lse = log_sum_exp(z);
  Vec p(z.size());
  for (int i = 0; i < z.size(); ++i) p[i] = std::exp(z[i] - lse);
  return p;
}

double log_likelihood(const DemonstrationSet& demos, const QParams& params,
                      const FeatureMaps& maps, const LegalFn& legal_fn) {
  double total = 0.0;
  for (const auto& traj : demos.trajectories) {
    double traj_sum = 0.0;
    const std::size_t n = traj.decision_count();
    for (std::size_t t = 0; t < n; ++t) {
      const StateId s = traj.states[t];
      const ActionId a = traj.actions[t];
      const std::vector<ActionId> legal = legal_fn(s);
      if (legal.empty()) throw std::domain_error("log_likelihood: empty legal action set");
      Vec z = params.beta * q_values(params, s, legal, maps);
      const double lse = log_sum_exp(z);
      std::size_t idx = legal.size();
      for (std::size_t i = 0; i < legal.size(); ++i) {
        if (legal[i] == a) {
          idx = i;
          break;
        }
      }
      if (idx == legal.size())
        throw std::domain_error("log_likelihood: demonstrated action " + std::to_string(a) +
                                " not legal in state " + std::to_string(s));
      traj_sum += z[static_cast<Eigen::Index>(idx)] - lse;
    }
    total += traj_sum;
  }
  return total;
}

double reward_of(const RewardParams& params, StateId s, ActionId a, const FeatureMaps& maps) {
  Vec f = maps.g_R(s, a);
  if (f.size() != params.w_R.size())
    throw std::invalid_argument("reward_of: g_R dimension " + std::to_string(f.size()) +
                                " does not match w_R dimension " +
                                std::to_string(params.w_R.size()));
  return f.dot(params.w_R);
}

}  // namespace mapirl

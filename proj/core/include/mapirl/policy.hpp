#pragma once

#include "mapirl/types.hpp"

namespace mapirl {

/// Softmax (Boltzmann) action distribution pi(a|s) over `legal`, with
/// Q(s,a) = g_Q(s,a)' w_Q. Computed in log space with max subtraction, so the
/// result is finite for any finite inputs. The returned vector is aligned with
/// `legal` and sums to 1.
Vec softmax_policy(const QParams& params, StateId s, const std::vector<ActionId>& legal,
                   const FeatureMaps& maps);

/// Sum of log pi(a_t|s_t) over all decision steps of all trajectories.
/// Terminal marker pairs are skipped. Always <= 0.
///
/// Summed per trajectory first: each subtotal is independent of its
/// neighbors, and the total is their left-to-right fold, so splitting the set
/// changes the result by outer-sum rounding only.
double log_likelihood(const DemonstrationSet& demos, const QParams& params,
                      const FeatureMaps& maps, const LegalFn& legal_fn);

/// Linear reward g_R(s,a)' w_R.
double reward_of(const RewardParams& params, StateId s, ActionId a, const FeatureMaps& maps);

/// Numerically safe log(sum(exp(z))) with max subtraction.
double log_sum_exp(const Vec& z);

}  // namespace mapirl

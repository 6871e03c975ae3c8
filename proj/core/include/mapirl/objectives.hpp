#pragma once

#include "mapirl/types.hpp"

namespace mapirl {

/// Log-posterior value (up to an additive constant) and its gradient in the
/// model parameters.
struct ObjectiveEval {
  double value = 0.0;
  Vec gradient;
};

/// Demonstration log-likelihood under the softmax-of-Q policy, compiled once
/// over a fixed demonstration set for repeated evaluation. Per visited state
/// it stores the effective feature matrix over legal actions and the
/// demonstrated-action counts; LPO uses g_Q directly, LRP uses C^T g_Q so the
/// parameter is w_R.
class SoftmaxObjective {
 public:
  static SoftmaxObjective compile_lpo(const DemonstrationSet& demos, const FeatureMaps& maps,
                                      const LegalFn& legal, double beta);
  static SoftmaxObjective compile_lrp(const DemonstrationSet& demos, const FeatureMaps& maps,
                                      const LegalFn& legal, double beta, const Mat& c_map);

  int dim() const { return dim_; }
  ObjectiveEval eval(const Vec& w) const;

 private:
  struct StateBlock {
    Mat features;  // n_legal x dim
    Vec counts;    // demonstrated-action counts per legal action
    double total = 0.0;
  };

  static SoftmaxObjective compile(const DemonstrationSet& demos, const LegalFn& legal, double beta,
                                  int dim, const std::function<Vec(StateId, ActionId)>& features);

  std::vector<StateBlock> blocks_;  // in first-visit order
  double beta_ = 1.0;
  int dim_ = 0;
};

/// Value = sum over demonstrated steps of beta*q(s,a)^T C w_R - lse over
/// legal actions; gradient in w_R.
ObjectiveEval lrp_objective(const RewardParams& reward, const DemonstrationSet& demos,
                            const Mat& c_map, double beta, const FeatureMaps& maps,
                            const LegalFn& legal);

/// Same likelihood with w_Q parametrized directly; beta comes from `params`.
ObjectiveEval lpo_objective(const QParams& params, const DemonstrationSet& demos,
                            const FeatureMaps& maps, const LegalFn& legal);

/// Structural self-test: with g_R := g_Q and C = I the two objectives must
/// coincide (value and gradient within 1e-10) at random probe points. Treats
/// every action as legal, so maps must be defined on the full action set.
bool identity_reduction_check(const DemonstrationSet& demos, const FeatureMaps& maps, double beta);

}  // namespace mapirl

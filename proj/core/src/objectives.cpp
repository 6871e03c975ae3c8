#include "mapirl/objectives.hpp"

#include "mapirl/policy.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace mapirl {

SoftmaxObjective SoftmaxObjective::compile(const DemonstrationSet& demos, const LegalFn& legal,
                                           double beta, int dim,
                                           const std::function<Vec(StateId, ActionId)>& features) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  SoftmaxObjective obj;
  obj.beta_ = beta;
  obj.dim_ = dim;

  std::unordered_map<StateId, std::size_t> block_of;
  std::unordered_map<StateId, std::vector<ActionId>> legal_of;
  for (const Trajectory& tr : demos.trajectories) {
    const int decisions = tr.decision_count();
    for (int t = 0; t < decisions; ++t) {
      const StateId s = tr.states[static_cast<std::size_t>(t)];
      const ActionId a = tr.actions[static_cast<std::size_t>(t)];
      auto it = block_of.find(s);
      if (it == block_of.end()) {
        std::vector<ActionId> acts = legal(s);
        if (acts.empty()) throw std::domain_error("no legal actions at a demonstrated state");
        StateBlock block;
        block.features.resize(static_cast<Eigen::Index>(acts.size()), dim);
        for (std::size_t j = 0; j < acts.size(); ++j) {
          const Vec f = features(s, acts[j]);
          if (f.size() != dim) throw std::invalid_argument("feature dimension mismatch");
          block.features.row(static_cast<Eigen::Index>(j)) = f.transpose();
        }
        block.counts = Vec::Zero(static_cast<Eigen::Index>(acts.size()));
        it = block_of.emplace(s, obj.blocks_.size()).first;
        legal_of.emplace(s, std::move(acts));
        obj.blocks_.push_back(std::move(block));
      }
      const std::vector<ActionId>& acts = legal_of.at(s);
      const auto pos = std::lower_bound(acts.begin(), acts.end(), a);
      if (pos == acts.end() || *pos != a) {
        throw std::domain_error("demonstrated action is not legal in its state");
      }
      StateBlock& block = obj.blocks_[it->second];
      block.counts[static_cast<Eigen::Index>(pos - acts.begin())] += 1.0;
      block.total += 1.0;
    }
  }
  return obj;
}

SoftmaxObjective SoftmaxObjective::compile_lpo(const DemonstrationSet& demos,
                                               const FeatureMaps& maps, const LegalFn& legal,
                                               double beta) {
  auto features = [&maps](StateId s, ActionId a) { return maps.g_Q(s, a); };
  return compile(demos, legal, beta, maps.m_Q, features);
}

SoftmaxObjective SoftmaxObjective::compile_lrp(const DemonstrationSet& demos,
                                               const FeatureMaps& maps, const LegalFn& legal,
                                               double beta, const Mat& c_map) {
  if (c_map.rows() != maps.m_Q) throw std::invalid_argument("C rows must match m_Q");
  auto features = [&maps, &c_map](StateId s, ActionId a) -> Vec {
    return c_map.transpose() * maps.g_Q(s, a);
  };
  return compile(demos, legal, beta, static_cast<int>(c_map.cols()), features);
}

ObjectiveEval SoftmaxObjective::eval(const Vec& w) const {
  if (w.size() != dim_) throw std::invalid_argument("parameter dimension mismatch");
  ObjectiveEval out;
  out.gradient = Vec::Zero(dim_);
  // Scaling w first makes evaluating (w, beta) and (beta*w, 1) bit-identical.
  const Vec scaled = beta_ * w;
  for (const StateBlock& block : blocks_) {
    const Vec z = block.features * scaled;
    const double lse = log_sum_exp(z);
    out.value += block.counts.dot(z) - block.total * lse;
    const Vec pi = (z.array() - lse).exp();
    out.gradient.noalias() +=
        beta_ * (block.features.transpose() * (block.counts - block.total * pi));
  }
  return out;
}

ObjectiveEval lrp_objective(const RewardParams& reward, const DemonstrationSet& demos,
                            const Mat& c_map, double beta, const FeatureMaps& maps,
                            const LegalFn& legal) {
  return SoftmaxObjective::compile_lrp(demos, maps, legal, beta, c_map).eval(reward.w_R);
}

ObjectiveEval lpo_objective(const QParams& params, const DemonstrationSet& demos,
                            const FeatureMaps& maps, const LegalFn& legal) {
  return SoftmaxObjective::compile_lpo(demos, maps, legal, params.beta).eval(params.w_Q);
}

bool identity_reduction_check(const DemonstrationSet& demos, const FeatureMaps& maps, double beta) {
  // Rebind g_R := g_Q so C = I is dimensionally valid.
  FeatureMaps squared = maps;
  squared.m_R = maps.m_Q;
  squared.g_R = maps.g_Q;
  const LegalFn legal = all_actions_legal(maps.action_count);
  const Mat identity = Mat::Identity(maps.m_Q, maps.m_Q);

  std::mt19937_64 rng(0x5eedf00dULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int probe = 0; probe < 3; ++probe) {
    Vec w(maps.m_Q);
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = normal(rng);
    const ObjectiveEval lrp = lrp_objective({w}, demos, identity, beta, squared, legal);
    const ObjectiveEval lpo = lpo_objective({w, beta}, demos, squared, legal);
    if (std::abs(lrp.value - lpo.value) > 1e-10) return false;
    if ((lrp.gradient - lpo.gradient).lpNorm<Eigen::Infinity>() > 1e-10) return false;
  }
  return true;
}

}  // namespace mapirl

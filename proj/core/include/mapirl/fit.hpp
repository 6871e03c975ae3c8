#pragma once

#include "mapirl/lbfgs.hpp"
#include "mapirl/lstdq.hpp"
#include "mapirl/types.hpp"

#include <optional>
#include <string>

namespace mapirl {

/// Reward-prior fit: LSTDQ matrices from the demonstrations, then MAP ascent
/// in w_R. w_Q = C*w_R is computed, never fitted.
struct LrpFit {
  RewardParams reward;
  QParams values;
  LstdqMatrices matrices;
  FitResult result;
};

/// Direct policy-parameter fit in w_Q.
struct LpoFit {
  QParams values;
  FitResult result;
};

LrpFit fit_lrp(const DemonstrationSet& demos, const FeatureMaps& maps, const LegalFn& legal,
               double gamma, double beta = 1.0, std::optional<double> ridge = std::nullopt,
               const SolverConfig& config = {});

LpoFit fit_lpo(const DemonstrationSet& demos, const FeatureMaps& maps, const LegalFn& legal,
               double beta = 1.0, const SolverConfig& config = {});

/// Per state, argmax over legal actions of g_Q(s,a)^T w_Q; ties go to the
/// lowest action index. Rows are one-hot.
PolicyTable greedy_policy(const QParams& values, const FeatureMaps& maps, const LegalFn& legal,
                          int state_count);

/// Serialized fit document: {model, beta, gamma, ridge, w_R?, w_Q,
/// feature_spec, objective, converged}.
struct ParamsDoc {
  std::string model;  // "lrp" | "lpo"
  double beta = 1.0;
  double gamma = 1.0;
  double ridge = 0.0;
  std::optional<Vec> w_R;
  Vec w_Q;
  std::string feature_spec;
  double objective = 0.0;
  bool converged = false;
};

std::string params_to_json(const ParamsDoc& doc);
ParamsDoc params_from_json(const std::string& text);
void write_params(const ParamsDoc& doc, const std::string& path);
ParamsDoc read_params(const std::string& path);

}  // namespace mapirl

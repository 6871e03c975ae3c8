#pragma once

#include "mapirl/objectives.hpp"
#include "mapirl/types.hpp"

#include <optional>

namespace mapirl {

struct SolverConfig {
  double gradient_tolerance = 1e-6;  // sup-norm test on the gradient
  int max_iterations = 500;
  int history_size = 10;
  std::optional<Vec> init;  // defaults to zeros
  double l2_penalty = 0.0;  // optional -l2_penalty*||w||^2 added; default off
};

struct FitResult {
  Vec params;
  double objective = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

using ObjectiveFn = std::function<ObjectiveEval(const Vec&)>;

/// Limited-memory quasi-Newton ascent of a concave objective with a
/// backtracking sufficient-increase line search from a unit trial step. With
/// no curvature history yet, the direction is the gradient scaled by
/// 1/||g||^2, so the first trial step has length 1/||g||. Stops on the
/// gradient sup-norm test or the iteration cap. Accepted iterates have
/// non-decreasing objective values. Throws NumericalError when the objective
/// is not finite at the start, every step along an ascent direction evaluates
/// non-finite, or a gradient turns non-finite.
FitResult maximize(const ObjectiveFn& objective, int dim, const SolverConfig& config = {});

}  // namespace mapirl

#include "mapirl/lbfgs.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace mapirl {

namespace {

double sup_norm(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

struct CurvaturePair {
  Vec s;
  Vec y;  // gradient drop g_k - g_{k+1}; positive curvature for concave f
  double rho;
};

// Two-loop recursion applying the inverse curvature estimate to the gradient.
// With empty history the direction is grad/||grad||^2, so the unit trial step
// has length 1/||grad||; this also makes the whole iteration equivariant
// under rescaling of the objective's parametrization, which keeps runs at
// different inverse temperatures in exact correspondence.
Vec ascent_direction(const Vec& grad, const std::deque<CurvaturePair>& history) {
  if (history.empty()) return grad / grad.squaredNorm();
  Vec q = grad;
  std::vector<double> alpha(history.size());
  for (std::size_t i = history.size(); i-- > 0;) {
    alpha[i] = history[i].rho * history[i].s.dot(q);
    q -= alpha[i] * history[i].y;
  }
  const CurvaturePair& last = history.back();
  q *= last.s.dot(last.y) / last.y.dot(last.y);
  for (std::size_t i = 0; i < history.size(); ++i) {
    const double beta = history[i].rho * history[i].y.dot(q);
    q += (alpha[i] - beta) * history[i].s;
  }
  return q;
}

}  // namespace

FitResult maximize(const ObjectiveFn& objective, int dim, const SolverConfig& config) {
  if (!(config.gradient_tolerance > 0.0)) throw std::invalid_argument("tolerance must be > 0");
  if (config.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (config.history_size < 1) throw std::invalid_argument("history_size must be >= 1");
  if (config.l2_penalty < 0.0) throw std::invalid_argument("l2_penalty must be >= 0");

  Vec x = config.init.value_or(Vec::Zero(dim));
  if (x.size() != dim) throw std::invalid_argument("init has the wrong dimension");

  const double lambda = config.l2_penalty;
  auto eval = [&](const Vec& w) {
    ObjectiveEval e = objective(w);
    if (e.gradient.size() != dim) throw std::invalid_argument("gradient dimension mismatch");
    if (lambda > 0.0) {
      e.value -= lambda * w.squaredNorm();
      e.gradient -= 2.0 * lambda * w;
    }
    return e;
  };

  ObjectiveEval cur = eval(x);
  if (!std::isfinite(cur.value) || !cur.gradient.allFinite()) {
    throw NumericalError("objective is not finite at the initial point");
  }

  FitResult out;
  std::deque<CurvaturePair> history;
  constexpr double kArmijo = 1e-4;

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    out.gradient_norm = sup_norm(cur.gradient);
    if (out.gradient_norm < config.gradient_tolerance) {
      out.converged = true;
      break;
    }

    const Vec d = ascent_direction(cur.gradient, history);
    const double slope = cur.gradient.dot(d);
    if (!(slope > 0.0)) {
      history.clear();  // curvature estimate went bad; next round is plain ascent
      continue;
    }

    // Backtracking sufficient-increase search from a unit trial step.
    double step = 1.0;
    bool accepted = false;
    bool saw_finite = false;
    ObjectiveEval best;
    double best_step = 0.0;
    for (int halvings = 0; halvings < 60; ++halvings, step *= 0.5) {
      ObjectiveEval trial = eval(x + step * d);
      if (std::isfinite(trial.value)) saw_finite = true;
      if (std::isfinite(trial.value) && trial.value >= cur.value + kArmijo * step * slope) {
        accepted = true;
        best = std::move(trial);
        best_step = step;
        break;
      }
    }
    if (!accepted) {
      if (!saw_finite) {
        throw NumericalError("objective is not finite along the ascent direction");
      }
      break;  // finite values but no sufficient increase at this precision
    }

    const Vec x_next = x + best_step * d;
    if (!best.gradient.allFinite()) {
      throw NumericalError("gradient is not finite at an accepted iterate");
    }
    const Vec s = x_next - x;
    const Vec y = cur.gradient - best.gradient;
    const double sy = s.dot(y);
    if (sy > 1e-10 * s.norm() * y.norm()) {
      history.push_back({s, y, 1.0 / sy});
      if (static_cast<int>(history.size()) > config.history_size) history.pop_front();
    }
    x = x_next;
    cur = std::move(best);
    out.iterations = iter + 1;
  }

  out.params = std::move(x);
  out.objective = cur.value;
  out.gradient_norm = sup_norm(cur.gradient);
  if (out.gradient_norm < config.gradient_tolerance) out.converged = true;
  return out;
}

}  // namespace mapirl

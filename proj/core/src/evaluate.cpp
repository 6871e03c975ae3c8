#include "mapirl/evaluate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mapirl {

namespace {

constexpr int kMaxSweeps = 200000;

// Convergence threshold on the sup-norm change: contraction gives the
// standard gamma/(1-gamma) error bound; at discount 1 (episodic DAG models)
// the values settle exactly, so only an exact fixed point stops the loop.
double change_threshold(double gamma, double tol) {
  if (gamma < 1.0) return tol * (1.0 - gamma) / std::max(gamma, 1e-12);
  return 0.0;
}

double expected_next(const MdpModel& model, StateId s, ActionId a, const Vec& V) {
  double acc = 0.0;
  for (const TransitionEntry& e : model.row(s, a)) acc += e.prob * V[e.next];
  return acc;
}

void require_acting_states(const MdpModel& model) {
  for (StateId s = 0; s < model.state_count; ++s) {
    if (model.legal[static_cast<std::size_t>(s)].empty()) {
      throw std::logic_error("state has no legal actions");
    }
  }
}

}  // namespace

ValueFunctions value_iteration(const MdpModel& model, const RewardFn& reward, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  require_acting_states(model);
  const double gamma = model.discount;
  const double threshold = change_threshold(gamma, tol);
  ValueFunctions out;
  out.V = Vec::Zero(model.state_count);
  Vec next(model.state_count);

  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    double change = 0.0;
    for (StateId s = 0; s < model.state_count; ++s) {
      if (model.is_terminal(s)) {
        next[s] = 0.0;
        continue;
      }
      double best = -std::numeric_limits<double>::infinity();
      for (const ActionId a : model.legal[static_cast<std::size_t>(s)]) {
        const double q = reward(s, a) + gamma * expected_next(model, s, a, out.V);
        if (q > best) best = q;
      }
      next[s] = best;
      change = std::max(change, std::abs(next[s] - out.V[s]));
    }
    out.V.swap(next);
    if (change <= threshold) break;
  }
  if (sweep == kMaxSweeps) {
    throw NumericalError("value iteration hit the sweep cap; the model may be improper");
  }
  out.iterations = sweep + 1;

  out.Q = Mat::Constant(model.state_count, model.action_count,
                        -std::numeric_limits<double>::infinity());
  out.policy.probs.assign(static_cast<std::size_t>(model.state_count),
                          Vec::Zero(model.action_count));
  for (StateId s = 0; s < model.state_count; ++s) {
    if (model.is_terminal(s)) {
      out.V[s] = 0.0;
      for (const ActionId a : model.legal[static_cast<std::size_t>(s)]) out.Q(s, a) = 0.0;
      out.policy.probs[static_cast<std::size_t>(s)][model.legal[static_cast<std::size_t>(s)]
                                                        .front()] = 1.0;
      continue;
    }
    ActionId best_a = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (const ActionId a : model.legal[static_cast<std::size_t>(s)]) {
      const double q = reward(s, a) + gamma * expected_next(model, s, a, out.V);
      out.Q(s, a) = q;
      if (q > best) {
        best = q;
        best_a = a;
      }
    }
    out.policy.probs[static_cast<std::size_t>(s)][best_a] = 1.0;
  }
  return out;
}

ValueFunctions value_iteration(const MdpModel& model, double tol) {
  return value_iteration(
      model, [&model](StateId s, ActionId a) { return model.reward(s, a); }, tol);
}

Vec policy_evaluation(const MdpModel& model, const RewardFn& reward, const PolicyTable& pi,
                      double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  if (pi.state_count() != model.state_count) {
    throw std::invalid_argument("policy size does not match the model");
  }
  require_acting_states(model);
  const double gamma = model.discount;
  const double threshold = change_threshold(gamma, tol);
  Vec V = Vec::Zero(model.state_count);
  Vec next(model.state_count);

  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    double change = 0.0;
    for (StateId s = 0; s < model.state_count; ++s) {
      if (model.is_terminal(s)) {
        next[s] = 0.0;
        continue;
      }
      const Vec& row = pi.row(s);
      double acc = 0.0;
      for (const ActionId a : model.legal[static_cast<std::size_t>(s)]) {
        const double p = row[a];
        if (p == 0.0) continue;
        acc += p * (reward(s, a) + gamma * expected_next(model, s, a, V));
      }
      next[s] = acc;
      change = std::max(change, std::abs(next[s] - V[s]));
    }
    V.swap(next);
    if (change <= threshold) break;
  }
  if (sweep == kMaxSweeps) {
    throw NumericalError("policy evaluation hit the sweep cap; the model may be improper");
  }
  return V;
}

double loss(const MdpModel& model, const PolicyTable& pi, double tol) {
  const ValueFunctions opt = value_iteration(model, tol);
  const Vec v_pi = policy_evaluation(
      model, [&model](StateId s, ActionId a) { return model.reward(s, a); }, pi, tol);
  double acc = 0.0;
  for (StateId s = 0; s < model.state_count; ++s) {
    const double mu = model.start_dist[static_cast<std::size_t>(s)];
    if (mu != 0.0) acc += mu * (opt.V[s] - v_pi[s]);
  }
  return acc;
}

MinimaxSolution minimax_solve(const GameModel& game) {
  MinimaxSolution sol;
  const int n = game.state_count();
  sol.value.assign(static_cast<std::size_t>(n), 0);
  sol.optimal_moves.resize(static_cast<std::size_t>(n));

  // Game ids are in breadth-first order, so every successor has a larger id
  // and a reverse sweep is a valid backward induction.
  for (StateId s = static_cast<StateId>(n) - 1; s >= 0; --s) {
    if (game.is_terminal(s)) {
      sol.value[static_cast<std::size_t>(s)] = game.outcome[static_cast<std::size_t>(s)];
      continue;
    }
    const bool x_moves = game.player_to_move[static_cast<std::size_t>(s)] > 0;
    int best = x_moves ? -2 : 2;
    for (const ActionId a : game.legal_moves[static_cast<std::size_t>(s)]) {
      const int v = sol.value[static_cast<std::size_t>(game.successor(s, a))];
      if (x_moves ? v > best : v < best) best = v;
    }
    sol.value[static_cast<std::size_t>(s)] = best;
    for (const ActionId a : game.legal_moves[static_cast<std::size_t>(s)]) {
      if (sol.value[static_cast<std::size_t>(game.successor(s, a))] == best) {
        sol.optimal_moves[static_cast<std::size_t>(s)].push_back(a);
      }
    }
  }
  return sol;
}

MatchStats play_match(const PolicyTable& x_policy, const PolicyTable& o_policy,
                      const GameModel& game, long long n_games, std::uint64_t seed) {
  MatchStats stats;
  if (n_games < 0) throw std::invalid_argument("n_games must be >= 0");
  long long total = 0;
  for (long long i = 0; i < n_games; ++i) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
    StateId s = game.root;
    while (!game.is_terminal(s)) {
      const bool x_moves = game.player_to_move[static_cast<std::size_t>(s)] > 0;
      const PolicyTable& table = x_moves ? x_policy : o_policy;
      if (s >= table.state_count()) throw std::domain_error("policy undefined at a reached state");
      const Vec& row = table.row(s);
      double mass = 0.0;
      for (Eigen::Index a = 0; a < row.size(); ++a) mass += row[a];
      if (mass <= 0.0) throw std::domain_error("policy undefined at a reached state");
      const double u = uniform_unit(rng) * mass;
      double cum = 0.0;
      ActionId chosen = -1;
      for (Eigen::Index a = 0; a < row.size(); ++a) {
        if (row[a] <= 0.0) continue;
        cum += row[a];
        chosen = static_cast<ActionId>(a);
        if (u < cum) break;
      }
      s = game.successor(s, chosen);
    }
    const int outcome = game.outcome[static_cast<std::size_t>(s)];
    if (outcome > 0) ++stats.wins;
    else if (outcome < 0) ++stats.losses;
    else ++stats.draws;
    total += outcome;
  }
  stats.mean_score =
      n_games == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(n_games);
  return stats;
}

}  // namespace mapirl

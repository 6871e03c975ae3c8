#pragma once

#include "mapirl/mdp.hpp"
#include "mapirl/tictactoe.hpp"

#include <cstdint>
#include <functional>

namespace mapirl {

/// Exact values from dynamic programming on a known model. Q is -infinity on
/// illegal actions; V(terminal) = 0; the policy is greedy with lowest-index
/// tie-breaking.
struct ValueFunctions {
  Vec V;
  Mat Q;  // state x action
  PolicyTable policy;
  int iterations = 0;
};

using RewardFn = std::function<double(StateId, ActionId)>;

/// Bellman-optimal values within sup-norm `tol`. Discount 1 is supported for
/// episodic models and stops on an exact fixed point; improper models hit the
/// iteration cap and raise NumericalError.
ValueFunctions value_iteration(const MdpModel& model, const RewardFn& reward, double tol = 1e-9);

/// value_iteration against the model's own reward table.
ValueFunctions value_iteration(const MdpModel& model, double tol = 1e-9);

/// Fixed point of the Bellman expectation operator for `pi` within tol.
Vec policy_evaluation(const MdpModel& model, const RewardFn& reward, const PolicyTable& pi,
                      double tol = 1e-9);

/// sum_s mu(s) (V*(s) - V^pi(s)), both computed against the model's true
/// reward.
double loss(const MdpModel& model, const PolicyTable& pi, double tol = 1e-9);

/// Backward induction over the game DAG. Values are +1/0/-1 from X's
/// perspective; optimal moves preserve the mover's best value, listed in
/// ascending action order.
struct MinimaxSolution {
  std::vector<int> value;
  std::vector<std::vector<ActionId>> optimal_moves;
};

MinimaxSolution minimax_solve(const GameModel& game);

struct MatchStats {
  long long wins = 0;
  long long draws = 0;
  long long losses = 0;
  double mean_score = 0.0;  // average outcome from X's perspective
};

/// Plays n_games independent games; game i uses generator seed
/// mix_seed(seed, i), so results do not depend on play order. Policies are
/// indexed by game states with rows over the 9 cells. Throws
/// std::domain_error when a policy row at a reached state has no mass.
MatchStats play_match(const PolicyTable& x_policy, const PolicyTable& o_policy,
                      const GameModel& game, long long n_games, std::uint64_t seed);

}  // namespace mapirl

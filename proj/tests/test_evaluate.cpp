#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mapirl/evaluate.hpp"
#include "mapirl/gridworld.hpp"
#include "mapirl/harness.hpp"
#include "mapirl/tictactoe.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>

using namespace mapirl;

namespace {

// One decision state feeding a terminal with reward 1.
MdpModel chain2() {
  MdpModel m;
  m.state_count = 2;
  m.action_count = 1;
  m.discount = 0.9;
  m.legal = {{0}, {0}};
  m.rows = {{{1, 1.0}}, {{1, 1.0}}};
  m.true_reward = {1.0, 0.0};
  m.start_dist = {1.0, 0.0};
  m.terminal = {false, true};
  m.validate();
  return m;
}

// Ring of 3 states, advance or retreat, no terminal.
MdpModel chain3(double discount = 0.9) {
  MdpModel m;
  m.state_count = 3;
  m.action_count = 2;
  m.discount = discount;
  m.legal = {{0, 1}, {0, 1}, {0, 1}};
  m.rows.resize(6);
  for (StateId s = 0; s < 3; ++s) {
    m.rows[m.sa_index(s, 0)] = {{(s + 1) % 3, 0.75}, {s, 0.25}};
    m.rows[m.sa_index(s, 1)] = {{(s + 2) % 3, 0.5}, {s, 0.5}};
  }
  m.true_reward = {0.3, -0.2, 1.0, 0.1, -0.5, 0.7};
  m.start_dist = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  m.terminal = {false, false, false};
  m.validate();
  return m;
}

StateId walk(const GameModel& game, std::initializer_list<ActionId> cells) {
  StateId s = game.root;
  for (ActionId c : cells) s = game.successor(s, c);
  return s;
}

// Independent minimax over raw board codes, no reference to the game graph.
int board_value(std::uint32_t board, int to_move,
                std::unordered_map<std::uint64_t, int>& memo) {
  using namespace tictactoe;
  for (const auto& line : kLines) {
    const int a = cell_of(board, line[0]);
    if (a != kEmpty && a == cell_of(board, line[1]) && a == cell_of(board, line[2])) {
      return a == kX ? 1 : -1;
    }
  }
  bool full = true;
  for (int i = 0; i < 9; ++i)
    if (cell_of(board, i) == kEmpty) full = false;
  if (full) return 0;

  const std::uint64_t key = (static_cast<std::uint64_t>(board) << 1) | (to_move == kX ? 1 : 0);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;

  int best = to_move == kX ? -2 : 2;
  for (int i = 0; i < 9; ++i) {
    if (cell_of(board, i) != kEmpty) continue;
    const int v = board_value(with_cell(board, i, to_move), to_move == kX ? kO : kX, memo);
    best = to_move == kX ? std::max(best, v) : std::min(best, v);
  }
  memo[key] = best;
  return best;
}

std::uint32_t swap_marks(std::uint32_t board) {
  using namespace tictactoe;
  std::uint32_t out = 0;
  for (int i = 0; i < 9; ++i) {
    int c = cell_of(board, i);
    if (c == kX) c = kO;
    else if (c == kO) c = kX;
    out = with_cell(out, i, c);
  }
  return out;
}

// Uniform-over-legal rows at every non-terminal state, so the same table can
// play either side.
PolicyTable uniform_game_policy(const GameModel& game) {
  PolicyTable pt;
  pt.probs.assign(game.state_count(), Vec::Zero(GameModel::kCells));
  for (StateId s = 0; s < game.state_count(); ++s) {
    if (game.is_terminal(s)) continue;
    const auto& legal = game.legal_moves[s];
    for (ActionId m : legal) pt.probs[s][m] = 1.0 / static_cast<double>(legal.size());
  }
  return pt;
}

// X-side table playing uniformly over the minimax-optimal moves.
PolicyTable minimax_x_policy(const GameModel& game, const MinimaxSolution& sol,
                             bool deterministic = false) {
  PolicyTable pt;
  pt.probs.assign(game.state_count(), Vec::Zero(GameModel::kCells));
  for (StateId s = 0; s < game.state_count(); ++s) {
    if (game.is_terminal(s) || game.player_to_move[s] != 1) continue;
    const auto& moves = sol.optimal_moves[s];
    if (deterministic) {
      pt.probs[s][moves.front()] = 1.0;
    } else {
      for (ActionId m : moves) pt.probs[s][m] = 1.0 / static_cast<double>(moves.size());
    }
  }
  return pt;
}

}  // namespace

TEST_CASE("zero rewards give identically zero values") {
  MdpModel m = chain3();
  m.true_reward.assign(6, 0.0);
  ValueFunctions vi = value_iteration(m);
  CHECK(vi.V.cwiseAbs().maxCoeff() == 0.0);

  PolicyTable uniform = uniform_policy(m);
  Vec v = policy_evaluation(m, [&](StateId s, ActionId a) { return m.reward(s, a); }, uniform);
  CHECK(v.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("a single rewarded step into a terminal is worth exactly its reward") {
  MdpModel m = chain2();
  ValueFunctions vi = value_iteration(m, 1e-12);
  CHECK(vi.V[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(vi.V[1] == 0.0);
  CHECK(vi.Q(0, 0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(vi.policy.action_at(0) == 0);
  CHECK(vi.iterations > 0);

  // reward override is used instead of the model table
  ValueFunctions doubled = value_iteration(m, [](StateId, ActionId) { return 2.0; }, 1e-12);
  CHECK(doubled.V[0] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(doubled.V[1] == 0.0);  // terminal stays pinned at zero
}

TEST_CASE("illegal actions carry minus infinity and V is the legal max") {
  MdpModel m;
  m.state_count = 2;
  m.action_count = 2;
  m.discount = 0.9;
  m.legal = {{0}, {0, 1}};
  m.rows.resize(4);
  m.rows[m.sa_index(0, 0)] = {{1, 1.0}};
  m.rows[m.sa_index(1, 0)] = {{0, 1.0}};
  m.rows[m.sa_index(1, 1)] = {{1, 1.0}};
  m.true_reward = {0.5, 0.0, 0.0, 0.2};
  m.start_dist = {1.0, 0.0};
  m.terminal = {false, false};
  m.validate();

  ValueFunctions vi = value_iteration(m, 1e-10);
  CHECK(vi.Q(0, 1) == -std::numeric_limits<double>::infinity());
  for (StateId s = 0; s < 2; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (ActionId a : m.legal[s]) best = std::max(best, vi.Q(s, a));
    CHECK(vi.V[s] == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("values satisfy the Bellman optimality equation") {
  MdpModel m = chain3();
  const double tol = 1e-10;
  ValueFunctions vi = value_iteration(m, tol);
  for (StateId s = 0; s < m.state_count; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (ActionId a : m.legal[s]) {
      double q = m.reward(s, a);
      for (const auto& e : m.row(s, a)) q += m.discount * e.prob * vi.V[e.next];
      best = std::max(best, q);
      CHECK(vi.Q(s, a) == doctest::Approx(q).epsilon(1e-8));
    }
    CHECK(std::abs(vi.V[s] - best) < 1e-8);
  }
}

TEST_CASE("evaluating the greedy optimal policy recovers the optimal values") {
  MdpModel m = chain3();
  ValueFunctions vi = value_iteration(m, 1e-11);
  Vec v = policy_evaluation(m, [&](StateId s, ActionId a) { return m.reward(s, a); }, vi.policy,
                            1e-11);
  CHECK((v - vi.V).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("policy evaluation matches a direct linear solve") {
  MdpModel m = chain3();
  std::mt19937_64 rng(5);
  PolicyTable pi;
  for (StateId s = 0; s < 3; ++s) {
    Vec row(2);
    row[0] = 0.1 + 0.8 * uniform_unit(rng);
    row[1] = 1.0 - row[0];
    pi.probs.push_back(row);
  }

  Mat p = Mat::Zero(3, 3);
  Vec r = Vec::Zero(3);
  for (StateId s = 0; s < 3; ++s) {
    for (ActionId a : m.legal[s]) {
      r[s] += pi.row(s)[a] * m.reward(s, a);
      for (const auto& e : m.row(s, a)) p(s, e.next) += pi.row(s)[a] * e.prob;
    }
  }
  Vec direct = (Mat::Identity(3, 3) - m.discount * p).partialPivLu().solve(r);

  Vec v = policy_evaluation(m, [&](StateId s, ActionId a) { return m.reward(s, a); }, pi, 1e-12);
  CHECK((v - direct).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("improper discount-1 models are rejected") {
  MdpModel m = chain3(1.0);
  CHECK_THROWS_AS(value_iteration(m), NumericalError);
}

TEST_CASE("loss is the start-weighted optimality gap") {
  MdpModel m = chain3();
  ValueFunctions vi = value_iteration(m, 1e-11);

  CHECK(std::abs(loss(m, vi.policy)) < 1e-8);

  PolicyTable uniform = uniform_policy(m);
  Vec v_pi = policy_evaluation(m, [&](StateId s, ActionId a) { return m.reward(s, a); }, uniform,
                               1e-11);
  double expect = 0.0;
  for (StateId s = 0; s < 3; ++s) expect += m.start_dist[s] * (vi.V[s] - v_pi[s]);
  CHECK(loss(m, uniform, 1e-11) == doctest::Approx(expect).epsilon(1e-8));
  CHECK(loss(m, uniform) > -1e-8);  // optimality gap cannot be negative
}

TEST_CASE("deterministic small gridworld matches finite-horizon backward induction") {
  GridworldConfig cfg;
  cfg.side = 4;
  cfg.slip = 0.0;
  cfg.discount = 0.5;
  cfg.regions = RegionSpec::corners(4);
  MdpModel m = build_gridworld(cfg);

  Vec v = Vec::Zero(m.state_count);
  for (int k = 0; k < 80; ++k) {
    Vec next(m.state_count);
    for (StateId s = 0; s < m.state_count; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (ActionId a : m.legal[s]) {
        double q = m.reward(s, a);
        for (const auto& e : m.row(s, a)) q += m.discount * e.prob * v[e.next];
        best = std::max(best, q);
      }
      next[s] = best;
    }
    v = next;
  }

  ValueFunctions vi = value_iteration(m, 1e-12);
  CHECK((vi.V - v).cwiseAbs().maxCoeff() < 1e-9);
  // sitting in a rewarded corner forever is worth r/(1-gamma)
  CHECK(vi.V[gridworld::state_index(0, 0, 4)] == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("minimax values match an independent recursion everywhere") {
  GameModel game = build_tictactoe();
  MinimaxSolution sol = minimax_solve(game);
  REQUIRE(static_cast<int>(sol.value.size()) == game.state_count());

  std::unordered_map<std::uint64_t, int> memo;
  for (StateId s = 0; s < game.state_count(); ++s) {
    const int mover = game.player_to_move[s] == 1 ? tictactoe::kX : tictactoe::kO;
    CHECK(sol.value[s] == board_value(game.boards[s], mover, memo));
  }

  // swapping all marks and the mover negates the oracle's value
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const StateId s = static_cast<StateId>(rng() % game.state_count());
    const int mover = game.player_to_move[s] == 1 ? tictactoe::kX : tictactoe::kO;
    const int flipped = mover == tictactoe::kX ? tictactoe::kO : tictactoe::kX;
    CHECK(board_value(swap_marks(game.boards[s]), flipped, memo) ==
          -board_value(game.boards[s], mover, memo));
  }
}

TEST_CASE("minimax endgames") {
  GameModel game = build_tictactoe();
  MinimaxSolution sol = minimax_solve(game);

  CHECK(sol.value[game.root] == 0);  // perfect play draws

  // X has 0,1 and cell 2 open while O threatens elsewhere: winning now is the
  // only optimal move
  StateId win_now = walk(game, {0, 3, 1, 4});
  CHECK(sol.value[win_now] == 1);
  REQUIRE(sol.optimal_moves[win_now].size() == 1);
  CHECK(sol.optimal_moves[win_now][0] == 2);

  // O holds a triple threat; every X reply loses
  StateId lost = walk(game, {3, 0, 5, 2, 7, 4});
  CHECK(sol.value[lost] == -1);
  for (ActionId a : game.legal_moves[lost]) {
    CHECK(sol.value[game.successor(lost, a)] == -1);
    (void)a;
  }
}

TEST_CASE("match play between perfect players always draws") {
  GameModel game = build_tictactoe();
  MinimaxSolution sol = minimax_solve(game);
  PolicyTable x_pi = minimax_x_policy(game, sol);
  PolicyTable o_pi = minimax_game_opponent(game, sol);

  MatchStats stats = play_match(x_pi, o_pi, game, 500, 42);
  CHECK(stats.wins == 0);
  CHECK(stats.draws == 500);
  CHECK(stats.losses == 0);
  CHECK(stats.mean_score == 0.0);
}

TEST_CASE("match statistics are consistent and reproducible") {
  GameModel game = build_tictactoe();
  PolicyTable random_pi = uniform_game_policy(game);

  MatchStats a = play_match(random_pi, random_pi, game, 300, 7);
  CHECK(a.wins + a.draws + a.losses == 300);
  CHECK(a.mean_score ==
        doctest::Approx(static_cast<double>(a.wins - a.losses) / 300.0).epsilon(1e-12));
  CHECK(a.mean_score >= -1.0);
  CHECK(a.mean_score <= 1.0);
  CHECK(a.wins > 0);    // X wins more than half of random-vs-random games
  CHECK(a.losses > 0);  // but not all of them

  MatchStats b = play_match(random_pi, random_pi, game, 300, 7);
  CHECK(a.wins == b.wins);
  CHECK(a.draws == b.draws);
  CHECK(a.losses == b.losses);

  MatchStats zero = play_match(random_pi, random_pi, game, 0, 7);
  CHECK(zero.wins == 0);
  CHECK(zero.draws == 0);
  CHECK(zero.losses == 0);
  CHECK(zero.mean_score == 0.0);
}

TEST_CASE("deterministic players repeat one game n times") {
  GameModel game = build_tictactoe();
  MinimaxSolution sol = minimax_solve(game);
  PolicyTable x_pi = minimax_x_policy(game, sol, /*deterministic=*/true);

  PolicyTable o_pi;
  o_pi.probs.assign(game.state_count(), Vec::Zero(GameModel::kCells));
  for (StateId s = 0; s < game.state_count(); ++s) {
    if (game.is_terminal(s) || game.player_to_move[s] != -1) continue;
    o_pi.probs[s][game.legal_moves[s].front()] = 1.0;  // always the lowest cell
  }

  MatchStats stats = play_match(x_pi, o_pi, game, 64, 123);
  const bool repeated =
      stats.wins == 64 || stats.draws == 64 || stats.losses == 64;
  CHECK(repeated);
  CHECK(stats.losses == 0);  // a minimax X never loses
}

TEST_CASE("a policy with no mass at a reached state is rejected") {
  GameModel game = build_tictactoe();
  PolicyTable empty;
  empty.probs.assign(game.state_count(), Vec::Zero(GameModel::kCells));
  PolicyTable o_pi = random_game_opponent(game);
  CHECK_THROWS_AS(play_match(empty, o_pi, game, 1, 3), std::domain_error);
}

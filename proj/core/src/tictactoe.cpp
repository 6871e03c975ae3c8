#include "mapirl/tictactoe.hpp"

#include <cmath>
#include <deque>
#include <map>
#include <stdexcept>

namespace mapirl {

namespace tictactoe {

std::uint32_t with_cell(std::uint32_t board, int i, int mark) {
  std::uint32_t p = 1;
  for (int k = 0; k < i; ++k) p *= 3;
  return board + p * static_cast<std::uint32_t>(mark);
}

namespace {

// +1 if X has a completed line, -1 for O, 0 otherwise. Boards reachable by
// alternating play never contain lines for both players.
int winner(std::uint32_t board) {
  std::array<int, GameModel::kCells> c{};
  for (int i = 0; i < GameModel::kCells; ++i) {
    c[static_cast<std::size_t>(i)] = static_cast<int>(board % 3);
    board /= 3;
  }
  for (const auto& line : kLines) {
    const int a = c[static_cast<std::size_t>(line[0])];
    if (a != kEmpty && a == c[static_cast<std::size_t>(line[1])] &&
        a == c[static_cast<std::size_t>(line[2])]) {
      return a == kX ? 1 : -1;
    }
  }
  return 0;
}

}  // namespace

}  // namespace tictactoe

StateId GameModel::successor(StateId s, ActionId cell) const {
  if (cell < 0 || cell >= kCells) throw std::domain_error("cell out of range");
  const StateId next = successors[static_cast<std::size_t>(s)][static_cast<std::size_t>(cell)];
  if (next < 0) throw std::domain_error("illegal move");
  return next;
}

GameModel build_tictactoe() {
  using namespace tictactoe;
  GameModel g;

  auto intern = [&g](std::uint32_t board) -> StateId {
    auto it = g.index_of.find(board);
    if (it != g.index_of.end()) return it->second;
    const StateId id = static_cast<StateId>(g.boards.size());
    g.index_of.emplace(board, id);
    g.boards.push_back(board);

    int marks = 0;
    int x_marks = 0;
    std::uint32_t b = board;
    for (int i = 0; i < GameModel::kCells; ++i) {
      const int c = static_cast<int>(b % 3);
      b /= 3;
      if (c != kEmpty) ++marks;
      if (c == kX) ++x_marks;
    }
    const int win = winner(board);
    const bool full = marks == GameModel::kCells;
    g.terminal.push_back(win != 0 || full);
    g.outcome.push_back(static_cast<std::int8_t>(win));
    // Equal mark counts means X is to move.
    g.player_to_move.push_back(static_cast<std::int8_t>(2 * x_marks == marks ? 1 : -1));
    g.legal_moves.emplace_back();
    g.successors.push_back({{-1, -1, -1, -1, -1, -1, -1, -1, -1}});
    return id;
  };

  std::deque<StateId> frontier;
  frontier.push_back(intern(0));
  while (!frontier.empty()) {
    const StateId s = frontier.front();
    frontier.pop_front();
    if (g.terminal[static_cast<std::size_t>(s)]) continue;
    const std::uint32_t board = g.boards[static_cast<std::size_t>(s)];
    const int mark = g.player_to_move[static_cast<std::size_t>(s)] > 0 ? kX : kO;
    for (int cell = 0; cell < GameModel::kCells; ++cell) {
      if (cell_of(board, cell) != kEmpty) continue;
      g.legal_moves[static_cast<std::size_t>(s)].push_back(static_cast<ActionId>(cell));
      const std::uint32_t next_board = with_cell(board, cell, mark);
      const bool fresh = g.index_of.find(next_board) == g.index_of.end();
      const StateId next = intern(next_board);
      g.successors[static_cast<std::size_t>(s)][static_cast<std::size_t>(cell)] = next;
      if (fresh) frontier.push_back(next);
    }
  }
  return g;
}

FoldedGame fold_game_to_mdp(const GameModel& game, const PolicyTable& opponent, double gamma) {
  using tictactoe::kEmpty;
  if (opponent.state_count() != game.state_count()) {
    throw std::invalid_argument("opponent table size does not match game");
  }
  if (!(gamma > 0.0) || gamma > 1.0) throw std::invalid_argument("gamma must be in (0, 1]");

  FoldedGame f;
  f.mdp_state_of.assign(static_cast<std::size_t>(game.state_count()), -1);
  for (StateId s = 0; s < game.state_count(); ++s) {
    if (!game.is_terminal(s) && game.player_to_move[static_cast<std::size_t>(s)] > 0) {
      f.mdp_state_of[static_cast<std::size_t>(s)] = static_cast<StateId>(f.game_state_of.size());
      f.game_state_of.push_back(s);
    }
  }
  const int n_x = static_cast<int>(f.game_state_of.size());
  f.terminal_state = static_cast<StateId>(n_x);

  MdpModel& m = f.mdp;
  m.state_count = n_x + 1;
  m.action_count = GameModel::kCells;
  m.discount = gamma;
  m.legal.resize(static_cast<std::size_t>(m.state_count));
  m.rows.resize(static_cast<std::size_t>(m.state_count) * GameModel::kCells);
  m.true_reward.assign(m.rows.size(), 0.0);
  m.start_dist.assign(static_cast<std::size_t>(m.state_count), 0.0);
  m.terminal.assign(static_cast<std::size_t>(m.state_count), false);
  m.terminal[static_cast<std::size_t>(f.terminal_state)] = true;

  // Validate the opponent rows once per reachable O-to-move state.
  auto check_opponent_row = [&](StateId o_state) {
    const Vec& row = opponent.row(o_state);
    if (row.size() != GameModel::kCells) {
      throw std::invalid_argument("opponent row has wrong action count");
    }
    double total = 0.0;
    for (int cell = 0; cell < GameModel::kCells; ++cell) {
      const double p = row[cell];
      if (p < 0.0) throw std::invalid_argument("opponent row has a negative probability");
      if (p > 0.0 &&
          game.successors[static_cast<std::size_t>(o_state)][static_cast<std::size_t>(cell)] < 0) {
        throw std::invalid_argument("opponent assigns probability to an illegal move");
      }
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw std::invalid_argument("opponent row does not sum to 1");
    }
  };

  for (StateId ms = 0; ms < n_x; ++ms) {
    const StateId gs = f.game_state_of[static_cast<std::size_t>(ms)];
    auto& legal = m.legal[static_cast<std::size_t>(ms)];
    legal = game.legal_moves[static_cast<std::size_t>(gs)];
    for (const ActionId a : legal) {
      // Mass over successor MDP states; the terminal state aggregates every
      // game-terminal continuation, with the expected outcome as reward.
      std::map<StateId, double> mass;
      double reward = 0.0;
      const StateId after_x = game.successor(gs, a);
      if (game.is_terminal(after_x)) {
        mass[f.terminal_state] += 1.0;
        reward += static_cast<double>(game.outcome[static_cast<std::size_t>(after_x)]);
      } else {
        check_opponent_row(after_x);
        const Vec& row = opponent.row(after_x);
        for (int cell = 0; cell < GameModel::kCells; ++cell) {
          const double p = row[cell];
          if (p <= 0.0) continue;
          const StateId after_o = game.successor(after_x, static_cast<ActionId>(cell));
          if (game.is_terminal(after_o)) {
            mass[f.terminal_state] += p;
            reward += p * static_cast<double>(game.outcome[static_cast<std::size_t>(after_o)]);
          } else {
            mass[f.mdp_state_of[static_cast<std::size_t>(after_o)]] += p;
          }
        }
      }
      auto& row_out = m.rows[static_cast<std::size_t>(m.sa_index(ms, a))];
      row_out.reserve(mass.size());
      for (const auto& [next, p] : mass) row_out.push_back({next, p});
      m.true_reward[static_cast<std::size_t>(m.sa_index(ms, a))] = reward;
    }
  }

  // Terminal state: every action self-loops with zero reward.
  auto& tlegal = m.legal[static_cast<std::size_t>(f.terminal_state)];
  for (int a = 0; a < GameModel::kCells; ++a) {
    tlegal.push_back(static_cast<ActionId>(a));
    m.rows[static_cast<std::size_t>(m.sa_index(f.terminal_state, a))].push_back(
        {f.terminal_state, 1.0});
  }

  m.start_dist[static_cast<std::size_t>(f.mdp_state_of[static_cast<std::size_t>(game.root)])] = 1.0;
  m.validate();
  return f;
}

}  // namespace mapirl

#pragma once

#include "mapirl/mdp.hpp"

#include <array>
#include <cstdint>
#include <unordered_map>

namespace mapirl {

/// Alternating two-player game over the reachable tic-tac-toe positions.
/// States are indexed in breadth-first order from the empty board; X moves
/// first; actions are board cells 0..8. Outcomes are from X's perspective.
struct GameModel {
  static constexpr int kCells = 9;

  std::vector<std::uint32_t> boards;  // base-3 board codes, cell i at digit i
  std::unordered_map<std::uint32_t, StateId> index_of;
  std::vector<std::int8_t> player_to_move;  // +1 X, -1 O
  std::vector<std::int8_t> outcome;         // +1/0/-1 for X at terminals, else 0
  std::vector<bool> terminal;
  std::vector<std::vector<ActionId>> legal_moves;       // empty cells, ascending
  std::vector<std::array<StateId, kCells>> successors;  // -1 where illegal
  StateId root = 0;

  int state_count() const { return static_cast<int>(boards.size()); }
  bool is_terminal(StateId s) const { return terminal[static_cast<std::size_t>(s)]; }

  /// Deterministic successor; throws std::domain_error on an illegal move.
  StateId successor(StateId s, ActionId cell) const;
};

namespace tictactoe {

inline constexpr int kEmpty = 0;
inline constexpr int kX = 1;
inline constexpr int kO = 2;

/// The 8 winning lines: rows, columns, then the two diagonals.
inline constexpr std::array<std::array<int, 3>, 8> kLines = {{{0, 1, 2},
                                                             {3, 4, 5},
                                                             {6, 7, 8},
                                                             {0, 3, 6},
                                                             {1, 4, 7},
                                                             {2, 5, 8},
                                                             {0, 4, 8},
                                                             {2, 4, 6}}};

inline int cell_of(std::uint32_t board, int i) {
  for (int k = 0; k < i; ++k) board /= 3;
  return static_cast<int>(board % 3);
}

std::uint32_t with_cell(std::uint32_t board, int i, int mark);

}  // namespace tictactoe

/// Enumerates the full game graph from the empty board.
GameModel build_tictactoe();

/// An alternating game folded into a single-agent MDP for player X by fixing
/// the opponent. MDP states are the X-to-move positions (in game-state order,
/// so folds of the same game against different opponents share indexing)
/// plus one trailing terminal state.
struct FoldedGame {
  MdpModel mdp;
  std::vector<StateId> game_state_of;  // mdp state -> game state, -1 for terminal
  std::vector<StateId> mdp_state_of;   // game state -> mdp state, -1 elsewhere
  StateId terminal_state = 0;
};

/// Folds `game` for player X. `opponent` is indexed by game states and must
/// be a valid distribution over legal moves at every reachable O-to-move
/// state. The reward of an action is the expected terminal outcome collected
/// on entering a terminal position (through X's move or the opponent's
/// reply); all other rewards are 0.
FoldedGame fold_game_to_mdp(const GameModel& game, const PolicyTable& opponent, double gamma);

}  // namespace mapirl

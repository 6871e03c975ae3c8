#pragma once

#include "mapirl/tictactoe.hpp"
#include "mapirl/types.hpp"

#include <cstdint>
#include <optional>

namespace mapirl {

/// State-only feature map; the (state, action) maps in FeatureMaps are built
/// from these by replication or action lifting.
using StateFeatureFn = std::function<Vec(StateId)>;

/// Target interval for affine feature rescaling.
struct ScaleRange {
  double lo = -1.0;
  double hi = 1.0;
};

/// Number of monomials of total degree <= degree in `dims` variables,
/// including the constant term: C(dims + degree, degree).
int polynomial_feature_count(int dims, int degree);

/// All monomials of `base` with total degree <= degree, in graded
/// lexicographic order: [1, v0, v1, ..., v0^2, v0*v1, ..., v1^2, ...].
Vec polynomial_features(const Vec& base, int degree);

/// Frozen per-dimension affine map fitted so sample values land in a target
/// interval. Constant dimensions map to the interval midpoint.
struct AffineScaler {
  Vec scale;
  Vec offset;

  Vec apply(const Vec& v) const;
  static AffineScaler fit(const std::vector<Vec>& samples, ScaleRange range);
};

inline constexpr int kBlackjackFeatureCount = 14;

/// 14-dim blackjack state features over (player_sum, dealer_card, usable):
/// the degree-2 monomials [1, p, d, u, p^2, pd, pu, d^2, du, u^2] followed by
/// the indicators [p>=17, p==21, d==1 (ace up), d>=7]. Terminal state maps to
/// the zero vector.
Vec blackjack_reward_features(StateId s);

inline int gridworld_feature_count(int side) { return 2 * side; }

/// [x, y, 1(x<1), ..., 1(x<side-1), 1(y<1), ..., 1(y<side-1)]; 64 components
/// for side 32.
Vec gridworld_reward_features(StateId s, int side);

inline constexpr int kTicTacToeBaseCounts = 10;
inline constexpr int kTicTacToeFeatureCount = 75;  // C(12,2) monomials + 9 cells

/// Pattern counts over the 8 board lines, X block then O block:
/// [singlets, doublets, triplets, diversity, crosspoints] per player.
/// A singlet line holds exactly one of the player's marks and two empties, a
/// doublet two marks and one empty, a triplet three marks. Diversity counts
/// the distinct directions (horizontal/vertical/diagonal) among the player's
/// singlet lines; a crosspoint is an empty cell on >= 2 of them.
Vec tictactoe_base_counts(std::uint32_t board);

/// Degree-2 monomials of the 10 pattern counts followed by the 9 raw cells
/// encoded {X:+1, O:-1, empty:0}.
Vec tictactoe_board_features(std::uint32_t board);

Vec tictactoe_reward_features(const GameModel& game, StateId s);

/// Features of the position after X plays `a` from `s`, before the opponent
/// replies. Throws std::domain_error on an illegal move.
Vec tictactoe_q_features(const GameModel& game, StateId s, ActionId a);

/// Block one-hot action lift: g_Q(s,a) places g_R(s) in block a of an
/// m_R * action_count vector, zeros elsewhere.
std::function<Vec(StateId, ActionId)> lift_q_features(StateFeatureFn g_R, int m_R,
                                                      int action_count);

/// Rescales `map` with an affine transform fitted once over `samples`.
StateFeatureFn scale_features(StateFeatureFn map, const std::vector<StateId>& samples,
                              ScaleRange range);

/// Bundled maps for each domain. When a range is given, scaling is fitted
/// over the full non-terminal state space (terminal states keep the all-zero
/// convention).
FeatureMaps blackjack_feature_maps(std::optional<ScaleRange> range = std::nullopt);
FeatureMaps gridworld_feature_maps(int side, std::optional<ScaleRange> range = std::nullopt);

/// Maps over the folded MDP's states. g_R gives board features of the
/// position, g_Q afterstate features of the move; the folded terminal state
/// maps to zero under both. One scaler, fitted over every board, serves both
/// so g_Q stays the composition of g_R's transform with the game successor.
/// The returned maps reference `game`, which must outlive them.
FeatureMaps tictactoe_feature_maps(const GameModel& game, const FoldedGame& fold,
                                   std::optional<ScaleRange> range = std::nullopt);

/// One-hot state features with the action lift; for tabular experiments and
/// tests. States flagged in `terminal` map to zero.
FeatureMaps tabular_feature_maps(int state_count, int action_count,
                                 const std::vector<bool>& terminal = {});

}  // namespace mapirl

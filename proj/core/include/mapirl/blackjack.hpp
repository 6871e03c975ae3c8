#pragma once

#include "mapirl/mdp.hpp"

namespace mapirl {
namespace blackjack {

inline constexpr int kHit = 0;
inline constexpr int kStick = 1;
inline constexpr int kActionCount = 2;

/// Player sums 12..21 x dealer card 1..10 x usable ace, plus one terminal.
inline constexpr int kStateCount = 201;
inline constexpr StateId kTerminal = 200;

/// Score for a dealt natural (ace plus ten-card). Naturals are resolved
/// before the first decision, so this never appears in the per-(s,a) reward
/// table; the start distribution conditions on the hand reaching a decision.
inline constexpr double kNaturalScore = 1.5;

StateId state_index(int player_sum, int dealer_card, bool usable_ace);
void decode_state(StateId s, int& player_sum, int& dealer_card, bool& usable_ace);

/// Probability that the initial two player cards form a natural (8/169 with
/// infinite-deck draws).
double natural_probability();

}  // namespace blackjack

/// Infinite-deck blackjack as a 201-state MDP. Cards are drawn with
/// replacement (rank probability 1/13, ten-cards pooled). Sub-12 hands are
/// hit automatically inside the start distribution, and the dealer hits below
/// 17 and stands at 17 or more, soft totals included. Stick rewards are the
/// expected score of the dealer playout.
MdpModel build_blackjack();

}  // namespace mapirl

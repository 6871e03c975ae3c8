#include "mapirl/blackjack.hpp"

#include <array>
#include <map>
#include <stdexcept>

namespace mapirl {
namespace blackjack {

StateId state_index(int player_sum, int dealer_card, bool usable_ace) {
  if (player_sum < 12 || player_sum > 21 || dealer_card < 1 || dealer_card > 10)
    throw std::domain_error("blackjack: state out of range");
  return static_cast<StateId>(((player_sum - 12) * 10 + (dealer_card - 1)) * 2 +
                              (usable_ace ? 1 : 0));
}

void decode_state(StateId s, int& player_sum, int& dealer_card, bool& usable_ace) {
  if (s < 0 || s >= kTerminal) throw std::domain_error("blackjack: not a player state");
  usable_ace = (s % 2) != 0;
  const int rest = s / 2;
  dealer_card = rest % 10 + 1;
  player_sum = rest / 10 + 12;
}

double natural_probability() { return 2.0 * (1.0 / 13.0) * (4.0 / 13.0); }

}  // namespace blackjack

namespace {

using blackjack::kHit;
using blackjack::kStick;
using blackjack::kTerminal;

// Card values 1..10; ten-cards (10,J,Q,K) are pooled.
double card_prob(int c) { return c == 10 ? 4.0 / 13.0 : 1.0 / 13.0; }

struct Hand {
  int total = 0;
  bool usable = false;

  bool operator<(const Hand& o) const {
    return total != o.total ? total < o.total : usable < o.usable;
  }
};

Hand add_card(Hand h, int card) {
  if (card == 1 && h.total + 11 <= 21) return {h.total + 11, true};
  Hand n{h.total + card, h.usable};
  if (n.total > 21 && n.usable) return {n.total - 10, false};
  return n;
}

// Outcome distribution of the dealer playout from a partial hand:
// index 0..4 = final total 17..21, index 5 = bust.
using DealerDist = std::array<double, 6>;

DealerDist dealer_playout(Hand h, std::map<Hand, DealerDist>& memo) {
  DealerDist out{};
  if (h.total > 21) {
    out[5] = 1.0;
    return out;
  }
  if (h.total >= 17) {
    out[static_cast<std::size_t>(h.total - 17)] = 1.0;
    return out;
  }
  auto it = memo.find(h);
  if (it != memo.end()) return it->second;
  for (int c = 1; c <= 10; ++c) {
    const DealerDist sub = dealer_playout(add_card(h, c), memo);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += card_prob(c) * sub[i];
  }
  memo.emplace(h, out);
  return out;
}

DealerDist dealer_from_upcard(int upcard, std::map<Hand, DealerDist>& memo) {
  DealerDist out{};
  const Hand shown = add_card(Hand{}, upcard);
  for (int hole = 1; hole <= 10; ++hole) {
    const DealerDist sub = dealer_playout(add_card(shown, hole), memo);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += card_prob(hole) * sub[i];
  }
  return out;
}

// Probability mass over decision hands (total >= 12) after auto-hitting a
// sub-12 hand. Sub-12 hands are always hard, and a hit below 12 cannot bust.
void auto_hit(Hand h, double mass, std::map<Hand, double>& out) {
  if (h.total >= 12) {
    out[h] += mass;
    return;
  }
  for (int c = 1; c <= 10; ++c) auto_hit(add_card(h, c), mass * card_prob(c), out);
}

}  // namespace

MdpModel build_blackjack() {
  MdpModel m;
  m.state_count = blackjack::kStateCount;
  m.action_count = blackjack::kActionCount;
  m.discount = 1.0;
  m.legal.assign(static_cast<std::size_t>(m.state_count), {kHit, kStick});
  m.rows.assign(static_cast<std::size_t>(m.state_count) * 2, {});
  m.true_reward.assign(static_cast<std::size_t>(m.state_count) * 2, 0.0);
  m.start_dist.assign(static_cast<std::size_t>(m.state_count), 0.0);
  m.terminal.assign(static_cast<std::size_t>(m.state_count), false);

  m.terminal[kTerminal] = true;
  m.rows[m.sa_index(kTerminal, kHit)] = {{kTerminal, 1.0}};
  m.rows[m.sa_index(kTerminal, kStick)] = {{kTerminal, 1.0}};

  std::map<Hand, DealerDist> dealer_memo;
  std::array<DealerDist, 11> dealer_dist{};
  for (int d = 1; d <= 10; ++d)
    dealer_dist[static_cast<std::size_t>(d)] = dealer_from_upcard(d, dealer_memo);

  for (int p = 12; p <= 21; ++p) {
    for (int d = 1; d <= 10; ++d) {
      for (int u = 0; u <= 1; ++u) {
        const StateId s = blackjack::state_index(p, d, u != 0);

        // hit: successor distribution over raised hands, bust mass to terminal
        std::map<StateId, double> next_mass;
        double bust = 0.0;
        for (int c = 1; c <= 10; ++c) {
          const Hand n = add_card(Hand{p, u != 0}, c);
          if (n.total > 21)
            bust += card_prob(c);
          else
            next_mass[blackjack::state_index(n.total, d, n.usable)] += card_prob(c);
        }
        auto& hit_row = m.rows[m.sa_index(s, kHit)];
        for (const auto& [ns, pr] : next_mass) hit_row.push_back({ns, pr});
        if (bust > 0.0) hit_row.push_back({kTerminal, bust});
        m.true_reward[m.sa_index(s, kHit)] = -bust;

        // stick: dealer plays out; reward is the expected score
        const DealerDist& dd = dealer_dist[static_cast<std::size_t>(d)];
        double score = dd[5];  // dealer bust
        for (int t = 17; t <= 21; ++t) {
          const double pr = dd[static_cast<std::size_t>(t - 17)];
          score += pr * (p > t ? 1.0 : (p < t ? -1.0 : 0.0));
        }
        m.rows[m.sa_index(s, kStick)] = {{kTerminal, 1.0}};
        m.true_reward[m.sa_index(s, kStick)] = score;
      }
    }
  }

  // Start distribution: deal two cards, auto-hit to 12+, condition on the
  // hand not being a natural (a natural ends before any decision).
  std::map<Hand, double> player_mass;
  double natural = 0.0;
  for (int c1 = 1; c1 <= 10; ++c1) {
    for (int c2 = 1; c2 <= 10; ++c2) {
      const double pr = card_prob(c1) * card_prob(c2);
      const Hand h = add_card(add_card(Hand{}, c1), c2);
      if (h.total == 21)
        natural += pr;
      else
        auto_hit(h, pr, player_mass);
    }
  }
  for (const auto& [hand, mass] : player_mass) {
    for (int d = 1; d <= 10; ++d) {
      const StateId s = blackjack::state_index(hand.total, d, hand.usable);
      m.start_dist[static_cast<std::size_t>(s)] = mass / (1.0 - natural) * card_prob(d);
    }
  }

  m.validate();
  return m;
}

}  // namespace mapirl

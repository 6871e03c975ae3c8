#pragma once

#include "mapirl/types.hpp"

#include <cstdint>
#include <random>

namespace mapirl {

struct TransitionEntry {
  StateId next;
  double prob;
};

/// Exact tabular MDP. Transition rows and rewards are indexed by
/// s * action_count + a. Terminal states self-loop with reward 0 so dynamic
/// programming and TD accumulation need no special casing.
struct MdpModel {
  int state_count = 0;
  int action_count = 0;
  double discount = 1.0;
  std::vector<std::vector<ActionId>> legal;        // per state, ascending
  std::vector<std::vector<TransitionEntry>> rows;  // per (s,a)
  std::vector<double> true_reward;                 // per (s,a)
  std::vector<double> start_dist;                  // mu over states
  std::vector<bool> terminal;                      // per state

  std::size_t sa_index(StateId s, ActionId a) const {
    return static_cast<std::size_t>(s) * static_cast<std::size_t>(action_count) +
           static_cast<std::size_t>(a);
  }
  const std::vector<TransitionEntry>& row(StateId s, ActionId a) const {
    return rows[sa_index(s, a)];
  }
  double reward(StateId s, ActionId a) const { return true_reward[sa_index(s, a)]; }
  bool is_terminal(StateId s) const { return terminal[static_cast<std::size_t>(s)]; }
  bool is_legal(StateId s, ActionId a) const;

  /// Legal-action closure over a copy of the per-state sets; safe to outlive
  /// the model.
  LegalFn legal_fn() const;

  /// Checks row sums, start distribution, and the terminal self-loop
  /// convention; throws std::logic_error on violation.
  void validate(double tol = 1e-9) const;
};

struct StepResult {
  StateId next;
  double reward;
  bool terminal;
};

/// Draws a uniform double in [0,1) from the top 53 bits of the generator, so
/// sampling is identical across standard library implementations.
double uniform_unit(std::mt19937_64& rng);

/// Counter scheme for independent sub-streams: the k-th child seed of `base`
/// is the splitmix64 output of base + (k+1)*golden. Used for per-game and
/// per-episode generators so work units are order-independent.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t k) {
  std::uint64_t z = base + (k + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Samples one transition. Deterministic given the rng state. The reward is
/// the model's expected reward for (s,a).
StepResult step(const MdpModel& model, StateId s, ActionId a, std::mt19937_64& rng);

/// Samples a state from a probability vector by CDF inversion.
StateId sample_from(const std::vector<double>& dist, std::mt19937_64& rng);

}  // namespace mapirl

#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mapirl {

using StateId = std::int32_t;
using ActionId = std::int32_t;

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// One expert trajectory as parallel state/action sequences.
///
/// When `terminal_included` is set, the final pair marks the absorbing state
/// the episode ended in; its action is a placeholder. The marker contributes
/// to neither the likelihood nor the temporal-difference sums: TD pairs are
/// formed between consecutive decisions only, so the last decision appears
/// only as a successor.
struct Trajectory {
  std::vector<StateId> states;
  std::vector<ActionId> actions;
  bool terminal_included = false;

  std::size_t length() const { return states.size(); }

  /// Number of steps that are actual expert decisions.
  std::size_t decision_count() const {
    return states.size() - (terminal_included ? std::size_t{1} : std::size_t{0});
  }

  /// Number of (s_t,a_t) -> (s_{t+1},a_{t+1}) decision pairs available for
  /// TD sums; one less than decision_count.
  std::size_t transition_count() const {
    const std::size_t n = decision_count();
    return n < 2 ? 0 : n - 1;
  }

  bool operator==(const Trajectory&) const = default;
};

struct DemonstrationSet {
  std::vector<Trajectory> trajectories;
  std::string env_tag;

  std::size_t total_decisions() const {
    std::size_t n = 0;
    for (const auto& t : trajectories) n += t.decision_count();
    return n;
  }

  bool operator==(const DemonstrationSet&) const = default;
};

/// Reward features g_R and value features g_Q over state-action pairs.
/// Both maps must be deterministic and return vectors of the declared length.
struct FeatureMaps {
  int m_R = 0;
  int m_Q = 0;
  int action_count = 0;
  std::function<Vec(StateId, ActionId)> g_R;
  std::function<Vec(StateId, ActionId)> g_Q;
};

struct RewardParams {
  Vec w_R;
};

struct QParams {
  Vec w_Q;
  double beta = 1.0;
};

/// Per-state legal action set. MDP domains return the full action set; games
/// restrict it. Returned indices are strictly increasing.
using LegalFn = std::function<std::vector<ActionId>(StateId)>;

/// A legal-action function that allows every action in every state.
LegalFn all_actions_legal(int action_count);

/// Stochastic policy as one probability row per state. Deterministic policies
/// are stored as one-hot rows so evaluation code needs no separate path.
struct PolicyTable {
  std::vector<Vec> probs;

  int state_count() const { return static_cast<int>(probs.size()); }
  const Vec& row(StateId s) const { return probs[static_cast<std::size_t>(s)]; }

  /// Argmax action of a row; for one-hot rows this is the stored action.
  ActionId action_at(StateId s) const {
    ActionId best = 0;
    const Vec& p = row(s);
    for (int a = 1; a < p.size(); ++a)
      if (p[a] > p[best]) best = a;
    return best;
  }

  static PolicyTable from_actions(const std::vector<ActionId>& actions, int action_count) {
    PolicyTable pt;
    pt.probs.reserve(actions.size());
    for (ActionId a : actions) {
      Vec row = Vec::Zero(action_count);
      row[a] = 1.0;
      pt.probs.push_back(std::move(row));
    }
    return pt;
  }
};

/// Thrown when a linear system is numerically singular (more data or a larger
/// ridge is needed).
struct SingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when an optimization step encounters a non-finite value.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown on malformed input files; carries the 1-based line number.
struct ParseError : std::runtime_error {
  int line;
  ParseError(const std::string& what, int line_number)
      : std::runtime_error(what + " (line " + std::to_string(line_number) + ")"),
        line(line_number) {}
};

}  // namespace mapirl

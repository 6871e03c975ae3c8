#include "mapirl/features.hpp"

#include "mapirl/blackjack.hpp"
#include "mapirl/gridworld.hpp"

#include <array>
#include <functional>
#include <limits>
#include <set>
#include <stdexcept>

namespace mapirl {

int polynomial_feature_count(int dims, int degree) {
  if (dims < 0 || degree < 0) throw std::invalid_argument("dims and degree must be >= 0");
  // C(dims + degree, degree) computed incrementally to stay exact.
  long long n = 1;
  for (int k = 1; k <= degree; ++k) n = n * (dims + k) / k;
  return static_cast<int>(n);
}

Vec polynomial_features(const Vec& base, int degree) {
  if (degree < 0) throw std::invalid_argument("degree must be >= 0");
  const int d = static_cast<int>(base.size());
  Vec out(polynomial_feature_count(d, degree));
  int pos = 0;
  out[pos++] = 1.0;
  // Multi-indices i1 <= i2 <= ... of each exact degree, in lex order.
  std::function<void(int, int, double)> emit = [&](int start, int remaining, double prod) {
    if (remaining == 0) {
      out[pos++] = prod;
      return;
    }
    for (int i = start; i < d; ++i) emit(i, remaining - 1, prod * base[i]);
  };
  for (int g = 1; g <= degree; ++g) emit(0, g, 1.0);
  return out;
}

Vec AffineScaler::apply(const Vec& v) const {
  if (v.size() != scale.size()) throw std::invalid_argument("scaler dimension mismatch");
  return scale.cwiseProduct(v) + offset;
}

AffineScaler AffineScaler::fit(const std::vector<Vec>& samples, ScaleRange range) {
  if (!(range.lo < range.hi)) throw std::invalid_argument("scale range requires lo < hi");
  if (samples.empty()) throw std::invalid_argument("cannot fit a scaler on an empty sample set");
  const Eigen::Index dim = samples.front().size();
  Vec lo = Vec::Constant(dim, std::numeric_limits<double>::infinity());
  Vec hi = Vec::Constant(dim, -std::numeric_limits<double>::infinity());
  for (const Vec& v : samples) {
    if (v.size() != dim) throw std::invalid_argument("inconsistent sample dimensions");
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  AffineScaler s;
  s.scale = Vec::Zero(dim);
  s.offset = Vec::Zero(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (hi[i] > lo[i]) {
      s.scale[i] = (range.hi - range.lo) / (hi[i] - lo[i]);
      s.offset[i] = range.lo - lo[i] * s.scale[i];
    } else {
      s.offset[i] = 0.5 * (range.lo + range.hi);
    }
  }
  return s;
}

Vec blackjack_reward_features(StateId s) {
  if (s < 0 || s >= blackjack::kStateCount) throw std::invalid_argument("invalid blackjack state");
  if (s == blackjack::kTerminal) return Vec::Zero(kBlackjackFeatureCount);
  int p = 0;
  int d = 0;
  bool u = false;
  blackjack::decode_state(s, p, d, u);
  Vec base(3);
  base << static_cast<double>(p), static_cast<double>(d), u ? 1.0 : 0.0;
  Vec out(kBlackjackFeatureCount);
  out.head(10) = polynomial_features(base, 2);
  out[10] = p >= 17 ? 1.0 : 0.0;
  out[11] = p == 21 ? 1.0 : 0.0;
  out[12] = d == 1 ? 1.0 : 0.0;
  out[13] = d >= 7 ? 1.0 : 0.0;
  return out;
}

Vec gridworld_reward_features(StateId s, int side) {
  if (side < 2) throw std::invalid_argument("side must be >= 2");
  if (s < 0 || s >= side * side) throw std::invalid_argument("invalid grid state");
  const int x = gridworld::x_of(s, side);
  const int y = gridworld::y_of(s, side);
  Vec out(gridworld_feature_count(side));
  out[0] = static_cast<double>(x);
  out[1] = static_cast<double>(y);
  for (int k = 1; k < side; ++k) {
    out[1 + k] = x < k ? 1.0 : 0.0;
    out[side + k] = y < k ? 1.0 : 0.0;
  }
  return out;
}

Vec tictactoe_base_counts(std::uint32_t board) {
  using namespace tictactoe;
  std::array<int, GameModel::kCells> cells{};
  for (int i = 0; i < GameModel::kCells; ++i) {
    cells[static_cast<std::size_t>(i)] = static_cast<int>(board % 3);
    board /= 3;
  }
  Vec out = Vec::Zero(kTicTacToeBaseCounts);
  for (int player = 0; player < 2; ++player) {
    const int mark = player == 0 ? kX : kO;
    const int off = 5 * player;
    std::set<int> directions;
    std::array<bool, 8> singlet_line{};
    for (std::size_t li = 0; li < kLines.size(); ++li) {
      int mine = 0;
      int empty = 0;
      for (const int c : kLines[li]) {
        if (cells[static_cast<std::size_t>(c)] == mark) ++mine;
        if (cells[static_cast<std::size_t>(c)] == kEmpty) ++empty;
      }
      if (mine == 1 && empty == 2) {
        singlet_line[li] = true;
        out[off + 0] += 1.0;                         // singlets
        directions.insert(li < 3 ? 0 : li < 6 ? 1 : 2);
      } else if (mine == 2 && empty == 1) {
        out[off + 1] += 1.0;  // doublets
      } else if (mine == 3) {
        out[off + 2] += 1.0;  // triplets
      }
    }
    out[off + 3] = static_cast<double>(directions.size());  // diversity
    for (int c = 0; c < GameModel::kCells; ++c) {
      if (cells[static_cast<std::size_t>(c)] != kEmpty) continue;
      int on_singlets = 0;
      for (std::size_t li = 0; li < kLines.size(); ++li) {
        if (!singlet_line[li]) continue;
        if (kLines[li][0] == c || kLines[li][1] == c || kLines[li][2] == c) ++on_singlets;
      }
      if (on_singlets >= 2) out[off + 4] += 1.0;  // crosspoints
    }
  }
  return out;
}

Vec tictactoe_board_features(std::uint32_t board) {
  using namespace tictactoe;
  const Vec poly = polynomial_features(tictactoe_base_counts(board), 2);
  Vec out(kTicTacToeFeatureCount);
  out.head(poly.size()) = poly;
  std::uint32_t b = board;
  for (int i = 0; i < GameModel::kCells; ++i) {
    const int c = static_cast<int>(b % 3);
    b /= 3;
    out[poly.size() + i] = c == kX ? 1.0 : c == kO ? -1.0 : 0.0;
  }
  return out;
}

Vec tictactoe_reward_features(const GameModel& game, StateId s) {
  if (s < 0 || s >= game.state_count()) throw std::invalid_argument("invalid game state");
  return tictactoe_board_features(game.boards[static_cast<std::size_t>(s)]);
}

Vec tictactoe_q_features(const GameModel& game, StateId s, ActionId a) {
  return tictactoe_board_features(
      game.boards[static_cast<std::size_t>(game.successor(s, a))]);
}

std::function<Vec(StateId, ActionId)> lift_q_features(StateFeatureFn g_R, int m_R,
                                                      int action_count) {
  if (action_count < 1) throw std::invalid_argument("action_count must be >= 1");
  return [g_R = std::move(g_R), m_R, action_count](StateId s, ActionId a) {
    if (a < 0 || a >= action_count) throw std::domain_error("action out of range");
    Vec out = Vec::Zero(static_cast<Eigen::Index>(m_R) * action_count);
    out.segment(static_cast<Eigen::Index>(a) * m_R, m_R) = g_R(s);
    return out;
  };
}

StateFeatureFn scale_features(StateFeatureFn map, const std::vector<StateId>& samples,
                              ScaleRange range) {
  std::vector<Vec> values;
  values.reserve(samples.size());
  for (const StateId s : samples) values.push_back(map(s));
  AffineScaler scaler = AffineScaler::fit(values, range);
  return [map = std::move(map), scaler = std::move(scaler)](StateId s) {
    return scaler.apply(map(s));
  };
}

namespace {

FeatureMaps replicated_maps(StateFeatureFn state_fn, int m_R, int action_count) {
  FeatureMaps maps;
  maps.m_R = m_R;
  maps.m_Q = m_R * action_count;
  maps.action_count = action_count;
  maps.g_R = [state_fn](StateId s, ActionId) { return state_fn(s); };
  maps.g_Q = lift_q_features(state_fn, m_R, action_count);
  return maps;
}

}  // namespace

FeatureMaps blackjack_feature_maps(std::optional<ScaleRange> range) {
  StateFeatureFn fn = [](StateId s) { return blackjack_reward_features(s); };
  if (range) {
    std::vector<StateId> live;
    for (StateId s = 0; s < blackjack::kStateCount; ++s) {
      if (s != blackjack::kTerminal) live.push_back(s);
    }
    StateFeatureFn scaled = scale_features(fn, live, *range);
    fn = [scaled = std::move(scaled)](StateId s) {
      if (s == blackjack::kTerminal) return Vec::Zero(kBlackjackFeatureCount).eval();
      return scaled(s);
    };
  }
  return replicated_maps(std::move(fn), kBlackjackFeatureCount, blackjack::kActionCount);
}

FeatureMaps gridworld_feature_maps(int side, std::optional<ScaleRange> range) {
  StateFeatureFn fn = [side](StateId s) { return gridworld_reward_features(s, side); };
  if (range) {
    std::vector<StateId> all(static_cast<std::size_t>(side) * side);
    for (StateId s = 0; s < side * side; ++s) all[static_cast<std::size_t>(s)] = s;
    fn = scale_features(std::move(fn), all, *range);
  }
  return replicated_maps(std::move(fn), gridworld_feature_count(side), gridworld::kActionCount);
}

FeatureMaps tictactoe_feature_maps(const GameModel& game, const FoldedGame& fold,
                                   std::optional<ScaleRange> range) {
  AffineScaler scaler;
  scaler.scale = Vec::Ones(kTicTacToeFeatureCount);
  scaler.offset = Vec::Zero(kTicTacToeFeatureCount);
  if (range) {
    std::vector<Vec> samples;
    samples.reserve(static_cast<std::size_t>(game.state_count()));
    for (StateId s = 0; s < game.state_count(); ++s) {
      samples.push_back(tictactoe_board_features(game.boards[static_cast<std::size_t>(s)]));
    }
    scaler = AffineScaler::fit(samples, *range);
  }
  const StateId terminal = fold.terminal_state;
  // Copy the id tables; the maps must outlive the fold they were built from.
  auto game_state_of = fold.game_state_of;

  FeatureMaps maps;
  maps.m_R = kTicTacToeFeatureCount;
  maps.m_Q = kTicTacToeFeatureCount;
  maps.action_count = GameModel::kCells;
  maps.g_R = [&game, game_state_of, scaler, terminal](StateId ms, ActionId) {
    if (ms == terminal) return Vec::Zero(kTicTacToeFeatureCount).eval();
    return scaler.apply(tictactoe_reward_features(game, game_state_of[static_cast<std::size_t>(ms)]));
  };
  maps.g_Q = [&game, game_state_of, scaler, terminal](StateId ms, ActionId a) {
    if (ms == terminal) return Vec::Zero(kTicTacToeFeatureCount).eval();
    return scaler.apply(
        tictactoe_q_features(game, game_state_of[static_cast<std::size_t>(ms)], a));
  };
  return maps;
}

FeatureMaps tabular_feature_maps(int state_count, int action_count,
                                 const std::vector<bool>& terminal) {
  if (state_count < 1 || action_count < 1) {
    throw std::invalid_argument("state_count and action_count must be >= 1");
  }
  StateFeatureFn fn = [state_count, terminal](StateId s) {
    if (s < 0 || s >= state_count) throw std::invalid_argument("state out of range");
    Vec out = Vec::Zero(state_count);
    if (terminal.empty() || !terminal[static_cast<std::size_t>(s)]) out[s] = 1.0;
    return out;
  };
  return replicated_maps(std::move(fn), state_count, action_count);
}

}  // namespace mapirl

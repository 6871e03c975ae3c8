#include "mapirl/harness.hpp"

#include "mapirl/blackjack.hpp"
#include "mapirl/gridworld.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace mapirl {

PolicyTable random_game_opponent(const GameModel& game) {
  PolicyTable table;
  table.probs.assign(static_cast<std::size_t>(game.state_count()),
                     Vec::Zero(GameModel::kCells));
  for (StateId s = 0; s < game.state_count(); ++s) {
    if (game.is_terminal(s) || game.player_to_move[static_cast<std::size_t>(s)] > 0) continue;
    const auto& moves = game.legal_moves[static_cast<std::size_t>(s)];
    for (const ActionId a : moves) {
      table.probs[static_cast<std::size_t>(s)][a] = 1.0 / static_cast<double>(moves.size());
    }
  }
  return table;
}

PolicyTable minimax_game_opponent(const GameModel& game, const MinimaxSolution& solution) {
  PolicyTable table;
  table.probs.assign(static_cast<std::size_t>(game.state_count()),
                     Vec::Zero(GameModel::kCells));
  for (StateId s = 0; s < game.state_count(); ++s) {
    if (game.is_terminal(s) || game.player_to_move[static_cast<std::size_t>(s)] > 0) continue;
    const auto& moves = solution.optimal_moves[static_cast<std::size_t>(s)];
    for (const ActionId a : moves) {
      table.probs[static_cast<std::size_t>(s)][a] = 1.0 / static_cast<double>(moves.size());
    }
  }
  return table;
}

PolicyTable game_policy_from_folded(const FoldedGame& fold, const PolicyTable& folded_pi) {
  PolicyTable table;
  const StateId n = static_cast<StateId>(fold.mdp_state_of.size());
  table.probs.assign(static_cast<std::size_t>(n), Vec());
  for (StateId gs = 0; gs < n; ++gs) {
    const StateId ms = fold.mdp_state_of[static_cast<std::size_t>(gs)];
    if (ms < 0 || ms == fold.terminal_state) continue;
    table.probs[static_cast<std::size_t>(gs)] = folded_pi.row(ms);
  }
  return table;
}

namespace {

// Minimax expert on folded states: uniform over X's optimal moves.
PolicyTable folded_minimax_expert(const GameModel& game, const FoldedGame& fold,
                                  const MinimaxSolution& solution) {
  PolicyTable table;
  table.probs.assign(static_cast<std::size_t>(fold.mdp.state_count),
                     Vec::Zero(GameModel::kCells));
  for (StateId ms = 0; ms < static_cast<StateId>(fold.game_state_of.size()); ++ms) {
    const StateId gs = fold.game_state_of[static_cast<std::size_t>(ms)];
    const auto& moves = solution.optimal_moves[static_cast<std::size_t>(gs)];
    for (const ActionId a : moves) {
      table.probs[static_cast<std::size_t>(ms)][a] = 1.0 / static_cast<double>(moves.size());
    }
  }
  table.probs[static_cast<std::size_t>(fold.terminal_state)][0] = 1.0;
  return table;
}

}  // namespace

EnvBundle make_env(const std::string& tag, std::optional<double> gamma,
                   std::optional<int> horizon) {
  const ScaleRange range{-1.0, 1.0};
  EnvBundle env;
  env.tag = tag;
  if (tag == kEnvBlackjack) {
    env.gamma = gamma.value_or(1.0);
    env.horizon = horizon.value_or(0);
    env.demo_model = build_blackjack();
    env.demo_model.discount = env.gamma;
    env.eval_model = env.demo_model;
    env.maps = blackjack_feature_maps(range);
    env.legal = env.demo_model.legal_fn();
    env.expert = value_iteration(env.demo_model).policy;
    env.feature_spec = "blackjack-poly2-ind4-scaled-v1";
  } else if (tag == kEnvGridworld) {
    GridworldConfig config;
    config.regions = RegionSpec::corners(config.side);
    config.discount = gamma.value_or(config.discount);
    env.gamma = config.discount;
    env.horizon = horizon.value_or(8);
    env.demo_model = build_gridworld(config);
    env.eval_model = env.demo_model;
    env.maps = gridworld_feature_maps(config.side, range);
    env.legal = env.demo_model.legal_fn();
    env.expert = value_iteration(env.demo_model).policy;
    env.feature_spec = "gridworld32-coord-threshold-scaled-v1";
  } else if (tag == kEnvTttRandom || tag == kEnvTttOptimal) {
    env.gamma = gamma.value_or(1.0);
    env.horizon = horizon.value_or(0);
    auto game = std::make_shared<const GameModel>(build_tictactoe());
    const MinimaxSolution solution = minimax_solve(*game);
    auto demo_fold = std::make_shared<const FoldedGame>(
        fold_game_to_mdp(*game, random_game_opponent(*game), env.gamma));
    env.demo_model = demo_fold->mdp;
    if (tag == kEnvTttOptimal) {
      auto eval_fold = std::make_shared<const FoldedGame>(
          fold_game_to_mdp(*game, minimax_game_opponent(*game, solution), env.gamma));
      env.eval_model = eval_fold->mdp;
      env.eval_fold = std::move(eval_fold);
    } else {
      env.eval_model = env.demo_model;
      env.eval_fold = demo_fold;
    }
    env.maps = tictactoe_feature_maps(*game, *demo_fold, range);
    env.legal = env.demo_model.legal_fn();
    env.expert = folded_minimax_expert(*game, *demo_fold, solution);
    env.feature_spec = "tictactoe-counts-poly2-cells-scaled-v1";
    env.game = std::move(game);
    env.demo_fold = std::move(demo_fold);
  } else {
    throw std::invalid_argument("unknown environment tag: " + tag);
  }
  return env;
}

PolicyTable build_expert(const std::string& tag) { return make_env(tag).expert; }

PolicyTable uniform_policy(const MdpModel& model) {
  PolicyTable table;
  table.probs.assign(static_cast<std::size_t>(model.state_count), Vec::Zero(model.action_count));
  for (StateId s = 0; s < model.state_count; ++s) {
    const auto& acts = model.legal[static_cast<std::size_t>(s)];
    for (const ActionId a : acts) {
      table.probs[static_cast<std::size_t>(s)][a] = 1.0 / static_cast<double>(acts.size());
    }
  }
  return table;
}

DemonstrationSet generate_demos(const MdpModel& model, const PolicyTable& expert, int n_episodes,
                                int horizon, std::uint64_t seed) {
  if (n_episodes < 1) throw std::invalid_argument("n_episodes must be >= 1");
  if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
  if (expert.state_count() != model.state_count) {
    throw std::invalid_argument("expert size does not match the model");
  }
  constexpr int kStepCap = 100000;
  DemonstrationSet demos;
  demos.trajectories.reserve(static_cast<std::size_t>(n_episodes));
  for (int e = 0; e < n_episodes; ++e) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(e)));
    StateId s = sample_from(model.start_dist, rng);
    Trajectory tr;
    for (int t = 0;; ++t) {
      if (model.is_terminal(s)) {
        tr.states.push_back(s);
        tr.actions.push_back(0);
        tr.terminal_included = true;
        break;
      }
      if (horizon > 0 && t == horizon) break;
      if (t >= kStepCap) throw NumericalError("episode exceeded the step cap");
      const Vec& row = expert.row(s);
      const double u = uniform_unit(rng);
      double cum = 0.0;
      ActionId a = -1;
      for (Eigen::Index j = 0; j < row.size(); ++j) {
        if (row[j] <= 0.0) continue;
        cum += row[j];
        a = static_cast<ActionId>(j);
        if (u < cum) break;
      }
      if (a < 0) throw std::domain_error("expert has no action at a reached state");
      tr.states.push_back(s);
      tr.actions.push_back(a);
      s = step(model, s, a, rng).next;
    }
    demos.trajectories.push_back(std::move(tr));
  }
  return demos;
}

PolicyTable improved_policy_lpo(const EnvBundle& env, const QParams& values) {
  return greedy_policy(values, env.maps, env.legal, env.eval_model.state_count);
}

PolicyTable improved_policy_lrp(const EnvBundle& env, const Vec& w_R) {
  std::vector<double> fitted(env.eval_model.rows.size(), 0.0);
  for (StateId s = 0; s < env.eval_model.state_count; ++s) {
    for (const ActionId a : env.eval_model.legal[static_cast<std::size_t>(s)]) {
      fitted[env.eval_model.sa_index(s, a)] = env.maps.g_R(s, a).dot(w_R);
    }
  }
  return value_iteration(env.eval_model, [&fitted, &env](StateId s, ActionId a) {
           return fitted[env.eval_model.sa_index(s, a)];
         }).policy;
}

ResultRow run_cell(const EnvBundle& env, const ExperimentConfig& config, int episodes,
                   int run_index) {
  ResultRow row;
  row.env = env.tag;
  row.algo = config.algo;
  row.episodes = episodes;
  row.run = run_index;
  row.seed = mix_seed(mix_seed(config.master_seed, static_cast<std::uint64_t>(episodes)),
                      static_cast<std::uint64_t>(run_index));
  const DemonstrationSet demos =
      generate_demos(env.demo_model, env.expert, episodes, env.horizon, row.seed);

  using Clock = std::chrono::steady_clock;
  try {
    PolicyTable improved;
    if (config.algo == "lpo") {
      const auto t0 = Clock::now();
      const LpoFit fit = fit_lpo(demos, env.maps, env.legal, config.beta, config.solver);
      row.fit_cpu_ms =
          std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
      row.converged = fit.result.converged;
      improved = improved_policy_lpo(env, fit.values);
    } else if (config.algo == "lrp") {
      const auto t0 = Clock::now();
      const LrpFit fit =
          fit_lrp(demos, env.maps, env.legal, env.gamma, config.beta, config.ridge, config.solver);
      row.fit_cpu_ms =
          std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
      row.converged = fit.result.converged;
      improved = improved_policy_lrp(env, fit.reward.w_R);
    } else {
      throw std::invalid_argument("unknown algorithm: " + config.algo);
    }
    row.loss = loss(env.eval_model, improved);
  } catch (const SingularityError&) {
    row.loss = std::numeric_limits<double>::quiet_NaN();
    row.converged = false;
  } catch (const NumericalError&) {
    row.loss = std::numeric_limits<double>::quiet_NaN();
    row.converged = false;
  }
  return row;
}

std::vector<ResultRow> run_sweep(const ExperimentConfig& config) {
  if (config.runs < 1) throw std::invalid_argument("runs must be >= 1");
  if (config.episode_counts.empty()) throw std::invalid_argument("episode_counts is empty");
  for (std::size_t i = 0; i < config.episode_counts.size(); ++i) {
    if (config.episode_counts[i] < 1) throw std::invalid_argument("episode counts must be >= 1");
    if (i > 0 && config.episode_counts[i] < config.episode_counts[i - 1]) {
      throw std::invalid_argument("episode counts must be sorted ascending");
    }
  }
  if (config.algo != "lrp" && config.algo != "lpo") {
    throw std::invalid_argument("unknown algorithm: " + config.algo);
  }
  const EnvBundle env = make_env(config.env, config.gamma, config.horizon);

  const std::size_t cells = config.episode_counts.size() * static_cast<std::size_t>(config.runs);
  std::vector<ResultRow> rows(cells);
  std::atomic<std::size_t> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= cells) return;
      try {
        const int episodes = config.episode_counts[i / static_cast<std::size_t>(config.runs)];
        const int run_index = static_cast<int>(i % static_cast<std::size_t>(config.runs));
        rows[i] = run_cell(env, config, episodes, run_index);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const int n_workers = std::max(1, std::min<int>(config.workers, static_cast<int>(cells)));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::string results_to_csv(const std::vector<ResultRow>& rows) {
  std::string out = "env,algo,episodes,run,seed,loss,fit_cpu_ms,converged\n";
  char buf[512];
  for (const ResultRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%d,%d,%llu,%.17g,%lld,%s\n", r.env.c_str(),
                  r.algo.c_str(), r.episodes, r.run, static_cast<unsigned long long>(r.seed),
                  r.loss, static_cast<long long>(r.fit_cpu_ms), r.converged ? "true" : "false");
    out += buf;
  }
  return out;
}

void write_results_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << results_to_csv(rows);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace mapirl

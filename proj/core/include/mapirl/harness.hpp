#pragma once

#include "mapirl/evaluate.hpp"
#include "mapirl/features.hpp"
#include "mapirl/fit.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

namespace mapirl {

inline constexpr const char* kEnvBlackjack = "blackjack";
inline constexpr const char* kEnvGridworld = "gridworld";
inline constexpr const char* kEnvTttRandom = "tictactoe-random-opp";
inline constexpr const char* kEnvTttOptimal = "tictactoe-optimal-opp";

/// Experiment grid over one environment and algorithm.
struct ExperimentConfig {
  std::string env = kEnvBlackjack;
  std::string algo = "lpo";  // lrp | lpo
  std::vector<int> episode_counts = {10, 100, 1000, 10000};
  int runs = 20;
  std::optional<int> horizon;   // unset = environment default (0 = to terminal)
  std::optional<double> gamma;  // unset = environment default
  double beta = 1.0;
  std::optional<double> ridge;  // unset = data-driven default
  SolverConfig solver;
  std::uint64_t master_seed = 1;
  int workers = 1;
};

struct ResultRow {
  std::string env;
  std::string algo;
  int episodes = 0;
  int run = 0;
  std::uint64_t seed = 0;
  double loss = 0.0;  // NaN when the fit failed
  long long fit_cpu_ms = 0;
  bool converged = false;
};

/// Everything fixed per environment tag. Demonstrations are generated by
/// `expert` on `demo_model`; losses are measured on `eval_model`. The two
/// differ only for the tic-tac-toe tags, where demonstrations always come
/// from games against the uniform-random opponent while eval_model folds the
/// tag's opponent; both folds index the same states, so policies transfer.
struct EnvBundle {
  std::string tag;
  std::string feature_spec;
  double gamma = 1.0;
  int horizon = 0;  // 0 = episodes run until the terminal state
  MdpModel demo_model;
  MdpModel eval_model;
  FeatureMaps maps;
  LegalFn legal;
  PolicyTable expert;
  std::shared_ptr<const GameModel> game;  // tic-tac-toe tags only
  std::shared_ptr<const FoldedGame> demo_fold;
  std::shared_ptr<const FoldedGame> eval_fold;
};

/// Builds the models, the [-1,1]-scaled feature maps, and the expert for a
/// tag. Blackjack and tic-tac-toe default to discount 1 with episodes run to
/// the terminal state; gridworld defaults to discount 0.95 with 8-step
/// episodes.
EnvBundle make_env(const std::string& tag, std::optional<double> gamma = std::nullopt,
                   std::optional<int> horizon = std::nullopt);

/// The demonstration-side expert for a tag: the greedy optimal policy for
/// blackjack and gridworld, uniform over minimax-optimal moves for
/// tic-tac-toe.
PolicyTable build_expert(const std::string& tag);

/// Uniform-over-legal baseline policy.
PolicyTable uniform_policy(const MdpModel& model);

/// Game-state opponent policies for match play: uniform over legal moves,
/// and uniform over the value-minimizing moves of a minimax solution. Rows
/// are defined at O-to-move states only.
PolicyTable random_game_opponent(const GameModel& game);
PolicyTable minimax_game_opponent(const GameModel& game, const MinimaxSolution& solution);

/// Re-indexes a policy over folded X-to-move states as a game-state policy
/// usable with play_match; rows at non-X states are left empty.
PolicyTable game_policy_from_folded(const FoldedGame& fold, const PolicyTable& folded_pi);

/// Rolls out `expert` for n_episodes. Episode e uses generator seed
/// mix_seed(seed, e). With horizon = 0 episodes run until a terminal state,
/// which is recorded with a marker action excluded from likelihood and
/// feature sums; with horizon > 0 exactly that many steps are taken.
DemonstrationSet generate_demos(const MdpModel& model, const PolicyTable& expert, int n_episodes,
                                int horizon, std::uint64_t seed);

/// Policy improvement on the evaluation model: greedy in w_Q for LPO; for
/// LRP, exact planning against the fitted reward g_R^T w_R.
PolicyTable improved_policy_lpo(const EnvBundle& env, const QParams& values);
PolicyTable improved_policy_lrp(const EnvBundle& env, const Vec& w_R);

/// One sweep cell: demos -> fit -> improved policy -> loss on eval_model.
/// The cell seed is mix_seed(mix_seed(master_seed, episodes), run_index).
/// LPO improves by acting greedily on w_Q; LRP solves eval_model for the
/// fitted reward g_R^T w_R. Data-dependent fit failures (singular LSTDQ,
/// numerical blowup) produce a NaN-loss row instead of aborting the sweep.
ResultRow run_cell(const EnvBundle& env, const ExperimentConfig& config, int episodes,
                   int run_index);

/// All cells of the grid, in (episode count, run) order regardless of worker
/// count. Rows depend only on the config and master seed, except fit_cpu_ms.
std::vector<ResultRow> run_sweep(const ExperimentConfig& config);

std::string results_to_csv(const std::vector<ResultRow>& rows);
void write_results_csv(const std::vector<ResultRow>& rows, const std::string& path);

/// Demonstration files are JSON Lines: a header {"env": tag, "version": 1}
/// followed by one {"states", "actions", "terminal_included"} object per
/// trajectory. read_demos raises ParseError with the 1-based line number on
/// malformed input; read(write(D)) == D exactly.
void write_demos(const DemonstrationSet& demos, const std::string& path);
DemonstrationSet read_demos(const std::string& path);

}  // namespace mapirl

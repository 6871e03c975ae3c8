#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mapirl/blackjack.hpp"
#include "mapirl/evaluate.hpp"
#include "mapirl/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace mapirl;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

int line_count(const std::string& path) {
  std::ifstream in(path);
  int n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

bool rows_equal_ignoring_time(const ResultRow& a, const ResultRow& b) {
  const bool loss_equal =
      (std::isnan(a.loss) && std::isnan(b.loss)) || a.loss == b.loss;
  return a.env == b.env && a.algo == b.algo && a.episodes == b.episodes && a.run == b.run &&
         a.seed == b.seed && loss_equal && a.converged == b.converged;
}

}  // namespace

TEST_CASE("blackjack expert agrees with basic-strategy anchors") {
  EnvBundle env = make_env(kEnvBlackjack);
  for (int dealer = 1; dealer <= 10; ++dealer) {
    for (bool usable : {false, true}) {
      CHECK(env.expert.action_at(blackjack::state_index(21, dealer, usable)) == blackjack::kStick);
      CHECK(env.expert.action_at(blackjack::state_index(20, dealer, usable)) == blackjack::kStick);
    }
  }
  CHECK(env.expert.action_at(blackjack::state_index(12, 10, false)) == blackjack::kHit);
  CHECK(env.gamma == 1.0);
  CHECK(env.horizon == 0);
}

TEST_CASE("gridworld expert is the greedy optimal policy") {
  EnvBundle env = make_env(kEnvGridworld);
  CHECK(env.gamma == 0.95);
  CHECK(env.horizon == 8);
  ValueFunctions vi = value_iteration(env.demo_model);
  REQUIRE(env.expert.state_count() == env.demo_model.state_count);
  for (StateId s = 0; s < env.demo_model.state_count; ++s) {
    CHECK(env.expert.action_at(s) == vi.policy.action_at(s));
  }
}

TEST_CASE("game expert spreads mass uniformly over optimal moves") {
  EnvBundle env = make_env(kEnvTttRandom);
  REQUIRE(env.game);
  REQUIRE(env.demo_fold);
  MinimaxSolution sol = minimax_solve(*env.game);

  const FoldedGame& fold = *env.demo_fold;
  for (StateId m = 0; m < fold.mdp.state_count; ++m) {
    if (fold.mdp.is_terminal(m)) continue;
    const StateId g = fold.game_state_of[m];
    const auto& moves = sol.optimal_moves[g];
    const Vec& row = env.expert.row(m);
    CHECK(row.sum() == doctest::Approx(1.0).epsilon(1e-12));
    for (ActionId a = 0; a < row.size(); ++a) {
      const bool optimal = std::find(moves.begin(), moves.end(), a) != moves.end();
      CHECK(row[a] == doctest::Approx(optimal ? 1.0 / moves.size() : 0.0).epsilon(1e-12));
    }
  }

  // a forced-win state has exactly one optimal move, so its row is one-hot
  StateId g = env.game->root;
  for (ActionId c : {0, 3, 1, 4}) g = env.game->successor(g, c);
  const StateId m = fold.mdp_state_of[g];
  REQUIRE(m >= 0);
  CHECK(env.expert.row(m)[2] == 1.0);
}

TEST_CASE("demo generation is seeded per episode") {
  EnvBundle env = make_env(kEnvGridworld);
  DemonstrationSet ten = generate_demos(env.demo_model, env.expert, 10, env.horizon, 99);
  REQUIRE(ten.trajectories.size() == 10);
  for (const auto& t : ten.trajectories) {
    CHECK(t.decision_count() == 8);
    CHECK_FALSE(t.terminal_included);
    for (std::size_t i = 0; i < t.states.size(); ++i) {
      CHECK(env.demo_model.is_legal(t.states[i], t.actions[i]));
    }
  }

  // same call, same data, bit for bit
  DemonstrationSet again = generate_demos(env.demo_model, env.expert, 10, env.horizon, 99);
  CHECK(ten == again);

  // episodes own their seeds, so a shorter run is a prefix of a longer one
  DemonstrationSet five = generate_demos(env.demo_model, env.expert, 5, env.horizon, 99);
  for (int e = 0; e < 5; ++e) CHECK(five.trajectories[e] == ten.trajectories[e]);

  DemonstrationSet other = generate_demos(env.demo_model, env.expert, 10, env.horizon, 100);
  CHECK_FALSE(ten == other);
}

TEST_CASE("episodic demos end in the terminal marker") {
  EnvBundle env = make_env(kEnvBlackjack);
  DemonstrationSet demos = generate_demos(env.demo_model, env.expert, 20, env.horizon, 5);
  REQUIRE(demos.trajectories.size() == 20);
  for (const auto& t : demos.trajectories) {
    CHECK(t.terminal_included);
    CHECK(t.states.back() == blackjack::kTerminal);
    CHECK(t.decision_count() >= 1);
    CHECK(t.states.size() == t.actions.size());
  }
}

TEST_CASE("sweep cells are deterministic given config and seed") {
  EnvBundle env = make_env(kEnvBlackjack);
  ExperimentConfig cfg;
  cfg.env = kEnvBlackjack;
  cfg.algo = "lpo";
  cfg.master_seed = 31;

  ResultRow a = run_cell(env, cfg, 100, 2);
  ResultRow b = run_cell(env, cfg, 100, 2);
  CHECK(rows_equal_ignoring_time(a, b));
  CHECK(a.env == kEnvBlackjack);
  CHECK(a.algo == "lpo");
  CHECK(a.episodes == 100);
  CHECK(a.run == 2);
  CHECK(a.seed == mix_seed(mix_seed(31, 100), 2));
  CHECK(std::isfinite(a.loss));
  CHECK(a.converged);
}

TEST_CASE("sweep covers the grid in episode-major order") {
  ExperimentConfig cfg;
  cfg.env = kEnvBlackjack;
  cfg.algo = "lpo";
  cfg.episode_counts = {10, 50};
  cfg.runs = 3;
  cfg.master_seed = 77;

  std::vector<ResultRow> rows = run_sweep(cfg);
  REQUIRE(rows.size() == 6);
  int i = 0;
  for (int episodes : {10, 50}) {
    for (int run = 0; run < 3; ++run, ++i) {
      CHECK(rows[i].episodes == episodes);
      CHECK(rows[i].run == run);
    }
  }

  // a standalone cell reproduces its sweep row
  EnvBundle env = make_env(cfg.env);
  ResultRow alone = run_cell(env, cfg, 50, 2);
  CHECK(rows_equal_ignoring_time(alone, rows[5]));

  // worker count changes scheduling only
  ExperimentConfig parallel = cfg;
  parallel.workers = 4;
  std::vector<ResultRow> prows = run_sweep(parallel);
  REQUIRE(prows.size() == rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(rows_equal_ignoring_time(rows[k], prows[k]));
  }
}

TEST_CASE("result CSV has the pinned header and one line per row") {
  ExperimentConfig cfg;
  cfg.env = kEnvBlackjack;
  cfg.algo = "lpo";
  cfg.episode_counts = {10};
  cfg.runs = 2;
  std::vector<ResultRow> rows = run_sweep(cfg);
  std::string csv = results_to_csv(rows);

  std::istringstream in(csv);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "env,algo,episodes,run,seed,loss,fit_cpu_ms,converged");
  int data_lines = 0;
  while (std::getline(in, line)) {
    if (!line.empty()) ++data_lines;
  }
  CHECK(data_lines == 2);

  const std::string path = temp_path("mapirl_test_results.csv");
  write_results_csv(rows, path);
  CHECK(line_count(path) == 3);
  std::remove(path.c_str());
}

TEST_CASE("demo files round-trip exactly") {
  const std::string path = temp_path("mapirl_test_demos.jsonl");

  DemonstrationSet empty;
  empty.env_tag = kEnvBlackjack;
  write_demos(empty, path);
  CHECK(line_count(path) == 1);
  DemonstrationSet back = read_demos(path);
  CHECK(back == empty);

  DemonstrationSet demos;
  demos.env_tag = kEnvGridworld;
  demos.trajectories.push_back({{0, 5, 9}, {1, 2, 0}, false});
  demos.trajectories.push_back({{3, 200}, {0, 0}, true});
  demos.trajectories.push_back({{7}, {4}, false});
  write_demos(demos, path);
  CHECK(line_count(path) == 4);
  CHECK(read_demos(path) == demos);

  // generated data survives the trip too
  EnvBundle env = make_env(kEnvBlackjack);
  DemonstrationSet generated = generate_demos(env.demo_model, env.expert, 25, 0, 11);
  generated.env_tag = env.tag;
  write_demos(generated, path);
  CHECK(read_demos(path) == generated);
  std::remove(path.c_str());
}

TEST_CASE("malformed demo files report the offending line") {
  const std::string path = temp_path("mapirl_test_bad.jsonl");
  {
    std::ofstream out(path);
    out << "{\"env\":\"blackjack\",\"version\":1}\n";
    out << "this is not json\n";
  }
  try {
    read_demos(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }

  {
    std::ofstream out(path);
    out << "[1,2,3]\n";  // valid json, wrong shape for a header
  }
  try {
    read_demos(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 1);
  }
  std::remove(path.c_str());
}

TEST_CASE("fit parameter documents round-trip through json") {
  ParamsDoc doc;
  doc.model = "lrp";
  doc.beta = 2.0;
  doc.gamma = 0.95;
  doc.ridge = 1e-6;
  Vec w_r(3);
  w_r << 0.25, -1.75, 3.5;
  doc.w_R = w_r;
  Vec w_q(4);
  w_q << 1.0, 0.0, -2.5, 0.125;
  doc.w_Q = w_q;
  doc.feature_spec = "blackjack-v1";
  doc.objective = -12.5;
  doc.converged = true;

  ParamsDoc back = params_from_json(params_to_json(doc));
  CHECK(back.model == doc.model);
  CHECK(back.beta == doc.beta);
  CHECK(back.gamma == doc.gamma);
  CHECK(back.ridge == doc.ridge);
  REQUIRE(back.w_R.has_value());
  CHECK(*back.w_R == *doc.w_R);
  CHECK(back.w_Q == doc.w_Q);
  CHECK(back.feature_spec == doc.feature_spec);
  CHECK(back.objective == doc.objective);
  CHECK(back.converged == doc.converged);

  ParamsDoc lpo;
  lpo.model = "lpo";
  lpo.w_Q = w_q;
  lpo.feature_spec = "tabular";
  ParamsDoc lpo_back = params_from_json(params_to_json(lpo));
  CHECK_FALSE(lpo_back.w_R.has_value());
  CHECK(lpo_back.w_Q == lpo.w_Q);

  const std::string path = temp_path("mapirl_test_params.json");
  write_params(doc, path);
  ParamsDoc file_back = read_params(path);
  CHECK(file_back.model == doc.model);
  CHECK(file_back.w_Q == doc.w_Q);
  std::remove(path.c_str());
}

#include "mapirl/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

namespace {

struct Options {
  std::string env = mapirl::kEnvBlackjack;
  std::string algo = "lpo";
  std::vector<int> episodes = {10, 100, 1000, 10000};
  int gen_episodes = 100;
  int runs = 20;
  int workers = 1;
  std::uint64_t seed = 1;
  double beta = 1.0;
  double gamma = -1.0;  // <0 = environment default
  double ridge = -1.0;  // <0 = data-driven default
  int horizon = -1;     // <0 = environment default
  bool serial_reduce = false;
  std::string demos_path;
  std::string params_path;
  std::string out_path;
};

std::optional<double> opt_positive(double v) {
  return v < 0.0 ? std::nullopt : std::optional<double>(v);
}

std::optional<int> opt_horizon(int v) { return v < 0 ? std::nullopt : std::optional<int>(v); }

int cmd_gen_demos(const Options& opt) {
  const mapirl::EnvBundle env =
      mapirl::make_env(opt.env, opt_positive(opt.gamma), opt_horizon(opt.horizon));
  mapirl::DemonstrationSet demos = mapirl::generate_demos(env.demo_model, env.expert,
                                                          opt.gen_episodes, env.horizon, opt.seed);
  demos.env_tag = env.tag;
  mapirl::write_demos(demos, opt.out_path);
  std::printf("wrote %zu trajectories to %s\n", demos.trajectories.size(), opt.out_path.c_str());
  return 0;
}

int cmd_fit(const Options& opt) {
  const mapirl::EnvBundle env = mapirl::make_env(opt.env, opt_positive(opt.gamma), std::nullopt);
  const mapirl::DemonstrationSet demos = mapirl::read_demos(opt.demos_path);
  if (!demos.env_tag.empty() && demos.env_tag != env.tag) {
    throw std::runtime_error("demonstrations were generated for env '" + demos.env_tag + "'");
  }
  mapirl::ParamsDoc doc;
  doc.beta = opt.beta;
  doc.gamma = env.gamma;
  doc.feature_spec = env.feature_spec;
  if (opt.algo == "lpo") {
    const mapirl::LpoFit fit = mapirl::fit_lpo(demos, env.maps, env.legal, opt.beta);
    doc.model = "lpo";
    doc.w_Q = fit.values.w_Q;
    doc.objective = fit.result.objective;
    doc.converged = fit.result.converged;
    std::printf("objective=%.17g converged=%s iterations=%d\n", fit.result.objective,
                fit.result.converged ? "true" : "false", fit.result.iterations);
  } else if (opt.algo == "lrp") {
    const mapirl::LrpFit fit = mapirl::fit_lrp(demos, env.maps, env.legal, env.gamma, opt.beta,
                                               opt_positive(opt.ridge));
    doc.model = "lrp";
    doc.ridge = fit.matrices.ridge;
    doc.w_R = fit.reward.w_R;
    doc.w_Q = fit.values.w_Q;
    doc.objective = fit.result.objective;
    doc.converged = fit.result.converged;
    std::printf("objective=%.17g converged=%s iterations=%d ridge=%.17g\n", fit.result.objective,
                fit.result.converged ? "true" : "false", fit.result.iterations,
                fit.matrices.ridge);
  } else {
    throw std::invalid_argument("unknown algorithm: " + opt.algo);
  }
  mapirl::write_params(doc, opt.out_path);
  return 0;
}

int cmd_eval(const Options& opt) {
  const mapirl::EnvBundle env = mapirl::make_env(opt.env, opt_positive(opt.gamma), std::nullopt);
  const mapirl::ParamsDoc doc = mapirl::read_params(opt.params_path);
  if (doc.feature_spec != env.feature_spec) {
    throw std::runtime_error("parameter document was fitted for feature spec '" +
                             doc.feature_spec + "', env expects '" + env.feature_spec + "'");
  }
  mapirl::PolicyTable improved;
  if (doc.model == "lpo") {
    improved = mapirl::improved_policy_lpo(env, {doc.w_Q, doc.beta});
  } else {
    if (!doc.w_R) throw std::runtime_error("lrp parameter document is missing w_R");
    improved = mapirl::improved_policy_lrp(env, *doc.w_R);
  }
  std::printf("loss=%.17g\n", mapirl::loss(env.eval_model, improved));
  return 0;
}

int cmd_sweep(const Options& opt) {
  mapirl::ExperimentConfig config;
  config.env = opt.env;
  config.algo = opt.algo;
  config.episode_counts = opt.episodes;
  config.runs = opt.runs;
  config.horizon = opt_horizon(opt.horizon);
  config.gamma = opt_positive(opt.gamma);
  config.beta = opt.beta;
  config.ridge = opt_positive(opt.ridge);
  config.master_seed = opt.seed;
  config.workers = opt.workers;
  const std::vector<mapirl::ResultRow> rows = mapirl::run_sweep(config);
  mapirl::write_results_csv(rows, opt.out_path);
  std::printf("wrote %zu rows to %s\n", rows.size(), opt.out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MAP inverse reinforcement learning from demonstrations"};
  app.require_subcommand(1);
  Options opt;

  const std::string env_help = "environment: blackjack | gridworld | tictactoe-random-opp | "
                               "tictactoe-optimal-opp";

  CLI::App* gen = app.add_subcommand("gen-demos", "generate expert demonstrations");
  gen->add_option("--env", opt.env, env_help);
  gen->add_option("--episodes", opt.gen_episodes, "number of episodes")->check(CLI::PositiveNumber);
  gen->add_option("--horizon", opt.horizon, "steps per episode (default: environment's)");
  gen->add_option("--gamma", opt.gamma, "discount (default: environment's)");
  gen->add_option("--seed", opt.seed, "master seed");
  gen->add_option("--out", opt.out_path, "output JSONL path")->required();

  CLI::App* fit = app.add_subcommand("fit", "fit MAP parameters to demonstrations");
  fit->add_option("--env", opt.env, env_help);
  fit->add_option("--algo", opt.algo, "algorithm: lrp | lpo");
  fit->add_option("--demos", opt.demos_path, "demonstration JSONL path")->required();
  fit->add_option("--gamma", opt.gamma, "discount (default: environment's)");
  fit->add_option("--beta", opt.beta, "softmax inverse temperature");
  fit->add_option("--ridge", opt.ridge, "LSTDQ ridge (default: data-driven)");
  fit->add_option("--out", opt.out_path, "output parameter JSON path")->required();

  CLI::App* ev = app.add_subcommand("eval", "evaluate fitted parameters against the true model");
  ev->add_option("--env", opt.env, env_help);
  ev->add_option("--params", opt.params_path, "parameter JSON path")->required();
  ev->add_option("--gamma", opt.gamma, "discount (default: environment's)");

  CLI::App* sweep = app.add_subcommand("sweep", "episode-count sweep writing a results CSV");
  sweep->add_option("--env", opt.env, env_help);
  sweep->add_option("--algo", opt.algo, "algorithm: lrp | lpo");
  sweep->add_option("--episodes", opt.episodes, "episode counts, e.g. 10,100,1000")
      ->delimiter(',');
  sweep->add_option("--runs", opt.runs, "runs per episode count")->check(CLI::PositiveNumber);
  sweep->add_option("--horizon", opt.horizon, "steps per episode (default: environment's)");
  sweep->add_option("--gamma", opt.gamma, "discount (default: environment's)");
  sweep->add_option("--beta", opt.beta, "softmax inverse temperature");
  sweep->add_option("--ridge", opt.ridge, "LSTDQ ridge (default: data-driven)");
  sweep->add_option("--seed", opt.seed, "master seed");
  sweep->add_option("--workers", opt.workers, "concurrent cells")->check(CLI::PositiveNumber);
  sweep->add_flag("--serial-reduce", opt.serial_reduce,
                  "serial deterministic reduction (always on in this build)");
  sweep->add_option("--out", opt.out_path, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) return cmd_gen_demos(opt);
    if (fit->parsed()) return cmd_fit(opt);
    if (ev->parsed()) return cmd_eval(opt);
    return cmd_sweep(opt);
  } catch (const mapirl::ParseError& e) {
    std::cerr << "error: " << e.what() << " (line " << e.line << ")\n";
    return 2;
  } catch (const mapirl::SingularityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const mapirl::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

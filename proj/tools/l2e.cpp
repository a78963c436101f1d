// Command-line entry point: train, eval, inspect-plan, plot.
#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "l2e/harness.hpp"
#include "l2e/planmdp.hpp"
#include "l2e/text.hpp"

using namespace l2e;

namespace {

int cmd_train(const std::string& config_path, std::optional<std::uint64_t> seed_arg, const std::string& out,
              std::optional<int> agents) {
  ExperimentConfig cfg = ExperimentConfig::load(config_path);
  const std::uint64_t seed = seed_arg.value_or(cfg.seed);
  const int n = agents.value_or(cfg.agents);
  if (n == 1) {
    TrainOptions opts;
    opts.out = out;
    const TrainResult r = train(cfg, seed, opts);
    std::cout << "steps=" << r.steps << " episodes=" << r.episodes
              << " final_success=" << format_double(r.evals.back().success_rate) << "\n";
    return 0;
  }
  const auto results = train_agents(cfg, seed, n, out, worker_threads());
  std::vector<std::vector<bool>> finals;
  for (const auto& r : results) finals.push_back(r.evals.back().successes);
  const SuccessSummary s = summarize(finals);
  std::cout << "agents=" << n << " final_success=" << format_double(s.mean)
            << " std_of_mean=" << format_double(s.std_of_mean) << "\n";
  return 0;
}

int cmd_eval(const std::vector<std::string>& ckpts, int episodes, const std::string& config_path,
             std::uint64_t seed) {
  std::optional<ExperimentConfig> cfg;
  if (!config_path.empty()) cfg = ExperimentConfig::load(config_path);
  std::vector<std::vector<bool>> all;
  for (const auto& c : ckpts) {
    all.push_back(evaluate_checkpoint(c, cfg, episodes, seed));
    std::string bits;
    for (bool b : all.back()) bits += b ? '1' : '0';
    std::cout << c << ' ' << bits << "\n";
  }
  const SuccessSummary s = summarize(all);
  std::cout << "success_rate=" << format_double(s.mean) << " std_of_mean=" << format_double(s.std_of_mean)
            << " agents=" << s.agents << " rollouts=" << s.rollouts << "\n";
  return 0;
}

int cmd_inspect(const std::string& env_name, std::uint64_t seed, std::size_t density) {
  EnvConfig env;
  env.task = parse_task(env_name);
  PlanMdpOptions opts;
  opts.plan_density = density;
  PlanMdp mdp(env, opts);
  Rng rng = make_rng(seed);
  const TaskSample task = mdp.sample_task(rng);
  std::cout << serialize_plan(task.plan);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plan-conditioned reinforcement learning experiments"};
  app.require_subcommand(1);

  auto* train_cmd = app.add_subcommand("train", "train agents from a config file");
  std::string config_path, out;
  std::optional<std::uint64_t> seed;
  std::optional<int> agents;
  train_cmd->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--seed", seed, "base seed (default: experiment.seed)");
  train_cmd->add_option("--out", out, "output directory")->required();
  train_cmd->add_option("--agents", agents, "number of agents (default: experiment.agents)");

  auto* eval_cmd = app.add_subcommand("eval", "evaluate saved agents");
  std::vector<std::string> ckpts;
  int episodes = 30;
  std::string eval_config;
  std::uint64_t eval_seed = 0;
  eval_cmd->add_option("--ckpt", ckpts, "checkpoint file(s)")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--episodes", episodes, "rollouts per checkpoint");
  eval_cmd->add_option("--config", eval_config, "config (default: the one stored with the checkpoint)");
  eval_cmd->add_option("--seed", eval_seed, "evaluation seed");

  auto* inspect_cmd = app.add_subcommand("inspect-plan", "print a sampled plan");
  std::string env_name;
  std::uint64_t inspect_seed = 0;
  std::size_t density = 0;
  inspect_cmd->add_option("--env", env_name, "pushing | obstacle | maze")->required();
  inspect_cmd->add_option("--seed", inspect_seed, "seed");
  inspect_cmd->add_option("--density", density, "waypoints to keep (0: planner default)");

  auto* plot_cmd = app.add_subcommand("plot", "write plot data from run directories");
  std::vector<std::string> runs;
  std::string plot_out;
  plot_cmd->add_option("--runs", runs, "run or agent directories")->required();
  plot_cmd->add_option("--out", plot_out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) return cmd_train(config_path, seed, out, agents);
    if (*eval_cmd) return cmd_eval(ckpts, episodes, eval_config, eval_seed);
    if (*inspect_cmd) return cmd_inspect(env_name, inspect_seed, density);
    if (*plot_cmd) {
      std::vector<std::filesystem::path> dirs(runs.begin(), runs.end());
      for (const auto& name : emit_plots(dirs, plot_out)) std::cout << name << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "l2e/baselines.hpp"
#include "l2e/envs.hpp"
#include "l2e/replay.hpp"
#include "l2e/sac.hpp"

namespace l2e {

enum class Method { L2E, Her, Plan, PlanIm, SubgoalRl };
enum class ReplayStrategy { Uniform, Biased };

std::string_view method_name(Method m);
Method parse_method(std::string_view name);
std::string_view replay_strategy_name(ReplayStrategy s);
ReplayStrategy parse_replay_strategy(std::string_view name);
std::string_view her_strategy_name(HerStrategy s);
HerStrategy parse_her_strategy(std::string_view name);

/// Everything a training run depends on. Text form: one `section.key = value`
/// per line, `#` starts a comment, unknown keys are errors.
struct ExperimentConfig {
  Method method = Method::L2E;
  std::string label;  // series name in plots; defaults to the method name
  EnvConfig env;
  std::int64_t total_steps = 1'000'000;
  int agents = 10;
  std::uint64_t seed = 0;
  bool save_replay = false;

  ReplayStrategy replay = ReplayStrategy::Biased;
  std::size_t replay_n = 10;
  std::size_t replay_m = 1000;
  std::size_t buffer_capacity = 1'000'000;

  HerStrategy her_strategy = HerStrategy::Future;
  int her_k = 5;

  double sigma = 0.5;
  std::size_t plan_density = 0;

  LearnerConfig learner;
  std::int64_t warmup = 10'000;
  double updates_per_step = 1.0;

  std::int64_t eval_interval = 25'000;
  int eval_rollouts = 30;

  InverseModelConfig im;
  int im_episodes = 400;

  void validate() const;
  std::string display_label() const;

  /// Canonical text listing every key.
  std::string text() const;
  /// FNV-1a of text(), as 16 hex digits.
  std::string hash() const;

  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig load(const std::filesystem::path& path);
};

}  // namespace l2e

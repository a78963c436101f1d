#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "l2e/envs.hpp"
#include "l2e/planners.hpp"
#include "l2e/shaping.hpp"

namespace l2e {

/// Latent dimension of the analytical plan encoding.
std::size_t latent_dim(Task task);

/// Injective analytical encoding: (start box, goal) for basic pushing, plus
/// the intermediate for obstacle pushing, all waypoints flattened for the maze.
std::vector<double> encode_plan(const Plan& plan, Task task);

struct PlanMdpOptions {
  double sigma = 0.5;
  /// Number of waypoints kept after planning (0 keeps the planner's length).
  std::size_t plan_density = 0;
  /// Planner failures are retried with a fresh environment reset this often.
  int max_resamples = 100;
};

struct TaskSample {
  State state;
  Plan plan;
};

/// Plan-conditioned MDP built from an environment, its planner and the
/// shaping reward.
class PlanMdp {
 public:
  PlanMdp(const EnvConfig& env, PlanMdpOptions options = {});

  /// s ~ P_S, g ~ P_G, then p ~ Ω(.|s, g).
  TaskSample sample_task(Rng& rng);

  /// Environment step whose reward is replaced by R_P(s, a, s', p).
  StepResult shaped_step(std::span<const double> action, const Plan& plan, Rng& rng);

  std::vector<double> encode(const Plan& plan) const { return encode_plan(plan, task()); }

  Task task() const { return env_->task(); }
  Env& env() { return *env_; }
  const Env& env() const { return *env_; }
  const Planner& planner() const { return *planner_; }
  const ShapingConfig& shaping() const { return shaping_; }
  std::size_t latent_dim() const { return l2e::latent_dim(task()); }

 private:
  std::unique_ptr<Env> env_;
  std::unique_ptr<Planner> planner_;
  ShapingConfig shaping_;
  PlanMdpOptions options_;
};

}  // namespace l2e

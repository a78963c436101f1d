#include "l2e/planmdp.hpp"

#include <stdexcept>

namespace l2e {

std::size_t latent_dim(Task task) {
  switch (task) {
    case Task::BasicPushing:
      return 4;
    case Task::ObstaclePushing:
      return 6;
    case Task::Maze:
      return 2 * kMazePlanLength;
  }
  return 0;
}

std::vector<double> encode_plan(const Plan& plan, Task task) {
  if (plan.task() != task) throw std::invalid_argument("encode_plan: plan belongs to another task");
  const PlanMeta& meta = plan.meta();
  switch (task) {
    case Task::BasicPushing:
      return {meta.start.x, meta.start.y, plan.goal().x, plan.goal().y};
    case Task::ObstaclePushing: {
      if (!meta.intermediate) throw std::invalid_argument("encode_plan: missing intermediate");
      return {meta.start.x,     meta.start.y,     plan.goal().x,
              plan.goal().y,    meta.intermediate->x, meta.intermediate->y};
    }
    case Task::Maze: {
      if (plan.size() != kMazePlanLength || plan.dim() != 2) {
        throw std::invalid_argument("encode_plan: maze plans must have 20 2D waypoints");
      }
      const auto flat = plan.flat();
      return {flat.begin(), flat.end()};
    }
  }
  throw std::invalid_argument("encode_plan: unknown task");
}

PlanMdp::PlanMdp(const EnvConfig& env, PlanMdpOptions options)
    : env_(make_env(env)),
      planner_(make_planner(env)),
      shaping_(make_shaping_config(env.task, options.sigma, env.goal_tolerance)),
      options_(options) {
  if (options_.plan_density != 0 && env.task == Task::Maze &&
      options_.plan_density != kMazePlanLength) {
    throw std::invalid_argument("PlanMdp: the full-plan maze encoding needs 20 waypoints");
  }
}

TaskSample PlanMdp::sample_task(Rng& rng) {
  for (int attempt = 0; attempt < options_.max_resamples; ++attempt) {
    const ResetResult reset = env_->reset(rng);
    try {
      Plan plan = planner_->plan(reset.state, reset.goal, reset.obstacles, rng);
      if (options_.plan_density != 0 && options_.plan_density != plan.size()) {
        plan = subsample_plan(plan, options_.plan_density);
      }
      return {reset.state, std::move(plan)};
    } catch (const PlanningError&) {
      // Infeasible draw (e.g. maze obstacles closing the passage): resample.
    }
  }
  throw PlanningError("PlanMdp: planner failed on every resampled task");
}

StepResult PlanMdp::shaped_step(std::span<const double> action, const Plan& plan, Rng& rng) {
  const State before = env_->state();
  StepResult out = env_->step(action, rng);
  const Action applied = env_->clamp_action(action);
  out.reward = plan_reward(before.values(), applied, out.state.values(), plan, shaping_);
  return out;
}

}  // namespace l2e

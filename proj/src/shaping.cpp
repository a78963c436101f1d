#include "l2e/shaping.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace l2e {

void ShapingConfig::validate() const {
  if (!(sigma > 0.0)) throw std::invalid_argument("ShapingConfig: sigma must be positive");
  if (distance_mask.empty()) throw std::invalid_argument("ShapingConfig: empty distance mask");
}

ShapingConfig make_shaping_config(Task task, double sigma, double goal_tolerance) {
  ShapingConfig cfg;
  cfg.sigma = sigma;
  cfg.goal_tolerance = goal_tolerance;
  cfg.achieved_offset = achieved_goal_offset(task);
  if (is_pushing(task)) {
    cfg.distance_mask = {0, 1, 2, 3, 4, 5};  // yaw (index 6) excluded
  } else {
    cfg.distance_mask = {0, 1};
  }
  cfg.validate();
  return cfg;
}

double distance(std::span<const double> state, std::span<const double> waypoint,
                const std::vector<std::size_t>& mask) {
  if (waypoint.size() != mask.size()) {
    throw std::invalid_argument("distance: waypoint dimension does not match the mask");
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < mask.size(); ++j) {
    if (mask[j] >= state.size()) throw std::invalid_argument("distance: mask exceeds state");
    const double diff = state[mask[j]] - waypoint[j];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

std::size_t nearest_index(std::span<const double> state, const Plan& plan,
                          const std::vector<std::size_t>& mask) {
  if (plan.empty()) throw std::invalid_argument("nearest_index: empty plan");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const double d = distance(state, plan.waypoint(i), mask);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

double goal_reward(std::span<const double> next_state, Vec2 goal, const ShapingConfig& cfg) {
  const Vec2 achieved{next_state[cfg.achieved_offset], next_state[cfg.achieved_offset + 1]};
  return sparse_reward(achieved, goal, cfg.goal_tolerance);
}

double fv_shaping(std::span<const double> state, std::span<const double> /*action*/,
                  std::span<const double> next_state, const Plan& plan, const ShapingConfig& cfg) {
  const double r_goal = goal_reward(next_state, goal_of(plan), cfg);
  const std::size_t k = nearest_index(state, plan, cfg.distance_mask);
  const double d = distance(state, plan.waypoint(k), cfg.distance_mask);
  const double length = static_cast<double>(plan.size());
  return (1.0 - r_goal) / 2.0 * (static_cast<double>(k) + 1.0) / length *
         std::exp(-(d * d) / (2.0 * cfg.sigma * cfg.sigma));
}

double plan_reward(std::span<const double> state, std::span<const double> action,
                   std::span<const double> next_state, const Plan& plan, const ShapingConfig& cfg) {
  return goal_reward(next_state, goal_of(plan), cfg) +
         fv_shaping(state, action, next_state, plan, cfg);
}

}  // namespace l2e

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "l2e/envs.hpp"
#include "l2e/planners.hpp"

namespace l2e {

/// Parameters of the plan-based shaping reward.
struct ShapingConfig {
  /// Width of the Gaussian proximity term.
  double sigma = 0.5;
  /// State indices compared against waypoint components 0..mask.size()-1.
  /// Orientation components are never part of the mask.
  std::vector<std::size_t> distance_mask;
  /// Index of the planar achieved-goal position inside the state.
  std::size_t achieved_offset = 0;
  double goal_tolerance = 0.1;

  void validate() const;
};

/// Mask over ee and box positions (pushing) or the agent position (maze).
ShapingConfig make_shaping_config(Task task, double sigma, double goal_tolerance);

/// Euclidean distance between the masked state components and a waypoint.
double distance(std::span<const double> state, std::span<const double> waypoint,
                const std::vector<std::size_t>& mask);

/// k(s): index of the nearest waypoint, lowest index on ties.
std::size_t nearest_index(std::span<const double> state, const Plan& plan,
                          const std::vector<std::size_t>& mask);

/// f(p): the goal the plan was generated for.
inline Vec2 goal_of(const Plan& plan) { return plan.goal(); }

/// Environment reward R_G(s, a, s', g), evaluated on the successor state.
double goal_reward(std::span<const double> next_state, Vec2 goal, const ShapingConfig& cfg);

/// Final-volume-preserving shaping term
///   (1 - R_G(s,a,s',f(p))) / 2 * (k(s) + 1) / L * exp(-d(s, p_k(s))^2 / (2 sigma^2)).
/// Proximity and progress are measured at the pre-transition state s.
double fv_shaping(std::span<const double> state, std::span<const double> action,
                  std::span<const double> next_state, const Plan& plan, const ShapingConfig& cfg);

/// Plan-conditioned reward R_P = R_G(s,a,s',f(p)) + F_FV(s,a,s',p).
double plan_reward(std::span<const double> state, std::span<const double> action,
                   std::span<const double> next_state, const Plan& plan, const ShapingConfig& cfg);

}  // namespace l2e

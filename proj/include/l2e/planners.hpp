#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "l2e/envs.hpp"
#include "l2e/geometry.hpp"
#include "l2e/random.hpp"

namespace l2e {

enum class PlannerKind { Manhattan, Rrt };

struct PlanMeta {
  PlannerKind planner = PlannerKind::Manhattan;
  /// Planar box (pushing) or agent (maze) position the plan starts from.
  Vec2 start;
  /// Random intermediate box position of four-contact plans.
  std::optional<Vec2> intermediate;

  bool operator==(const PlanMeta&) const = default;
};

/// Fixed-length sequence of planned waypoints together with the goal the plan
/// leads to. Pushing waypoints are [ee_x, ee_y, ee_z, box_x, box_y, box_z];
/// maze waypoints are [x, y].
class Plan {
 public:
  Plan() = default;
  Plan(Task task, std::size_t dim, std::vector<double> flat, Vec2 goal, PlanMeta meta);

  Task task() const { return task_; }
  std::size_t size() const { return dim_ == 0 ? 0 : flat_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  bool empty() const { return flat_.empty(); }
  std::span<const double> waypoint(std::size_t i) const {
    return std::span<const double>(flat_).subspan(i * dim_, dim_);
  }
  std::span<const double> flat() const { return flat_; }
  Vec2 goal() const { return goal_; }
  const PlanMeta& meta() const { return meta_; }

  /// Planar box/agent position of waypoint i.
  Vec2 achieved(std::size_t i) const;

  std::uint64_t content_hash() const;
  bool operator==(const Plan&) const = default;

 private:
  Task task_ = Task::BasicPushing;
  std::size_t dim_ = 0;
  std::vector<double> flat_;
  Vec2 goal_;
  PlanMeta meta_;
};

class PlanningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kPushingWaypointDim = 6;
inline constexpr std::size_t kBasicPlanLength = 50;
inline constexpr std::size_t kObstaclePlanLength = 100;
inline constexpr std::size_t kMazePlanLength = 20;

std::size_t default_plan_length(Task task);

struct ManhattanOptions {
  std::size_t length = kBasicPlanLength;
  /// Planned end-effector height while repositioning between contacts.
  double lift_height = 0.3;
  /// Rejection budget for the random intermediate of four-contact plans.
  int intermediate_attempts = 1000;
};

/// Crude axis-aligned pushing planner. With two contacts the box is pushed
/// along x and then along y; with four contacts it first travels to a random
/// collision-free intermediate position. Between pushes the end effector lifts,
/// moves behind the next push face and lowers again.
Plan manhattan_plan(const State& start, Vec2 goal, int contacts, const EnvConfig& env,
                    Rng& rng, const ManhattanOptions& options = {});

/// Same as above with the intermediate given explicitly (four contacts).
Plan manhattan_plan_via(const State& start, Vec2 intermediate, Vec2 goal, const EnvConfig& env,
                        const ManhattanOptions& options = {});

/// Whether `intermediate` is an admissible via point for a four-contact plan.
bool valid_intermediate(Vec2 box, Vec2 intermediate, Vec2 goal, const EnvConfig& env);

struct RrtOptions {
  std::size_t length = kMazePlanLength;
  double step = 0.05;
  double goal_bias = 0.1;
  int max_iterations = 5000;
  int shortcut_passes = 50;
  int attempts = 3;
};

/// RRT in the unit square followed by random shortcutting. The returned
/// waypoints include every vertex of the smoothed polyline, so consecutive
/// waypoints are joined by obstacle-free segments.
Plan rrt_plan(Vec2 start, Vec2 goal, const ObstacleSet& obstacles, Rng& rng,
              const RrtOptions& options = {});

/// Keeps n waypoints at indices floor(i * (L - 1) / (n - 1)).
Plan subsample_plan(const Plan& plan, std::size_t n);
std::vector<std::size_t> subsample_indices(std::size_t length, std::size_t n);

/// Resamples a polyline to `count` points equally spaced in arc length, where
/// the arc length is measured over the first `arc_dims` components.
std::vector<double> resample_polyline(std::span<const double> points, std::size_t dim,
                                      std::size_t arc_dims, std::size_t count);

/// Text format: header "L dim goal_x goal_y task planner [ix iy]" followed by
/// one waypoint per line, space separated, printed with round-trip precision.
std::string serialize_plan(const Plan& plan);
Plan parse_plan(std::string_view text);

/// Ω(p | s, g) for one task family.
class Planner {
 public:
  virtual ~Planner() = default;
  virtual Plan plan(const State& start, Vec2 goal, const ObstacleSet& obstacles,
                    Rng& rng) const = 0;
};

std::unique_ptr<Planner> make_planner(const EnvConfig& env);

}  // namespace l2e

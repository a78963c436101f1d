#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "l2e/geometry.hpp"
#include "l2e/random.hpp"

namespace l2e {

enum class Task { BasicPushing, ObstaclePushing, Maze };

std::string_view task_name(Task task);
Task parse_task(std::string_view name);
inline bool is_pushing(Task task) { return task != Task::Maze; }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  Vec2 xy() const { return {x, y}; }
};

/// Flat environment state.
///
/// Pushing layout: [ee_x, ee_y, ee_z, box_x, box_y, box_z, box_yaw]. The box z
/// coordinate is the height of the box center, fixed at 0, so the end effector
/// rests at contact height when ee_z = 0.
/// Maze layout: [agent_x, agent_y].
class State {
 public:
  static constexpr std::size_t kPushingDim = 7;
  static constexpr std::size_t kMazeDim = 2;
  static constexpr std::size_t kYawIndex = 6;

  State() = default;
  explicit State(std::vector<double> values) : values_(std::move(values)) {}

  static State pushing(Vec3 ee, Vec2 box, double yaw) {
    return State({ee.x, ee.y, ee.z, box.x, box.y, 0.0, yaw});
  }
  static State maze(Vec2 agent) { return State({agent.x, agent.y}); }

  std::size_t dim() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& vector() const { return values_; }

  Vec3 ee() const { return {values_[0], values_[1], values_[2]}; }
  Vec2 box() const { return {values_[3], values_[4]}; }
  double yaw() const { return values_[kYawIndex]; }
  Vec2 agent() const { return {values_[0], values_[1]}; }

  bool operator==(const State&) const = default;

 private:
  std::vector<double> values_;
};

using Action = std::vector<double>;

struct EnvConfig {
  Task task = Task::BasicPushing;
  double table_size = 3.0;
  double box_size = 0.4;
  double ee_radius = 0.06;
  double goal_tolerance = 0.1;
  int episode_length = 250;
  /// Per-component velocity cap (pushing) or displacement radius (maze).
  double max_velocity = 0.1;
  /// Bound of the uniform per-component noise added to pushing motion.
  double noise_scale = 0.01;
  /// Bound of the uniform per-component noise added to maze motion.
  double maze_noise = 0.01;
  bool noise = true;
  int maze_obstacles = 3;
  double maze_min_half = 0.05;
  double maze_max_half = 0.15;
  /// Wall in the middle of the obstacle-pushing table.
  Rect pushing_obstacle{{0.0, 0.0}, {0.1, 0.75}};

  void validate() const;
  double half_table() const { return 0.5 * table_size; }
  double box_half() const { return 0.5 * box_size; }
  /// End-effector height band (around the box center height) inside which
  /// the disc touches the box.
  double contact_threshold() const { return 1.5 * ee_radius; }
};

struct BoxPose {
  Vec2 position;
  double yaw = 0.0;
};

/// Quasi-static disc-versus-square pushing. The disc starts at `ee` and moves
/// by `ee_disp`; whenever it penetrates the box footprint the box is displaced
/// along the penetration-resolution direction and rotated by the lever arm of
/// the contact point. Nothing carries over between calls.
BoxPose push_contact(Vec2 ee_disp, Vec2 ee, BoxPose box, double box_half, double ee_radius);

/// 1 iff the achieved planar position is within `tolerance` of the goal.
double sparse_reward(Vec2 achieved, Vec2 goal, double tolerance);

/// Position that goals refer to: the box (pushing) or the agent (maze).
Vec2 achieved_goal(Task task, std::span<const double> state);
std::size_t achieved_goal_offset(Task task);

struct ResetResult {
  State state;
  Vec2 goal;
  ObstacleSet obstacles;
};

struct StepResult {
  State state;
  double reward = 0.0;
  bool done = false;
  bool success = false;
  bool truncated = false;
};

/// Seedable environment. Instances are single-threaded; all randomness comes
/// from the generator passed in.
class Env {
 public:
  explicit Env(EnvConfig config);
  virtual ~Env() = default;

  Task task() const { return config_.task; }
  const EnvConfig& config() const { return config_; }

  virtual std::size_t state_dim() const = 0;
  virtual std::size_t action_dim() const = 0;
  double action_bound() const { return config_.max_velocity; }

  /// Samples initial state, goal and obstacles and makes them current.
  ResetResult reset(Rng& rng);

  /// Dynamics only: clamp, noise, integrate. Uses the current obstacles.
  virtual State transition(const State& state, std::span<const double> action,
                           Rng& rng) const = 0;

  /// Advances the current state by one step.
  StepResult step(std::span<const double> action, Rng& rng);

  /// True for states from which the goal can no longer be reached.
  virtual bool absorbing(const State&) const { return false; }

  virtual Action clamp_action(std::span<const double> action) const = 0;

  double reward(const State& state, Vec2 goal) const;

  const State& state() const { return state_; }
  Vec2 goal() const { return goal_; }
  const ObstacleSet& obstacles() const { return obstacles_; }
  int elapsed() const { return elapsed_; }

  void set_state(State s) { state_ = std::move(s); }
  void set_goal(Vec2 g) { goal_ = g; }
  void set_obstacles(ObstacleSet o) { obstacles_ = std::move(o); }
  void set_elapsed(int t) { elapsed_ = t; }

 protected:
  virtual ResetResult sample_reset(Rng& rng) const = 0;

  EnvConfig config_;
  State state_;
  Vec2 goal_;
  ObstacleSet obstacles_;
  int elapsed_ = 0;
};

/// Box pushing on a square table, with or without the fixed central wall.
class PushingEnv final : public Env {
 public:
  explicit PushingEnv(EnvConfig config);

  std::size_t state_dim() const override { return State::kPushingDim; }
  std::size_t action_dim() const override { return 3; }
  State transition(const State& state, std::span<const double> action,
                   Rng& rng) const override;
  bool absorbing(const State& state) const override;
  Action clamp_action(std::span<const double> action) const override;

  /// Bounds for the end-effector position.
  double ee_xy_limit() const { return config_.half_table() + 0.5; }
  static constexpr double kEeMaxHeight = 0.5;

 protected:
  ResetResult sample_reset(Rng& rng) const override;

 private:
  bool box_blocked(const BoxPose& box) const;
};

/// Point agent in the unit square with per-episode rectangular obstacles.
class MazeEnv final : public Env {
 public:
  explicit MazeEnv(EnvConfig config);

  std::size_t state_dim() const override { return State::kMazeDim; }
  std::size_t action_dim() const override { return 2; }
  State transition(const State& state, std::span<const double> action,
                   Rng& rng) const override;
  Action clamp_action(std::span<const double> action) const override;

  ObstacleSet sample_obstacles(Rng& rng) const;

 protected:
  ResetResult sample_reset(Rng& rng) const override;
};

std::unique_ptr<Env> make_env(const EnvConfig& config);

}  // namespace l2e

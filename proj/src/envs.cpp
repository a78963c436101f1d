#include "l2e/envs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace l2e {

namespace {

constexpr double kContactSubstep = 0.01;
constexpr int kMaxRejections = 10000;

void resolve_penetration(Vec2 disc, BoxPose& box, double half, double radius) {
  const Vec2 local = rotate(disc - box.position, -box.yaw);
  Vec2 normal;
  Vec2 contact;
  double depth = 0.0;
  if (std::abs(local.x) < half && std::abs(local.y) < half) {
    // Disc center inside the footprint: exit through the nearest face.
    const double exit_x = half - std::abs(local.x);
    const double exit_y = half - std::abs(local.y);
    if (exit_x <= exit_y) {
      const double side = local.x < 0.0 ? -1.0 : 1.0;
      normal = {side, 0.0};
      contact = {side * half, local.y};
      depth = exit_x + radius;
    } else {
      const double side = local.y < 0.0 ? -1.0 : 1.0;
      normal = {0.0, side};
      contact = {local.x, side * half};
      depth = exit_y + radius;
    }
  } else {
    contact = {std::clamp(local.x, -half, half), std::clamp(local.y, -half, half)};
    const Vec2 diff = local - contact;
    const double dist = diff.norm();
    if (dist >= radius) return;
    normal = diff * (1.0 / dist);
    depth = radius - dist;
  }
  const Vec2 shift = normal * -depth;
  // Square plate radius of gyration squared: (a^2 + a^2) / 12 with a = 2 * half.
  const double gyration2 = 2.0 * half * half / 3.0;
  const double dyaw = contact.cross(shift) / (contact.dot(contact) + gyration2);
  box.position += rotate(shift, box.yaw);
  box.yaw = std::remainder(box.yaw + dyaw, 2.0 * std::numbers::pi);
}

}  // namespace

std::string_view task_name(Task task) {
  switch (task) {
    case Task::BasicPushing:
      return "pushing";
    case Task::ObstaclePushing:
      return "obstacle";
    case Task::Maze:
      return "maze";
  }
  return "?";
}

Task parse_task(std::string_view name) {
  if (name == "pushing" || name == "basic_pushing") return Task::BasicPushing;
  if (name == "obstacle" || name == "obstacle_pushing") return Task::ObstaclePushing;
  if (name == "maze") return Task::Maze;
  throw std::invalid_argument("unknown environment: " + std::string(name));
}

void EnvConfig::validate() const {
  if (table_size <= 0 || box_size <= 0 || ee_radius <= 0 || goal_tolerance <= 0 ||
      episode_length <= 0 || max_velocity <= 0 || noise_scale < 0 || maze_noise < 0) {
    throw std::invalid_argument("EnvConfig: sizes, tolerances and limits must be positive");
  }
  if (goal_tolerance >= box_size) {
    throw std::invalid_argument("EnvConfig: goal_tolerance must be smaller than box_size");
  }
  if (maze_min_half <= 0 || maze_max_half < maze_min_half || maze_max_half >= 0.5) {
    throw std::invalid_argument("EnvConfig: invalid maze obstacle size range");
  }
}

BoxPose push_contact(Vec2 ee_disp, Vec2 ee, BoxPose box, double box_half, double ee_radius) {
  const int substeps =
      std::max(1, static_cast<int>(std::ceil(ee_disp.norm() / kContactSubstep)));
  for (int i = 1; i <= substeps; ++i) {
    const Vec2 disc = ee + ee_disp * (static_cast<double>(i) / substeps);
    resolve_penetration(disc, box, box_half, ee_radius);
  }
  return box;
}

double sparse_reward(Vec2 achieved, Vec2 goal, double tolerance) {
  return distance(achieved, goal) <= tolerance ? 1.0 : 0.0;
}

std::size_t achieved_goal_offset(Task task) { return is_pushing(task) ? 3 : 0; }

Vec2 achieved_goal(Task task, std::span<const double> state) {
  const std::size_t off = achieved_goal_offset(task);
  return {state[off], state[off + 1]};
}

Env::Env(EnvConfig config) : config_(std::move(config)) { config_.validate(); }

ResetResult Env::reset(Rng& rng) {
  ResetResult r = sample_reset(rng);
  state_ = r.state;
  goal_ = r.goal;
  obstacles_ = r.obstacles;
  elapsed_ = 0;
  return r;
}

double Env::reward(const State& state, Vec2 goal) const {
  if (absorbing(state)) return 0.0;
  return sparse_reward(achieved_goal(task(), state.values()), goal, config_.goal_tolerance);
}

StepResult Env::step(std::span<const double> action, Rng& rng) {
  StepResult out;
  out.state = transition(state_, action, rng);
  ++elapsed_;
  out.reward = reward(out.state, goal_);
  out.success = out.reward == 1.0;
  const bool failed = absorbing(out.state);
  const bool timeout = elapsed_ >= config_.episode_length;
  out.done = out.success || failed || timeout;
  out.truncated = timeout && !out.success && !failed;
  state_ = out.state;
  return out;
}

// --- pushing -------------------------------------------------------------

PushingEnv::PushingEnv(EnvConfig config) : Env(std::move(config)) {
  if (!is_pushing(config_.task)) throw std::invalid_argument("PushingEnv: not a pushing task");
}

Action PushingEnv::clamp_action(std::span<const double> action) const {
  if (action.size() != 3) throw std::invalid_argument("PushingEnv: action must be 3D");
  Action out(3);
  for (std::size_t i = 0; i < 3; ++i) {
    const double a = std::isfinite(action[i]) ? action[i] : 0.0;
    out[i] = std::clamp(a, -config_.max_velocity, config_.max_velocity);
  }
  return out;
}

bool PushingEnv::absorbing(const State& state) const {
  const Vec2 box = state.box();
  const double h = config_.half_table();
  return std::abs(box.x) > h || std::abs(box.y) > h;
}

bool PushingEnv::box_blocked(const BoxPose& box) const {
  if (config_.task != Task::ObstaclePushing) return false;
  return square_overlaps_rect(box.position, config_.box_half(), box.yaw, config_.pushing_obstacle);
}

State PushingEnv::transition(const State& state, std::span<const double> action,
                             Rng& rng) const {
  const Action a = clamp_action(action);
  Vec3 motion{a[0], a[1], a[2]};
  if (config_.noise && config_.noise_scale > 0) {
    motion.x += uniform(rng, -config_.noise_scale, config_.noise_scale);
    motion.y += uniform(rng, -config_.noise_scale, config_.noise_scale);
    motion.z += uniform(rng, -config_.noise_scale, config_.noise_scale);
  }
  const Vec3 ee = state.ee();
  const double lim = ee_xy_limit();
  const Vec3 moved{std::clamp(ee.x + motion.x, -lim, lim), std::clamp(ee.y + motion.y, -lim, lim),
                   std::clamp(ee.z + motion.z, 0.0, kEeMaxHeight)};

  BoxPose box{state.box(), state.yaw()};
  if (!absorbing(state) && std::abs(moved.z - state[5]) < config_.contact_threshold()) {
    const BoxPose pushed =
        push_contact(moved.xy() - ee.xy(), ee.xy(), box, config_.box_half(), config_.ee_radius);
    if (box_blocked(pushed)) return state;
    box = pushed;
  }
  return State::pushing(moved, box.position, box.yaw);
}

ResetResult PushingEnv::sample_reset(Rng& rng) const {
  const double lim = config_.half_table() - config_.box_half();
  const double h = config_.box_half();
  const Vec3 ee{0.0, 0.0, 0.0};
  ObstacleSet obstacles;
  if (config_.task == Task::ObstaclePushing) obstacles.push_back(config_.pushing_obstacle);

  auto box_free = [&](Vec2 p) {
    return std::none_of(obstacles.begin(), obstacles.end(),
                        [&](const Rect& r) { return square_overlaps_rect(p, h, 0.0, r); });
  };

  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    const Vec2 box{uniform(rng, -lim, lim), uniform(rng, -lim, lim)};
    if (disc_overlaps_square(ee.xy(), config_.ee_radius, box, h, 0.0) || !box_free(box)) continue;
    for (int g = 0; g < kMaxRejections; ++g) {
      const Vec2 goal{uniform(rng, -lim, lim), uniform(rng, -lim, lim)};
      if (!box_free(goal) || distance(goal, box) <= config_.goal_tolerance) continue;
      return {State::pushing(ee, box, 0.0), goal, obstacles};
    }
  }
  throw std::runtime_error("PushingEnv: could not sample a non-colliding reset");
}

// --- maze ----------------------------------------------------------------

MazeEnv::MazeEnv(EnvConfig config) : Env(std::move(config)) {
  if (config_.task != Task::Maze) throw std::invalid_argument("MazeEnv: not a maze task");
}

Action MazeEnv::clamp_action(std::span<const double> action) const {
  if (action.size() != 2) throw std::invalid_argument("MazeEnv: action must be 2D");
  Vec2 a{std::isfinite(action[0]) ? action[0] : 0.0, std::isfinite(action[1]) ? action[1] : 0.0};
  const double n = a.norm();
  if (n > config_.max_velocity) a = a * (config_.max_velocity / n);
  return {a.x, a.y};
}

State MazeEnv::transition(const State& state, std::span<const double> action, Rng& rng) const {
  const Action a = clamp_action(action);
  Vec2 motion{a[0], a[1]};
  if (config_.noise && config_.maze_noise > 0) {
    motion.x += uniform(rng, -config_.maze_noise, config_.maze_noise);
    motion.y += uniform(rng, -config_.maze_noise, config_.maze_noise);
  }
  const Vec2 from = state.agent();
  const Vec2 to = from + motion;
  if (to.x < 0.0 || to.x > 1.0 || to.y < 0.0 || to.y > 1.0) return state;
  if (segment_intersects_any(from, to, obstacles_)) return state;
  return State::maze(to);
}

ObstacleSet MazeEnv::sample_obstacles(Rng& rng) const {
  ObstacleSet out;
  for (int i = 0; i < config_.maze_obstacles; ++i) {
    const Vec2 half{uniform(rng, config_.maze_min_half, config_.maze_max_half),
                    uniform(rng, config_.maze_min_half, config_.maze_max_half)};
    const Vec2 center{uniform(rng, half.x, 1.0 - half.x), uniform(rng, half.y, 1.0 - half.y)};
    out.push_back({center, half});
  }
  return out;
}

ResetResult MazeEnv::sample_reset(Rng& rng) const {
  constexpr int kPointAttempts = 1000;
  for (int world = 0; world < 100; ++world) {
    ObstacleSet obstacles = sample_obstacles(rng);
    auto free_point = [&]() -> std::optional<Vec2> {
      for (int i = 0; i < kPointAttempts; ++i) {
        const Vec2 p{uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 1.0)};
        if (!inside_any(p, obstacles)) return p;
      }
      return std::nullopt;
    };
    for (int attempt = 0; attempt < kPointAttempts; ++attempt) {
      const auto agent = free_point();
      const auto goal = free_point();
      if (!agent || !goal) break;  // degenerate draw: resample the obstacles
      if (distance(*agent, *goal) <= config_.goal_tolerance) continue;
      return {State::maze(*agent), *goal, std::move(obstacles)};
    }
  }
  throw std::runtime_error("MazeEnv: could not sample a free start and goal");
}

std::unique_ptr<Env> make_env(const EnvConfig& config) {
  if (config.task == Task::Maze) return std::make_unique<MazeEnv>(config);
  return std::make_unique<PushingEnv>(config);
}

}  // namespace l2e

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "l2e/envs.hpp"
#include "l2e/mlp.hpp"
#include "l2e/planners.hpp"
#include "l2e/sac.hpp"
#include "l2e/shaping.hpp"

namespace l2e {

struct RolloutResult {
  bool success = false;
  int steps = 0;
  std::vector<State> states;  // visited states including the initial one
  std::vector<Action> actions;
};

/// Open-loop tracking: at each step find the nearest waypoint k (full masked
/// distance) and command the end-effector displacement p_{k+1} - p_k, or zero
/// at the last waypoint. Starts from the environment's current state.
RolloutResult direct_execute(const Plan& plan, Env& env, const ShapingConfig& shaping, Rng& rng);

/// Action that direct_execute issues in `state`.
Action direct_action(const Plan& plan, const State& state, const Env& env, const ShapingConfig& shaping);

struct ImDataset {
  std::size_t state_dim = 0;
  std::size_t action_dim = 0;
  std::vector<double> states;
  std::vector<double> next_states;
  std::vector<double> actions;
  std::vector<std::uint8_t> box_directed;

  std::size_t size() const { return box_directed.size(); }
};

/// Random-action rollouts of full episodes on a pushing environment; each step
/// is replaced by a full-speed move of the end effector toward the box with
/// probability `box_fraction`.
ImDataset collect_im_data(Env& env, int episodes, Rng& rng, double box_fraction = 0.1);

/// Full-speed end-effector move toward the box center at contact height.
Action toward_box_action(const State& state, const Env& env);

struct InverseModelConfig {
  std::vector<int> hidden{256, 128, 64};
  double lr = 1e-3;
  std::size_t batch_size = 256;
  int max_epochs = 100;
  /// Stop when the validation error has not improved for this many epochs.
  int patience = 5;
  double validation_fraction = 0.1;

  void validate() const;
};

/// phi(s, s_desired) -> a, an MLP over normalized inputs with a tanh output
/// scaled to the action bound, fitted by mean squared error.
class InverseModel {
 public:
  InverseModel(std::size_t state_dim, std::size_t action_dim, double action_bound,
               InverseModelConfig config, Rng& init_rng);

  /// Returns the validation MSE after each epoch.
  std::vector<double> fit(const ImDataset& data, Rng& rng);

  Action predict(std::span<const double> state, std::span<const double> desired) const;

  /// Mean squared error (normalized action units) on the given rows.
  double mse(const ImDataset& data, const std::vector<std::size_t>& rows) const;

  bool trained() const { return trained_; }
  const Mlp& net() const { return net_; }

  void save(const std::filesystem::path& path) const;
  static InverseModel load(const std::filesystem::path& path);

 private:
  InverseModel(std::size_t state_dim, std::size_t action_dim, double action_bound, InverseModelConfig config);
  Eigen::MatrixXd inputs(const ImDataset& data, const std::vector<std::size_t>& rows) const;
  Eigen::MatrixXd targets(const ImDataset& data, const std::vector<std::size_t>& rows) const;

  std::size_t state_dim_;
  std::size_t action_dim_;
  double action_bound_;
  InverseModelConfig config_;
  Mlp net_;
  Eigen::VectorXd in_mean_;
  Eigen::VectorXd in_std_;
  bool trained_ = false;
};

/// Desired state for waypoint i: its ee and box position with yaw 0.
std::vector<double> desired_state(const Plan& plan, std::size_t i);

/// As direct_execute, with the action phi(s, p_{k+1}) (zero at the last waypoint).
RolloutResult im_execute(const Plan& plan, const InverseModel& model, Env& env,
                         const ShapingConfig& shaping, Rng& rng);

/// Subgoal selection along a plan's planar box (or agent) path. The subgoal is
/// the first waypoint at least `lookahead` of path length ahead of the current
/// position's projection; it advances once reached within `tolerance`, never
/// moves backward, and becomes the plan goal near the end of the plan.
class SubgoalTracker {
 public:
  explicit SubgoalTracker(const Plan& plan, double lookahead = 0.3, double tolerance = 0.1);

  /// Updates with the current planar position and returns the active subgoal.
  Vec2 update(Vec2 position);

  Vec2 subgoal() const { return subgoal_; }
  /// Plan index of the subgoal; size() once the plan goal is active.
  std::size_t index() const { return index_; }
  bool at_goal() const { return index_ == points_.size(); }

 private:
  std::size_t projection(Vec2 position) const;
  void select_from(std::size_t base);

  std::vector<Vec2> points_;
  std::vector<double> arc_;
  Vec2 goal_;
  double lookahead_;
  double tolerance_;
  std::size_t index_ = 0;
  Vec2 subgoal_;
};

/// Conditions the goal-conditioned agent on the tracker's subgoal.
Action subgoal_policy_step(SubgoalTracker& tracker, const State& state, Task task, const Sac& agent,
                           bool deterministic, Rng& rng);

}  // namespace l2e

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "l2e/batch.hpp"
#include "l2e/envs.hpp"
#include "l2e/mlp.hpp"
#include "l2e/random.hpp"

namespace l2e {

struct LearnerConfig {
  std::vector<int> hidden{256, 161, 101, 64};
  double lr = 3e-4;
  std::size_t batch_size = 256;
  double gamma = 0.99;
  double polyak = 0.005;
  /// Defaults to -dim(A) when unset.
  std::optional<double> entropy_target;
  double init_alpha = 1.0;
  bool learn_alpha = true;
  double log_std_min = -20.0;
  double log_std_max = 2.0;

  void validate() const;
};

class NonFiniteLoss : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SacLosses {
  double critic1 = 0.0;
  double critic2 = 0.0;
  double actor = 0.0;
  double temperature = 0.0;
  double alpha = 0.0;
};

/// Standard-normal draws consumed by one update: for the next-state actions of
/// the critic target and for the reparameterized actions of the actor step.
struct SacNoise {
  Eigen::MatrixXd next;
  Eigen::MatrixXd current;
};

/// Reparameterized tanh-Gaussian sample in normalized action units [-1, 1].
struct PolicySample {
  Eigen::MatrixXd mean;
  Eigen::MatrixXd log_std;  // after clamping
  Eigen::MatrixXd u;        // pre-squash sample
  Eigen::MatrixXd action;   // tanh(u)
  Eigen::RowVectorXd log_prob;
  Eigen::MatrixXd clamp_pass;  // 1 where the log-std clamp is inactive
  Mlp::Cache cache;
};

/// Soft actor-critic with twin critics, target critics and a learned entropy
/// temperature. Inputs are (state ‖ conditioning) columns; critics see the
/// action appended in normalized units.
class Sac {
 public:
  Sac(std::size_t obs_dim, std::size_t action_dim, double action_bound, LearnerConfig config,
      Rng& init_rng);

  /// Squashed sample (or squashed mean) scaled to the action bound.
  Action act(std::span<const double> obs, bool deterministic, Rng& rng) const;

  SacLosses update(const Batch& batch, Rng& rng);
  SacLosses update(const Batch& batch, const SacNoise& noise);

  /// Loss heads with pre-drawn noise. Gradient pointers may be null; when given
  /// they are overwritten.
  std::pair<double, double> critic_loss(const Batch& batch, const Eigen::MatrixXd& next_noise,
                                        Eigen::VectorXd* grad1, Eigen::VectorXd* grad2) const;
  double actor_loss(const Batch& batch, const Eigen::MatrixXd& noise, Eigen::VectorXd* grad,
                    double* mean_log_prob = nullptr) const;
  /// -log_alpha * mean(log_prob + target); gradient with respect to log_alpha.
  double temperature_loss(const Batch& batch, const Eigen::MatrixXd& noise, double* grad) const;

  PolicySample sample_policy(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& noise) const;
  /// min(Q1, Q2) of the live or target critics on normalized actions.
  Eigen::RowVectorXd min_q(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& action,
                           bool target) const;
  Eigen::MatrixXd critic_input(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& action) const;

  void polyak_update();

  double alpha() const;
  double entropy_target() const { return entropy_target_; }
  double& log_alpha() { return log_alpha_; }
  double log_alpha() const { return log_alpha_; }

  Mlp& actor() { return actor_; }
  Mlp& critic1() { return q1_; }
  Mlp& critic2() { return q2_; }
  Mlp& target1() { return q1_target_; }
  Mlp& target2() { return q2_target_; }
  const Mlp& actor() const { return actor_; }
  const Mlp& critic1() const { return q1_; }
  const Mlp& critic2() const { return q2_; }
  const Mlp& target1() const { return q1_target_; }
  const Mlp& target2() const { return q2_target_; }

  std::size_t obs_dim() const { return obs_dim_; }
  std::size_t action_dim() const { return action_dim_; }
  double action_bound() const { return action_bound_; }
  const LearnerConfig& config() const { return config_; }
  std::int64_t updates() const { return updates_; }

  /// Parameter file: architecture metadata, the five networks, log_alpha and
  /// the optimizer moments. `extra` is stored as additional metadata.
  void save(const std::filesystem::path& path,
            const std::map<std::string, std::string>& extra = {}) const;
  static Sac load(const std::filesystem::path& path);

 private:
  Sac(std::size_t obs_dim, std::size_t action_dim, double action_bound, LearnerConfig config);
  Eigen::MatrixXd normalized_actions(const Batch& batch) const;

  std::size_t obs_dim_;
  std::size_t action_dim_;
  double action_bound_;
  LearnerConfig config_;
  double entropy_target_;

  Mlp actor_;
  Mlp q1_, q2_, q1_target_, q2_target_;
  double log_alpha_;
  Adam actor_opt_, q1_opt_, q2_opt_, alpha_opt_;
  std::int64_t updates_ = 0;
};

std::vector<int> layer_sizes(int input, const std::vector<int>& hidden, int output);

}  // namespace l2e

#pragma once

#include <Eigen/Dense>

namespace l2e {

/// Minibatch in column layout: one sample per column.
struct Batch {
  Eigen::MatrixXd obs;       // (state ‖ conditioning) x B
  Eigen::MatrixXd actions;   // action_dim x B, environment units
  Eigen::RowVectorXd rewards;
  Eigen::MatrixXd next_obs;
  Eigen::RowVectorXd terminal;  // 1 where the successor must not be bootstrapped

  Eigen::Index size() const { return obs.cols(); }
};

}  // namespace l2e

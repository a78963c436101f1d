#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "l2e/random.hpp"

namespace l2e {

/// Fully connected network with ReLU hidden layers and a linear output.
/// Samples are columns. All weights and biases live in one flat vector, layer
/// by layer, each layer as its column-major weight matrix followed by its bias.
class Mlp {
 public:
  struct Cache {
    std::vector<Eigen::MatrixXd> activations;  // [0] is the input, then each layer's output
  };

  Mlp() = default;
  /// sizes = {input, hidden..., output}; at least input and output.
  explicit Mlp(std::vector<int> sizes);

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
  void init(Rng& rng);

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Cache& cache) const;

  /// Reverse pass for the contraction <upstream, output>. Adds parameter
  /// gradients to *grad when grad is non-null and returns the input gradient.
  Eigen::MatrixXd backward(const Cache& cache, const Eigen::MatrixXd& upstream,
                           Eigen::VectorXd* grad) const;

  /// Signs of every hidden pre-activation, for detecting ReLU kinks.
  std::vector<std::uint8_t> activation_pattern(const Eigen::MatrixXd& x) const;

  const std::vector<int>& sizes() const { return sizes_; }
  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  std::size_t layers() const { return sizes_.size() - 1; }
  Eigen::Index num_params() const { return params_.size(); }

  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }

 private:
  Eigen::Map<const Eigen::MatrixXd> weight(std::size_t l) const;
  Eigen::Map<const Eigen::VectorXd> bias(std::size_t l) const;

  std::vector<int> sizes_;
  std::vector<Eigen::Index> offsets_;  // start of layer l's weights
  Eigen::VectorXd params_;
};

/// Adaptive moment estimation over a flat parameter vector.
struct Adam {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::int64_t t = 0;

  Adam() = default;
  Adam(Eigen::Index n, double lr);
  /// params -= lr * mhat / (sqrt(vhat) + eps)
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);
};

}  // namespace l2e

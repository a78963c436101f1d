#include "l2e/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace l2e {

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("Mlp: need input and output sizes");
  for (int s : sizes_) {
    if (s <= 0) throw std::invalid_argument("Mlp: layer sizes must be positive");
  }
  Eigen::Index total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(total);
    total += static_cast<Eigen::Index>(sizes_[l + 1]) * (sizes_[l] + 1);
  }
  params_ = Eigen::VectorXd::Zero(total);
}

void Mlp::init(Rng& rng) {
  for (std::size_t l = 0; l < layers(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
    const Eigen::Index n = static_cast<Eigen::Index>(sizes_[l + 1]) * (sizes_[l] + 1);
    for (Eigen::Index i = 0; i < n; ++i) params_[offsets_[l] + i] = uniform(rng, -bound, bound);
  }
}

Eigen::Map<const Eigen::MatrixXd> Mlp::weight(std::size_t l) const {
  return {params_.data() + offsets_[l], sizes_[l + 1], sizes_[l]};
}

Eigen::Map<const Eigen::VectorXd> Mlp::bias(std::size_t l) const {
  return {params_.data() + offsets_[l] + static_cast<Eigen::Index>(sizes_[l + 1]) * sizes_[l],
          sizes_[l + 1]};
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const {
  Cache cache;
  return forward(x, cache);
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Cache& cache) const {
  if (x.rows() != input_dim()) throw std::invalid_argument("Mlp::forward: input dimension mismatch");
  cache.activations.resize(layers() + 1);
  cache.activations[0] = x;
  for (std::size_t l = 0; l < layers(); ++l) {
    Eigen::MatrixXd z = weight(l) * cache.activations[l];
    z.colwise() += bias(l);
    if (l + 1 < layers()) z = z.cwiseMax(0.0);
    cache.activations[l + 1] = std::move(z);
  }
  return cache.activations.back();
}

Eigen::MatrixXd Mlp::backward(const Cache& cache, const Eigen::MatrixXd& upstream,
                              Eigen::VectorXd* grad) const {
  if (cache.activations.size() != layers() + 1 || upstream.rows() != output_dim() ||
      upstream.cols() != cache.activations.back().cols()) {
    throw std::invalid_argument("Mlp::backward: shape mismatch");
  }
  if (grad && grad->size() != num_params()) throw std::invalid_argument("Mlp::backward: bad gradient size");
  Eigen::MatrixXd delta = upstream;
  for (std::size_t l = layers(); l-- > 0;) {
    if (l + 1 < layers()) {
      // ReLU: pass gradient where the output was positive.
      delta = delta.cwiseProduct((cache.activations[l + 1].array() > 0.0).cast<double>().matrix());
    }
    if (grad) {
      const int out = sizes_[l + 1];
      const int in = sizes_[l];
      Eigen::Map<Eigen::MatrixXd> gw(grad->data() + offsets_[l], out, in);
      Eigen::Map<Eigen::VectorXd> gb(grad->data() + offsets_[l] + static_cast<Eigen::Index>(out) * in, out);
      gw.noalias() += delta * cache.activations[l].transpose();
      gb += delta.rowwise().sum();
    }
    delta = weight(l).transpose() * delta;
  }
  return delta;
}

std::vector<std::uint8_t> Mlp::activation_pattern(const Eigen::MatrixXd& x) const {
  Cache cache;
  forward(x, cache);
  std::vector<std::uint8_t> out;
  for (std::size_t l = 1; l < layers(); ++l) {
    const auto& a = cache.activations[l];
    for (Eigen::Index i = 0; i < a.size(); ++i) out.push_back(a.data()[i] > 0.0);
  }
  return out;
}

Adam::Adam(Eigen::Index n, double lr_)
    : lr(lr_), m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (grad.size() != params.size() || m.size() != params.size()) {
    throw std::invalid_argument("Adam::step: size mismatch");
  }
  ++t;
  m = beta1 * m + (1.0 - beta1) * grad;
  v = beta2 * v + (1.0 - beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  params.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
}

}  // namespace l2e

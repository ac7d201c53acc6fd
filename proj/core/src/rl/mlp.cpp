#include "archie/rl/mlp.hpp"

#include <cmath>

#include "archie/common/error.hpp"

namespace archie::rl {

Mlp::Mlp(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.size() < 2) throw Error(ErrorCode::kShapeMismatch, "an Mlp needs at least two dims");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    if (dims_[l] < 1 || dims_[l + 1] < 1) throw Error(ErrorCode::kShapeMismatch, "Mlp dims must be >= 1");
    offsets_.push_back(total);
    total += static_cast<std::size_t>(dims_[l + 1]) * static_cast<std::size_t>(dims_[l] + 1);
  }
  params_.assign(total, 0.0);
}

void Mlp::init(Rng& rng) {
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(dims_[l]));
    auto w = weight(l);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-bound, bound);
    auto b = bias(l);
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = rng.uniform(-bound, bound);
  }
}

Eigen::Map<Matrix> Mlp::weight(std::size_t l) {
  return {params_.data() + offsets_[l], dims_[l + 1], dims_[l]};
}

Eigen::Map<const Matrix> Mlp::weight(std::size_t l) const {
  return {params_.data() + offsets_[l], dims_[l + 1], dims_[l]};
}

Eigen::Map<RowVector> Mlp::bias(std::size_t l) {
  return {params_.data() + offsets_[l] + static_cast<std::size_t>(dims_[l + 1] * dims_[l]), dims_[l + 1]};
}

Eigen::Map<const RowVector> Mlp::bias(std::size_t l) const {
  return {params_.data() + offsets_[l] + static_cast<std::size_t>(dims_[l + 1] * dims_[l]), dims_[l + 1]};
}

void Mlp::forward(const Matrix& x, Cache& cache) const {
  if (x.cols() != input_dim()) {
    throw Error(ErrorCode::kShapeMismatch, "Mlp input has " + std::to_string(x.cols()) +
                                               " columns, expected " + std::to_string(input_dim()));
  }
  cache.acts.resize(dims_.size());
  cache.acts[0] = x;
  for (std::size_t l = 0; l < num_layers(); ++l) {
    Matrix& out = cache.acts[l + 1];
    out.resize(x.rows(), dims_[l + 1]);
    out.noalias() = cache.acts[l] * weight(l).transpose();
    out.rowwise() += bias(l);
    if (l + 1 < num_layers()) out = out.cwiseMax(0.0);
  }
}

Matrix Mlp::forward(const Matrix& x) const {
  Cache cache;
  forward(x, cache);
  return std::move(cache.acts.back());
}

Matrix Mlp::backward(const Cache& cache, const Matrix& dy, std::span<double> grad) const {
  if (dy.cols() != output_dim() || dy.rows() != cache.output().rows()) {
    throw Error(ErrorCode::kShapeMismatch, "Mlp upstream gradient shape mismatch");
  }
  if (!grad.empty() && grad.size() != params_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "Mlp gradient buffer has the wrong size");
  }
  Matrix delta = dy;
  for (std::size_t l = num_layers(); l-- > 0;) {
    if (l + 1 < num_layers()) {
      // Post-ReLU activation is > 0 exactly where the pre-activation is.
      delta = (cache.acts[l + 1].array() > 0.0).select(delta, 0.0);
    }
    if (!grad.empty()) {
      const auto n = static_cast<std::size_t>(dims_[l + 1] * dims_[l]);
      Eigen::Map<Matrix> gw(grad.data() + offsets_[l], dims_[l + 1], dims_[l]);
      Eigen::Map<RowVector> gb(grad.data() + offsets_[l] + n, dims_[l + 1]);
      // Products and reductions go through aligned temporaries: evaluated
      // straight into the caller's buffer, their rounding depends on its address.
      const Matrix dw = delta.transpose() * cache.acts[l];
      const RowVector db = delta.colwise().sum();
      gw += dw;
      gb += db;
    }
    Matrix prev = delta * weight(l);
    delta.swap(prev);
  }
  return delta;
}

void soft_update(Mlp& target, const Mlp& online, double tau) {
  if (target.dims() != online.dims()) throw Error(ErrorCode::kShapeMismatch, "soft_update shape mismatch");
  auto t = target.params();
  auto o = online.params();
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = tau * o[i] + (1.0 - tau) * t[i];
}

}  // namespace archie::rl

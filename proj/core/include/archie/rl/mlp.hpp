#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "archie/common/rng.hpp"

namespace archie::rl {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

// Fully connected network with ReLU hidden layers and a linear output layer.
// Parameters live in one flat buffer laid out per layer as W (out x in,
// row-major) followed by b (out). Rows of the input matrix are samples.
class Mlp {
 public:
  static constexpr int kActivationRelu = 1;

  Mlp() = default;
  // Zero-initialised; throws Error(kShapeMismatch) if fewer than two dims or
  // any dim < 1.
  explicit Mlp(std::vector<int> dims);

  // W and b drawn from U(-1/sqrt(in), 1/sqrt(in)).
  void init(Rng& rng);

  const std::vector<int>& dims() const { return dims_; }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }
  std::size_t num_layers() const { return dims_.size() - 1; }
  std::size_t num_params() const { return params_.size(); }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  Eigen::Map<Matrix> weight(std::size_t layer);
  Eigen::Map<const Matrix> weight(std::size_t layer) const;
  Eigen::Map<RowVector> bias(std::size_t layer);
  Eigen::Map<const RowVector> bias(std::size_t layer) const;

  // acts[0] is the input, acts[l] the output of layer l (after ReLU for
  // hidden layers). Reusing a cache across calls avoids reallocation.
  struct Cache {
    std::vector<Matrix> acts;
    const Matrix& output() const { return acts.back(); }
  };

  void forward(const Matrix& x, Cache& cache) const;
  Matrix forward(const Matrix& x) const;

  // Backpropagates dL/dy through the cached pass. Adds dL/dparams into `grad`
  // (skipped when empty) and returns dL/dx. ReLU's derivative at exactly 0 is 0.
  Matrix backward(const Cache& cache, const Matrix& dy, std::span<double> grad) const;

  friend bool operator==(const Mlp& a, const Mlp& b) {
    return a.dims_ == b.dims_ && a.params_ == b.params_;
  }

 private:
  std::vector<int> dims_;
  // Aligned to Eigen's packet size: small products vectorise with an
  // alignment-dependent peel, so malloc placement would change rounding.
  std::vector<double, Eigen::aligned_allocator<double>> params_;
  std::vector<std::size_t> offsets_;  // start of W for each layer
};

// target <- tau * online + (1 - tau) * target, per parameter.
void soft_update(Mlp& target, const Mlp& online, double tau);

}  // namespace archie::rl

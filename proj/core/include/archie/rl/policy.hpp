#pragma once

#include <span>
#include <utility>
#include <vector>

#include "archie/common/rng.hpp"
#include "archie/rl/mlp.hpp"

namespace archie::rl {

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

// log(1 - tanh(u)^2) computed without cancellation.
double log1m_tanh_sq(double u);

// Diagonal Gaussian squashed by tanh. The trunk emits [mean | log_std] per
// action dim; log_std is hard-clamped to [kLogStdMin, kLogStdMax]. Actions lie
// in (-1, 1) and are rescaled by the environment.
class GaussianPolicy {
 public:
  GaussianPolicy() = default;
  GaussianPolicy(int obs_dim, int act_dim, const std::vector<int>& hidden);

  Mlp& net() { return net_; }
  const Mlp& net() const { return net_; }
  int obs_dim() const { return net_.input_dim(); }
  int act_dim() const { return net_.output_dim() / 2; }

  // Everything a reparameterised sample needs for backpropagation.
  struct Sample {
    Mlp::Cache cache;
    Matrix raw_log_std;
    Matrix mean;
    Matrix std;
    Matrix noise;
    Matrix pre_tanh;
    Matrix action;
    Vector log_prob;
  };

  // a = tanh(mean + std * noise), noise supplied by the caller (rows = batch).
  void sample(const Matrix& obs, const Matrix& noise, Sample& out) const;

  // Given dL/da and dL/dlog_prob for a sample (noise held fixed), adds
  // dL/dparams into `grad`.
  void backward(const Sample& s, const Matrix& d_action, const Vector& d_log_prob,
                std::span<double> grad) const;

  Matrix mean_action(const Matrix& obs) const;

  // Single-observation helpers.
  std::pair<std::vector<double>, double> sample_action(std::span<const double> obs, Rng& rng) const;
  std::vector<double> mean_action(std::span<const double> obs) const;
  // Squashed density evaluated at an action in (-1, 1).
  double log_prob(std::span<const double> obs, std::span<const double> action) const;

  friend bool operator==(const GaussianPolicy&, const GaussianPolicy&) = default;

 private:
  Mlp net_;
};

}  // namespace archie::rl

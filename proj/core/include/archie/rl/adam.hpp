#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace archie::rl {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  friend bool operator==(const AdamConfig&, const AdamConfig&) = default;
};

// Bias-corrected adaptive moment estimation. State is public so checkpoints
// can serialise it.
class Adam {
 public:
  Adam() = default;
  Adam(std::size_t n, AdamConfig config) : config_(config), m_(n, 0.0), v_(n, 0.0) {}

  // params -= lr * m_hat / (sqrt(v_hat) + eps)
  void step(std::span<double> params, std::span<const double> grad);

  const AdamConfig& config() const { return config_; }
  std::vector<double>& m() { return m_; }
  std::vector<double>& v() { return v_; }
  const std::vector<double>& m() const { return m_; }
  const std::vector<double>& v() const { return v_; }
  std::int64_t steps() const { return t_; }
  void set_steps(std::int64_t t) { t_ = t; }

  friend bool operator==(const Adam&, const Adam&) = default;

 private:
  AdamConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::int64_t t_ = 0;
};

}  // namespace archie::rl

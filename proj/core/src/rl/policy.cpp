#include "archie/rl/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "archie/common/error.hpp"

namespace archie::rl {
namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// Largest double strictly below 1; tanh rounds to +-1 for |u| > ~19.
const double kActionLimit = std::nextafter(1.0, 0.0);

std::vector<int> policy_dims(int obs_dim, int act_dim, const std::vector<int>& hidden) {
  std::vector<int> dims{obs_dim};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(2 * act_dim);
  return dims;
}

Matrix row_matrix(std::span<const double> v) {
  Matrix m(1, static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = v[i];
  return m;
}

}  // namespace

double log1m_tanh_sq(double u) { return 2.0 * (std::numbers::ln2 - u - softplus(-2.0 * u)); }

GaussianPolicy::GaussianPolicy(int obs_dim, int act_dim, const std::vector<int>& hidden)
    : net_(policy_dims(obs_dim, act_dim, hidden)) {}

void GaussianPolicy::sample(const Matrix& obs, const Matrix& noise, Sample& s) const {
  const int a = act_dim();
  net_.forward(obs, s.cache);
  const Matrix& out = s.cache.output();
  if (noise.rows() != obs.rows() || noise.cols() != a) {
    throw Error(ErrorCode::kShapeMismatch, "policy noise shape mismatch");
  }
  s.mean = out.leftCols(a);
  s.raw_log_std = out.rightCols(a);
  const Matrix log_std = s.raw_log_std.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  s.std = log_std.array().exp().matrix();
  s.noise = noise;
  s.pre_tanh = s.mean + s.std.cwiseProduct(noise);
  s.action = s.pre_tanh.array().tanh().matrix();
  s.log_prob.resize(obs.rows());
  for (Eigen::Index i = 0; i < obs.rows(); ++i) {
    double lp = 0.0;
    for (Eigen::Index j = 0; j < a; ++j) {
      const double e = noise(i, j);
      lp += -0.5 * e * e - log_std(i, j) - kHalfLog2Pi - log1m_tanh_sq(s.pre_tanh(i, j));
    }
    s.log_prob[i] = lp;
  }
}

void GaussianPolicy::backward(const Sample& s, const Matrix& d_action, const Vector& d_log_prob,
                              std::span<double> grad) const {
  const int a = act_dim();
  const Eigen::Index n = s.action.rows();
  Matrix dy(n, 2 * a);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < a; ++j) {
      const double act = s.action(i, j);
      // d log_prob / du = 2 tanh(u); d a / du = 1 - a^2.
      const double du = d_action(i, j) * (1.0 - act * act) + d_log_prob[i] * 2.0 * act;
      dy(i, j) = du;
      const double raw = s.raw_log_std(i, j);
      const bool inside = raw >= kLogStdMin && raw <= kLogStdMax;
      dy(i, a + j) = inside ? du * s.std(i, j) * s.noise(i, j) - d_log_prob[i] : 0.0;
    }
  }
  net_.backward(s.cache, dy, grad);
}

Matrix GaussianPolicy::mean_action(const Matrix& obs) const {
  const Matrix out = net_.forward(obs);
  return out.leftCols(act_dim()).array().tanh().matrix();
}

std::pair<std::vector<double>, double> GaussianPolicy::sample_action(std::span<const double> obs,
                                                                      Rng& rng) const {
  Matrix noise(1, act_dim());
  for (Eigen::Index j = 0; j < noise.cols(); ++j) noise(0, j) = rng.normal();
  Sample s;
  sample(row_matrix(obs), noise, s);
  std::vector<double> action(static_cast<std::size_t>(act_dim()));
  for (std::size_t j = 0; j < action.size(); ++j) {
    action[j] = std::clamp(s.action(0, static_cast<Eigen::Index>(j)), -kActionLimit, kActionLimit);
  }
  return {std::move(action), s.log_prob[0]};
}

std::vector<double> GaussianPolicy::mean_action(std::span<const double> obs) const {
  const Matrix m = mean_action(row_matrix(obs));
  std::vector<double> action(m.data(), m.data() + m.size());
  for (double& v : action) v = std::clamp(v, -kActionLimit, kActionLimit);
  return action;
}

double GaussianPolicy::log_prob(std::span<const double> obs, std::span<const double> action) const {
  const int a = act_dim();
  if (static_cast<int>(action.size()) != a) throw Error(ErrorCode::kShapeMismatch, "action size mismatch");
  const Matrix out = net_.forward(row_matrix(obs));
  double lp = 0.0;
  for (int j = 0; j < a; ++j) {
    const double log_std = std::clamp(out(0, a + j), kLogStdMin, kLogStdMax);
    const double u = std::atanh(action[static_cast<std::size_t>(j)]);
    const double e = (u - out(0, j)) / std::exp(log_std);
    lp += -0.5 * e * e - log_std - kHalfLog2Pi - log1m_tanh_sq(u);
  }
  return lp;
}

}  // namespace archie::rl

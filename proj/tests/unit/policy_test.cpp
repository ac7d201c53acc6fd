#include <cmath>
#include <numbers>

#include "archie/common/error.hpp"
#include "archie/rl/policy.hpp"
#include "gradcheck.hpp"
#include "helpers.hpp"

namespace archie::rl {
namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng, double scale = 1.0) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.normal();
  return m;
}

GaussianPolicy make_policy(std::uint64_t seed, int obs_dim = 4, int act_dim = 2) {
  GaussianPolicy p(obs_dim, act_dim, {16, 16});
  Rng rng(seed);
  p.net().init(rng);
  return p;
}

// Density of a = tanh(u), u ~ N(mean, std^2), by change of variables in long
// double: log N(atanh a) - log(1 - a^2).
long double squashed_log_density(long double mean, long double std, long double a) {
  const long double u = std::atanh(a);
  const long double z = (u - mean) / std;
  return -0.5L * z * z - std::log(std) - 0.5L * std::log(2.0L * std::numbers::pi_v<long double>) -
         std::log(1.0L - a * a);
}

TEST(Policy, Log1mTanhSqMatchesDirectFormula) {
  for (double u = -8.0; u <= 8.0; u += 0.37) {
    const long double t = std::tanh(static_cast<long double>(u));
    EXPECT_NEAR(log1m_tanh_sq(u), static_cast<double>(std::log(1.0L - t * t)), 1e-9) << u;
  }
  // Far tails: 1 - tanh^2 = 4 e^{-2|u|} (1 + O(e^{-2|u|})).
  EXPECT_NEAR(log1m_tanh_sq(50.0), std::log(4.0) - 100.0, 1e-12);
  EXPECT_NEAR(log1m_tanh_sq(-50.0), std::log(4.0) - 100.0, 1e-12);
  EXPECT_TRUE(std::isfinite(log1m_tanh_sq(1e4)));
}

TEST(Policy, SampleLogProbMatchesDensity) {
  const auto policy = make_policy(1);
  Rng rng(2);
  const Matrix obs = random_matrix(8, 4, rng);
  const Matrix noise = random_matrix(8, 2, rng);
  GaussianPolicy::Sample s;
  policy.sample(obs, noise, s);
  for (Eigen::Index i = 0; i < 8; ++i) {
    long double expected = 0.0L;
    for (Eigen::Index j = 0; j < 2; ++j) {
      ASSERT_LT(std::abs(s.action(i, j)), 1.0);
      expected += squashed_log_density(s.mean(i, j), s.std(i, j), s.action(i, j));
    }
    EXPECT_NEAR(s.log_prob[i], static_cast<double>(expected), 1e-8);
  }
}

TEST(Policy, SingleSampleAgreesWithLogProb) {
  const auto policy = make_policy(3);
  Rng rng(4);
  for (int k = 0; k < 20; ++k) {
    std::vector<double> obs(4);
    for (double& v : obs) v = rng.normal();
    Rng a(k), b(k);
    const auto [action, lp] = policy.sample_action(obs, a);
    EXPECT_EQ(action, policy.sample_action(obs, b).first);
    EXPECT_NEAR(policy.log_prob(obs, action), lp, 1e-7);
    for (double v : action) {
      EXPECT_GT(v, -1.0);
      EXPECT_LT(v, 1.0);
    }
  }
}

TEST(Policy, MeanActionIsTanhOfMean) {
  const auto policy = make_policy(5);
  Rng rng(6);
  const Matrix obs = random_matrix(3, 4, rng);
  GaussianPolicy::Sample s;
  policy.sample(obs, Matrix::Zero(3, 2), s);
  const Matrix m = policy.mean_action(obs);
  for (Eigen::Index i = 0; i < m.size(); ++i) EXPECT_EQ(m.data()[i], s.action.data()[i]);
}

TEST(Policy, NoiseShapeChecked) {
  const auto policy = make_policy(1);
  GaussianPolicy::Sample s;
  EXPECT_THROW_CODE(policy.sample(Matrix::Zero(2, 4), Matrix::Zero(3, 2), s), ErrorCode::kShapeMismatch);
  const std::vector<double> obs(4, 0.0), act(3, 0.0);
  EXPECT_THROW_CODE(policy.log_prob(obs, act), ErrorCode::kShapeMismatch);
}

TEST(Policy, BackwardMatchesFiniteDifferences) {
  auto policy = make_policy(7, 5, 3);
  Rng rng(8);
  const Matrix obs = random_matrix(8, 5, rng);
  const Matrix noise = random_matrix(8, 3, rng);
  const Matrix wa = random_matrix(8, 3, rng);
  Vector wl(8);
  for (Eigen::Index i = 0; i < 8; ++i) wl[i] = rng.normal();
  const auto loss = [&] {
    GaussianPolicy::Sample s;
    policy.sample(obs, noise, s);
    return (s.action.array() * wa.array()).sum() + s.log_prob.dot(wl);
  };
  GaussianPolicy::Sample s;
  policy.sample(obs, noise, s);
  std::vector<double> grad(policy.net().num_params(), 0.0);
  policy.backward(s, wa, wl, grad);
  const auto r = test::check_gradient(policy.net().params(), grad, loss);
  EXPECT_LT(r.max_rel, 1e-4) << "worst parameter " << r.worst;
}

TEST(Policy, ClampedLogStdGetsNoGradient) {
  GaussianPolicy policy(2, 1, {4});
  Rng rng(9);
  policy.net().init(rng);
  auto& net = policy.net();
  const std::size_t last = net.num_layers() - 1;
  net.weight(last).row(1).setZero();
  net.bias(last)(1) = 5.0;  // log_std pinned above kLogStdMax
  const Matrix obs = random_matrix(4, 2, rng);
  const Matrix noise = random_matrix(4, 1, rng);
  GaussianPolicy::Sample s;
  policy.sample(obs, noise, s);
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_EQ(s.std(i, 0), std::exp(kLogStdMax));
  std::vector<double> grad(net.num_params(), 0.0);
  policy.backward(s, Matrix::Ones(4, 1), Vector::Ones(4), grad);
  const auto bias_index = static_cast<std::size_t>(&net.bias(last)(1) - net.params().data());
  EXPECT_EQ(grad[bias_index], 0.0);
  const auto mean_bias = static_cast<std::size_t>(&net.bias(last)(0) - net.params().data());
  EXPECT_NE(grad[mean_bias], 0.0);
}

}  // namespace
}  // namespace archie::rl

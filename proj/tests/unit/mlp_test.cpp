#include <cmath>

#include "archie/common/error.hpp"
#include "archie/rl/mlp.hpp"
#include "gradcheck.hpp"
#include "helpers.hpp"

namespace archie::rl {
namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

std::size_t offset_of(const Mlp& net, const double* p) {
  return static_cast<std::size_t>(p - net.params().data());
}

TEST(Mlp, RejectsBadDims) {
  EXPECT_THROW_CODE(Mlp({3}), ErrorCode::kShapeMismatch);
  EXPECT_THROW_CODE(Mlp({3, 0, 1}), ErrorCode::kShapeMismatch);
}

TEST(Mlp, ParameterCount) {
  const Mlp net({5, 16, 16, 2});
  EXPECT_EQ(net.num_params(), 5u * 16 + 16 + 16u * 16 + 16 + 16u * 2 + 2);
  EXPECT_EQ(net.num_layers(), 3u);
}

TEST(Mlp, InitWithinFanInBound) {
  Mlp net({7, 12, 3});
  Rng rng(5);
  net.init(rng);
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(net.dims()[l]));
    EXPECT_LE(net.weight(l).cwiseAbs().maxCoeff(), bound);
    EXPECT_LE(net.bias(l).cwiseAbs().maxCoeff(), bound);
    EXPECT_GT(net.weight(l).cwiseAbs().maxCoeff(), 0.5 * bound);
  }
}

TEST(Mlp, ForwardMatchesHandComputation) {
  Mlp net({2, 2, 1});
  net.weight(0) << 1.0, -1.0, 0.5, 2.0;
  net.bias(0) << 0.0, -1.0;
  net.weight(1) << 3.0, -2.0;
  net.bias(1) << 0.25;
  Matrix x(2, 2);
  x << 1.0, 2.0, 3.0, -1.0;
  const Matrix y = net.forward(x);
  // Row 0: hidden = relu(-1, 3.5) = (0, 3.5); y = -7 + 0.25.
  // Row 1: hidden = relu(4, -1.5) = (4, 0); y = 12 + 0.25.
  EXPECT_EQ(y(0, 0), -6.75);
  EXPECT_EQ(y(1, 0), 12.25);
}

TEST(Mlp, BackwardMatchesFiniteDifferences) {
  Rng rng(17);
  Mlp net({6, 16, 16, 3});
  net.init(rng);
  const Matrix x = random_matrix(8, 6, rng);
  const Matrix w = random_matrix(8, 3, rng);
  const auto loss = [&] { return (net.forward(x).array() * w.array()).sum(); };

  Mlp::Cache cache;
  net.forward(x, cache);
  std::vector<double> grad(net.num_params(), 0.0);
  net.backward(cache, w, grad);
  const auto r = test::check_gradient(net.params(), grad, loss);
  EXPECT_EQ(r.checked, net.num_params());
  EXPECT_LT(r.max_rel, 1e-4) << "worst parameter " << r.worst;
}

TEST(Mlp, InputGradientMatchesFiniteDifferences) {
  Rng rng(18);
  Mlp net({4, 8, 2});
  net.init(rng);
  Matrix x = random_matrix(3, 4, rng);
  const Matrix w = random_matrix(3, 2, rng);
  Mlp::Cache cache;
  net.forward(x, cache);
  const Matrix dx = net.backward(cache, w, {});
  const std::vector<double> analytic(dx.data(), dx.data() + dx.size());
  const auto r = test::check_gradient(std::span<double>(x.data(), static_cast<std::size_t>(x.size())), analytic,
                                      [&] { return (net.forward(x).array() * w.array()).sum(); });
  EXPECT_LT(r.max_rel, 1e-4);
}

TEST(Mlp, BackwardAccumulates) {
  Rng rng(2);
  Mlp net({3, 4, 1});
  net.init(rng);
  const Matrix x = random_matrix(2, 3, rng);
  const Matrix dy = Matrix::Ones(2, 1);
  Mlp::Cache cache;
  net.forward(x, cache);
  std::vector<double> once(net.num_params(), 0.0), twice(net.num_params(), 0.0);
  net.backward(cache, dy, once);
  net.backward(cache, dy, twice);
  net.backward(cache, dy, twice);
  for (std::size_t i = 0; i < once.size(); ++i) EXPECT_EQ(twice[i], 2.0 * once[i]);
}

TEST(Mlp, ReluDerivativeAtZeroIsZero) {
  Mlp net({1, 1, 1});
  net.weight(0) << 1.0;
  net.bias(0) << 0.0;
  net.weight(1) << 1.0;
  net.bias(1) << 0.0;
  const Matrix x = Matrix::Zero(1, 1);
  Mlp::Cache cache;
  net.forward(x, cache);
  std::vector<double> grad(net.num_params(), 0.0);
  const Matrix dx = net.backward(cache, Matrix::Ones(1, 1), grad);
  EXPECT_EQ(dx(0, 0), 0.0);
  EXPECT_EQ(grad[offset_of(net, net.weight(0).data())], 0.0);
  EXPECT_EQ(grad[offset_of(net, net.bias(0).data())], 0.0);
  EXPECT_EQ(grad[offset_of(net, net.bias(1).data())], 1.0);
}

TEST(Mlp, SoftUpdate) {
  Rng rng(3);
  Mlp online({3, 4, 2}), target({3, 4, 2});
  online.init(rng);
  target.init(rng);
  const Mlp before = target;
  soft_update(target, online, 0.25);
  for (std::size_t i = 0; i < target.num_params(); ++i) {
    EXPECT_EQ(target.params()[i], 0.25 * online.params()[i] + 0.75 * before.params()[i]);
  }
  soft_update(target, online, 1.0);
  EXPECT_EQ(target, online);
  EXPECT_THROW_CODE(soft_update(target, Mlp({3, 5, 2}), 0.5), ErrorCode::kShapeMismatch);
}

}  // namespace
}  // namespace archie::rl

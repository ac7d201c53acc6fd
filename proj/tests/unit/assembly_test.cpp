#include <cmath>

#include "archie/common/error.hpp"
#include "archie/common/rng.hpp"
#include "archie/reward/assembly.hpp"
#include "helpers.hpp"

namespace archie::reward {
namespace {

// Independent oracle written from the formula, accumulating in long double.
long double oracle_terminal(const std::vector<double>& c, bool phi, int horizon) {
  long double bonus = 0;
  for (double v : c) bonus += v > 0 ? v : 0;
  return phi ? 10.0L * horizon * std::max(bonus, 1.0L) : 0.0L;
}

TEST(Assembly, AllNonPositiveSolvedClampsToOne) {
  const std::vector<double> c = {-0.5, 0.0, -3.0};
  const auto b = assemble_reward(c, true, 1000);
  EXPECT_EQ(b.bonus_sum, 0.0);
  EXPECT_EQ(b.terminal, 10000.0);
  EXPECT_EQ(b.shaping_sum, -3.5);
  EXPECT_EQ(b.total, 9996.5);
}

TEST(Assembly, CubePushUnsolved) {
  const std::vector<double> c = {-0.5, 0.0, 0.2};
  const auto b = assemble_reward(c, false, 1000);
  EXPECT_NEAR(b.total, -0.3, 1e-12);
  EXPECT_EQ(b.terminal, 0.0);
}

TEST(Assembly, MixedSignsAgainstOracle) {
  const std::vector<double> c = {2.0, -1.0};
  const auto b = assemble_reward(c, true, 10);
  EXPECT_EQ(b.bonus_sum, 2.0);
  EXPECT_EQ(static_cast<long double>(b.terminal), oracle_terminal(c, true, 10));
  EXPECT_EQ(b.terminal, 200.0);
  EXPECT_EQ(b.total, 201.0);
}

TEST(Assembly, RejectsBadHorizon) {
  const std::vector<double> c = {1.0};
  EXPECT_THROW_CODE(assemble_reward(c, true, 0), ErrorCode::kInvalidConfig);
}

// Properties: total identity, zero terminal without success, clamp floor,
// agreement with the oracle, linearity of shaping and bonus sums.
TEST(Assembly, RandomizedProperties) {
  Rng rng(5);
  for (int i = 0; i < 20000; ++i) {
    std::vector<double> c(1 + rng.index(6));
    for (auto& v : c) v = rng.uniform(-5, 5);
    const int horizon = 1 + static_cast<int>(rng.index(2000));
    const bool phi = rng.index(2) == 1;
    const auto b = assemble_reward(c, phi, horizon);
    ASSERT_EQ(b.total, b.shaping_sum + b.terminal);
    ASSERT_EQ(b.components, c);
    if (!phi) ASSERT_EQ(b.terminal, 0.0);
    if (phi) ASSERT_GE(b.terminal, 10.0 * horizon);
    const long double ref = oracle_terminal(c, phi, horizon);
    ASSERT_NEAR(static_cast<double>(ref), b.terminal, 1e-12 * std::max(1.0, b.terminal));

    const double k = rng.uniform(0.1, 4.0);
    std::vector<double> scaled = c;
    for (auto& v : scaled) v *= k;
    const auto s = assemble_reward(scaled, phi, horizon);
    ASSERT_NEAR(s.shaping_sum, k * b.shaping_sum, 1e-9);
    ASSERT_NEAR(s.bonus_sum, k * b.bonus_sum, 1e-9);
    if (phi && b.bonus_sum >= 1 && s.bonus_sum >= 1) {
      ASSERT_NEAR(s.terminal, k * b.terminal, 1e-9 * s.terminal);
    }
  }
}

}  // namespace
}  // namespace archie::reward

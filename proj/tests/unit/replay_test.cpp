#include "archie/common/error.hpp"
#include "archie/rl/replay.hpp"
#include "helpers.hpp"

namespace archie::rl {
namespace {

void add_marked(ReplayBuffer& buf, double mark, bool done = false) {
  const std::vector<double> obs = {mark, mark}, act = {-mark}, next = {mark + 0.5, mark + 0.5};
  buf.add(obs, act, mark * 10.0, next, done);
}

TEST(Replay, StoresTransitions) {
  ReplayBuffer buf(4, 2, 1);
  add_marked(buf, 1.0, true);
  add_marked(buf, 2.0);
  ASSERT_EQ(buf.size(), 2u);
  const auto v = buf.at(0);
  EXPECT_EQ(v.obs[0], 1.0);
  EXPECT_EQ(v.act[0], -1.0);
  EXPECT_EQ(v.rew, 10.0);
  EXPECT_EQ(v.next_obs[1], 1.5);
  EXPECT_TRUE(v.done);
  EXPECT_FALSE(buf.at(1).done);
}

TEST(Replay, RingOverwritesOldest) {
  ReplayBuffer buf(3, 2, 1);
  for (int i = 1; i <= 5; ++i) add_marked(buf, i);
  EXPECT_EQ(buf.size(), 3u);
  EXPECT_EQ(buf.at(0).obs[0], 3.0);
  EXPECT_EQ(buf.at(1).obs[0], 4.0);
  EXPECT_EQ(buf.at(2).obs[0], 5.0);
}

TEST(Replay, ShapeAndEmptyChecks) {
  ReplayBuffer buf(3, 2, 1);
  Rng rng(1);
  Batch b;
  EXPECT_THROW_CODE(buf.sample(4, rng, b), ErrorCode::kInvalidConfig);
  const std::vector<double> bad = {1.0};
  const std::vector<double> ok = {1.0, 2.0};
  EXPECT_THROW_CODE(buf.add(bad, bad, 0.0, ok, false), ErrorCode::kShapeMismatch);
}

// Property: every sampled row is a stored transition, intact.
TEST(Replay, SamplesAreStoredRows) {
  ReplayBuffer buf(50, 2, 1);
  for (int i = 0; i < 80; ++i) add_marked(buf, i, i % 7 == 0);
  Rng rng(2);
  Batch b;
  std::set<double> seen;
  for (int k = 0; k < 20; ++k) {
    buf.sample(16, rng, b);
    ASSERT_EQ(b.obs.rows(), 16);
    for (Eigen::Index r = 0; r < 16; ++r) {
      const double m = b.obs(r, 0);
      ASSERT_GE(m, 30.0);
      ASSERT_EQ(b.obs(r, 1), m);
      ASSERT_EQ(b.act(r, 0), -m);
      ASSERT_EQ(b.rew[r], m * 10.0);
      ASSERT_EQ(b.next_obs(r, 0), m + 0.5);
      ASSERT_EQ(b.done[r], static_cast<int>(m) % 7 == 0 ? 1.0 : 0.0);
      seen.insert(m);
    }
  }
  EXPECT_GT(seen.size(), 40u);
}

TEST(Replay, SamplingIsDeterministic) {
  ReplayBuffer buf(10, 2, 1);
  for (int i = 0; i < 10; ++i) add_marked(buf, i);
  Rng a(5), b(5);
  Batch x, y;
  buf.sample(8, a, x);
  buf.sample(8, b, y);
  EXPECT_EQ(x.obs, y.obs);
  EXPECT_EQ(x.rew, y.rew);
}

}  // namespace
}  // namespace archie::rl

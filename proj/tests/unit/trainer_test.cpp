#include "archie/common/error.hpp"
#include "archie/reward/parser.hpp"
#include "archie/rl/trainer.hpp"
#include "helpers.hpp"

namespace archie::rl {
namespace {

constexpr int kHorizon = 20;

env::EnvConfig reach_env() {
  auto c = env::EnvConfig::defaults(env::EnvId::kPointReach2D);
  c.horizon = kHorizon;
  return c;
}

reward::BoundSpec bind(const std::string& text) {
  const auto schema = env::make_env(reach_env())->observation_schema();
  return reward::BoundSpec::bind(reward::parse_reward_spec(text), schema, kHorizon);
}

const char* kReach = "component d: -dist_agent_origin\nsuccess: dist_agent_origin < 0.05\n";
const char* kNever = "component d: -dist_agent_origin\nsuccess: dist_agent_origin < 0\n";
const char* kAlways = "component d: -dist_agent_origin\ncomponent b: 0.5\nsuccess: dist_agent_origin < 100\n";

TrainConfig small_config(std::uint64_t seed = 1) {
  TrainConfig c;
  c.sac.hidden = {8, 8};
  c.sac.batch_size = 8;
  c.total_steps = 200;
  c.eval_every = 50;
  c.eval_episodes = 2;
  c.seed = seed;
  c.replay_capacity = 1000;
  return c;
}

TEST(Trainer, RejectsBadConfig) {
  auto c = small_config();
  c.eval_every = 0;
  EXPECT_THROW_CODE(Trainer(reach_env(), bind(kReach), c), ErrorCode::kInvalidConfig);
  c = small_config();
  c.stop_at_success = 1.5;
  EXPECT_THROW_CODE(Trainer(reach_env(), bind(kReach), c), ErrorCode::kInvalidConfig);
}

TEST(Trainer, RejectsHorizonMismatch) {
  auto env = reach_env();
  env.horizon = 30;
  EXPECT_THROW_CODE(Trainer(env, bind(kReach), small_config()), ErrorCode::kUnboundSpec);
}

TEST(Trainer, DeterministicForSameSeed) {
  Trainer a(reach_env(), bind(kReach), small_config(3));
  Trainer b(reach_env(), bind(kReach), small_config(3));
  a.run();
  b.run();
  ASSERT_EQ(a.metrics().size(), 4u);
  EXPECT_EQ(a.bundle(), b.bundle());
  for (std::size_t i = 0; i < a.metrics().size(); ++i) {
    EXPECT_EQ(a.metrics()[i].critic_loss, b.metrics()[i].critic_loss);
    EXPECT_EQ(a.metrics()[i].episode_return, b.metrics()[i].episode_return);
  }
  Trainer c(reach_env(), bind(kReach), small_config(4));
  c.run();
  EXPECT_FALSE(a.bundle() == c.bundle());
}

TEST(Trainer, AdvanceStepsToEachEvaluation) {
  auto cfg = small_config();
  cfg.total_steps = 120;
  Trainer t(reach_env(), bind(kReach), cfg);
  auto row = t.advance();
  ASSERT_TRUE(row);
  EXPECT_EQ(row->step, 50);
  EXPECT_EQ(t.steps(), 50);
  EXPECT_EQ(row->env_id, "PointReach2D");
  EXPECT_EQ(t.advance()->step, 100);
  EXPECT_FALSE(t.advance());  // budget ends between evaluations
  EXPECT_TRUE(t.finished());
  EXPECT_EQ(t.steps(), 120);
  EXPECT_FALSE(t.advance());
  EXPECT_EQ(t.metrics().size(), 2u);
  EXPECT_EQ(t.bundle().env_steps, 120);
  EXPECT_EQ(t.bundle().critic_updates, 120);
  EXPECT_EQ(t.bundle().actor_updates, 60);
}

TEST(Trainer, EvaluationUsesDerivedSeeds) {
  Trainer t(reach_env(), bind(kReach), small_config(5));
  t.advance();
  const auto ours = t.evaluate_policy(false);
  const auto seed = eval_seed(5);
  EXPECT_NE(seed, 5u);
  const auto ref = evaluate(t.bundle().policy, reach_env(), t.spec(), 2, seed);
  ASSERT_EQ(ours.episodes.size(), 2u);
  EXPECT_EQ(ours.episodes[1].episode_return, ref.episodes[1].episode_return);
  // Episode i is reset with seed + i.
  const auto shifted = evaluate(t.bundle().policy, reach_env(), t.spec(), 1, seed + 1);
  EXPECT_EQ(shifted.episodes[0].episode_return, ours.episodes[1].episode_return);
  EXPECT_EQ(shifted.episodes[0].length, ours.episodes[1].length);
}

TEST(Trainer, StopAtSuccess) {
  auto cfg = small_config();
  cfg.stop_at_success = 0.0;
  Trainer t(reach_env(), bind(kReach), cfg);
  t.run();
  EXPECT_TRUE(t.early_stopped());
  EXPECT_EQ(t.steps(), 50);
  EXPECT_EQ(t.metrics().size(), 1u);
}

TEST(Trainer, TruncationIsNotTerminalUnlessRequested) {
  auto cfg = small_config();
  cfg.total_steps = 100;
  Trainer loose(reach_env(), bind(kNever), cfg);
  loose.run();
  EXPECT_EQ(loose.metrics().back().episodes_done, 100 / kHorizon);
  for (std::size_t i = 0; i < loose.replay().size(); ++i) EXPECT_FALSE(loose.replay().at(i).done);

  cfg.truncation_done = true;
  Trainer strict(reach_env(), bind(kNever), cfg);
  strict.run();
  for (std::size_t i = 0; i < strict.replay().size(); ++i) {
    EXPECT_EQ(strict.replay().at(i).done, (i + 1) % kHorizon == 0) << i;
  }
}

TEST(Trainer, TerminalRewardEntersReplay) {
  auto cfg = small_config();
  cfg.total_steps = 10;
  cfg.eval_every = 10;
  Trainer with(reach_env(), bind(kAlways), cfg);
  with.run();
  // Every step succeeds and ends its episode.
  EXPECT_EQ(with.metrics().back().episodes_done, 10);
  const auto v = with.replay().at(0);
  EXPECT_TRUE(v.done);
  const double d = -v.next_obs[2];
  EXPECT_EQ(v.rew, (d + 0.5) + 10.0 * kHorizon * 1.0);

  cfg.terminal_reward = false;
  cfg.terminate_on_success = false;
  Trainer without(reach_env(), bind(kAlways), cfg);
  without.run();
  EXPECT_EQ(without.metrics().back().episodes_done, 0);
  const auto w = without.replay().at(0);
  EXPECT_FALSE(w.done);
  EXPECT_EQ(w.rew, -w.next_obs[2] + 0.5);
}

SacConfig tiny_sac() {
  SacConfig c;
  c.hidden = {8};
  return c;
}

TEST(Evaluate, TerminationFollowsConfig) {
  const PolicyBundle b(3, 2, tiny_sac(), 1);
  const auto spec = bind(kAlways);
  const auto stop = evaluate(b.policy, reach_env(), spec, 3, 0, true, true, true);
  const auto run_on = evaluate(b.policy, reach_env(), spec, 3, 0, true, false, false);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(stop.episodes[i].length, 1);
    EXPECT_TRUE(stop.episodes[i].success);
    EXPECT_TRUE(stop.episodes[i].breakdowns[0].terminal > 0.0);
    EXPECT_EQ(run_on.episodes[i].length, kHorizon);
    EXPECT_TRUE(run_on.episodes[i].success);
    EXPECT_EQ(run_on.episodes[i].breakdowns.size(), static_cast<std::size_t>(kHorizon));
    for (const auto& br : run_on.episodes[i].breakdowns) EXPECT_EQ(br.terminal, 0.0);
  }
  EXPECT_THROW_CODE(evaluate(b.policy, reach_env(), spec, 0, 0), ErrorCode::kInvalidConfig);
}

TEST(Evaluate, SuccessIsClassifierAtFinalStep) {
  const PolicyBundle b(3, 2, tiny_sac(), 2);
  const auto never = evaluate(b.policy, reach_env(), bind(kNever), 2, 0);
  EXPECT_EQ(never.success_rate, 0.0);
  for (const auto& ep : never.episodes) EXPECT_EQ(ep.length, kHorizon);
}

}  // namespace
}  // namespace archie::rl

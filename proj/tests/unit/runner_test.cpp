#include "archie/common/error.hpp"
#include "archie/common/text.hpp"
#include "archie/harness/runner.hpp"
#include "archie/harness/metrics.hpp"
#include "archie/reward/parser.hpp"
#include "helpers.hpp"

namespace archie::harness {
namespace {

using nlohmann::json;

const char* kB1 = "component d: -dist_agent_origin\ncomponent b: 1\nsuccess: dist_agent_origin < 0.05\n";
const char* kNever = "component d: -dist_agent_origin\nsuccess: dist_agent_origin < 0\n";
const char* kBoom = "component boom: 1e300 * 1e300 * dist_agent_origin\nsuccess: dist_agent_origin < 0.05\n";

ExperimentConfig tiny(const std::filesystem::path& out) {
  ExperimentConfig c;
  c.env = env::EnvConfig::defaults(env::EnvId::kPointReach2D);
  c.env.horizon = 20;
  c.train.sac.hidden = {8};
  c.train.sac.batch_size = 8;
  c.train.total_steps = 60;
  c.train.eval_every = 30;
  c.train.eval_episodes = 2;
  c.train.replay_capacity = 1000;
  c.seeds = {1, 2, 3};
  c.output_dir = out;
  c.reward_source.kind = RewardSourceKind::kFile;
  c.reward_source.paths = {"unused.rsp"};
  return c;
}

RewardEntry entry(const std::string& label, const char* text) { return {label, reward::parse_reward_spec(text)}; }

TEST(Runner, MatrixWritesEveryArtifact) {
  test::TempDir dir;
  const auto cfg = tiny(dir / "runs");
  const std::vector<RewardEntry> rewards = {entry("b1", kB1), entry("never", kNever)};
  const auto outcomes = run_matrix(cfg, rewards);
  ASSERT_EQ(outcomes.size(), 6u);
  for (const auto& o : outcomes) {
    EXPECT_EQ(o.status, RunStatus::kOk) << o.error;
    for (const char* f : {"metrics.csv", "checkpoint.bin", "spec.rsp", "breakdowns.jsonl", "run.json"}) {
      EXPECT_TRUE(std::filesystem::exists(o.dir / f)) << o.dir << " " << f;
    }
    EXPECT_EQ(read_metrics_csv(o.dir / "metrics.csv").size(), 2u);
    EXPECT_EQ(json::parse(read_file(o.dir / "run.json"))["status"], "ok");
  }
  EXPECT_EQ(outcomes[4].dir, run_dir(dir / "runs", "never", 2));
}

TEST(Runner, RerunsAreByteIdentical) {
  test::TempDir dir;
  const std::vector<RewardEntry> rewards = {entry("b1", kB1)};
  auto a = tiny(dir / "a");
  auto b = tiny(dir / "b");
  a.seeds = b.seeds = {7};
  run_matrix(a, rewards);
  run_matrix(b, rewards);
  for (const char* f : {"metrics.csv", "checkpoint.bin", "breakdowns.jsonl"}) {
    EXPECT_EQ(read_file(run_dir(a.output_dir, "b1", 7) / f), read_file(run_dir(b.output_dir, "b1", 7) / f)) << f;
  }
}

TEST(Runner, ResumeSkipsCompletedRuns) {
  test::TempDir dir;
  auto cfg = tiny(dir / "runs");
  cfg.seeds = {1};
  const std::vector<RewardEntry> rewards = {entry("b1", kB1)};
  EXPECT_EQ(run_matrix(cfg, rewards)[0].status, RunStatus::kOk);
  std::vector<std::string> log;
  MatrixOptions opts;
  opts.log = [&](const std::string& m) { log.push_back(m); };
  EXPECT_EQ(run_matrix(cfg, rewards, opts)[0].status, RunStatus::kSkipped);
  ASSERT_EQ(log.size(), 1u);
  EXPECT_EQ(log[0].rfind("skip", 0), 0u);
  opts.resume = false;
  EXPECT_EQ(run_matrix(cfg, rewards, opts)[0].status, RunStatus::kOk);
}

TEST(Runner, FailedRunIsIsolated) {
  test::TempDir dir;
  auto cfg = tiny(dir / "runs");
  cfg.seeds = {1, 2};
  cfg.workers = 2;
  const std::vector<RewardEntry> rewards = {entry("boom", kBoom), entry("b1", kB1)};
  const auto outcomes = run_matrix(cfg, rewards);
  ASSERT_EQ(outcomes.size(), 4u);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(outcomes[i].status, RunStatus::kFailed);
    EXPECT_EQ(outcomes[i].error_code, ErrorCode::kNonFinite);
    EXPECT_NE(outcomes[i].error.find("boom"), std::string::npos);
    const auto info = json::parse(read_file(outcomes[i].dir / "run.json"));
    EXPECT_EQ(info["status"], "failed");
    EXPECT_EQ(info["error_code"], "NonFinite");
  }
  for (int i = 2; i < 4; ++i) EXPECT_EQ(outcomes[i].status, RunStatus::kOk) << outcomes[i].error;
  // Failed runs are retried on resume.
  cfg.workers = 1;
  const auto again = run_matrix(cfg, rewards);
  EXPECT_EQ(again[0].status, RunStatus::kFailed);
  EXPECT_EQ(again[2].status, RunStatus::kSkipped);
}

TEST(Runner, AuditOfUnsolvedRun) {
  test::TempDir dir;
  auto cfg = tiny(dir / "runs");
  cfg.seeds = {1};
  const auto o = run_matrix(cfg, {entry("never", kNever)})[0];
  const auto episodes = read_breakdowns(o.dir / "breakdowns.jsonl");
  ASSERT_EQ(episodes.size(), 2u);
  EXPECT_EQ(episodes[0].breakdowns.size(), 20u);
  const auto report = audit_episodes(episodes);
  EXPECT_EQ(report.solved, 0u);
  EXPECT_NE(report.to_text().find("no solved episodes"), std::string::npos);
  EXPECT_EQ(report.to_json()["no_solved_episodes"], true);
}

TEST(Runner, AuditOfSolvedEpisodes) {
  rl::EvalEpisode ep;
  ep.success = true;
  ep.length = 3;
  for (int t = 0; t < 3; ++t) {
    const bool last = t == 2;
    ep.breakdowns.push_back(reward::assemble_reward(std::vector<double>{-0.5, 0.1 * (t + 1)}, last, 100));
  }
  const auto report = audit_episodes({ep});
  EXPECT_EQ(report.solved, 1u);
  EXPECT_EQ(report.dominance_pass, 1u);
  EXPECT_EQ(report.monotone, 1u);
  EXPECT_NE(report.to_text().find("1/1 solved episodes pass"), std::string::npos);
}

TEST(Runner, CorruptBreakdownsNamePath) {
  test::TempDir dir;
  write_file_atomic(dir / "breakdowns.jsonl", "{\"episode\": 0}\nnot json\n");
  try {
    read_breakdowns(dir / "breakdowns.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_NE(std::string(e.what()).find("breakdowns.jsonl:1"), std::string::npos) << e.what();
  }
  EXPECT_THROW_CODE(read_breakdowns(dir / "missing.jsonl"), ErrorCode::kIo);
}

TEST(Runner, ResolveFileRewards) {
  test::TempDir dir;
  write_file_atomic(dir / "a.rsp", kB1);
  write_file_atomic(dir / "sub_a.rsp", kNever);
  std::filesystem::create_directories(dir / "x");
  write_file_atomic(dir / "x" / "a.rsp", kNever);
  auto cfg = tiny(dir / "runs");
  cfg.reward_source.paths = {dir / "a.rsp", dir / "x" / "a.rsp"};
  const auto rewards = resolve_rewards(cfg, test::data_dir());
  ASSERT_EQ(rewards.size(), 2u);
  EXPECT_NE(rewards[0].label, rewards[1].label);
  EXPECT_EQ(rewards[0].label, "a");
}

TEST(Runner, ResolveFixtureRewardsOffline) {
  test::TempDir dir;
  auto cfg = tiny(dir / "runs");
  cfg.env = env::EnvConfig::defaults(env::EnvId::kNarrowTablePush);
  cfg.reward_source.kind = RewardSourceKind::kFixture;
  cfg.reward_source.task = "push_cube";
  cfg.reward_source.fixture_dir = test::data_dir() / "fixtures" / "llm";
  const auto rewards = resolve_rewards(cfg, test::data_dir());
  ASSERT_EQ(rewards.size(), 1u);
  EXPECT_EQ(rewards[0].label, "push_cube_r0");
  EXPECT_EQ(rewards[0].spec.components.size(), 3u);
  cfg.rewards_per_task = 2;
  EXPECT_THROW_CODE(resolve_rewards(cfg, test::data_dir()), ErrorCode::kFixtureMiss);
}

struct CannedBackend final : llm::CompletionBackend {
  std::string reply;
  std::string complete(const std::string&, int) override { return reply; }
};

TEST(Runner, InjectedBackendAndIngestErrors) {
  test::TempDir dir;
  auto cfg = tiny(dir / "runs");
  cfg.reward_source.kind = RewardSourceKind::kLive;
  cfg.reward_source.task_text = "Reach the origin.";
  cfg.rewards_per_task = 2;
  const auto factory = [](const std::string& reply) {
    return [reply](const RewardSource&) {
      auto b = std::make_unique<CannedBackend>();
      b->reply = reply;
      return std::unique_ptr<llm::CompletionBackend>(std::move(b));
    };
  };
  const auto rewards = resolve_rewards(cfg, test::data_dir(), factory(std::string("```rsp\n") + kB1 + "```\n"));
  ASSERT_EQ(rewards.size(), 2u);
  EXPECT_EQ(rewards[1].label, "task_r1");
  EXPECT_THROW_CODE(resolve_rewards(cfg, test::data_dir(), factory("no code here")), ErrorCode::kNoCodeBlock);
  EXPECT_THROW_CODE(resolve_rewards(cfg, test::data_dir(), factory("```rsp\ncomponent a: object.x\nsuccess: 1 > 0\n```")),
                    ErrorCode::kUnboundSpec);
  EXPECT_THROW_CODE(resolve_rewards(cfg, test::data_dir(), factory("```rsp\ncomponent a: +\n```")),
                    ErrorCode::kSyntax);
}

}  // namespace
}  // namespace archie::harness

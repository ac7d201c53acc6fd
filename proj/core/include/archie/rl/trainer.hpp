#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "archie/env/env.hpp"
#include "archie/reward/assembly.hpp"
#include "archie/reward/evaluator.hpp"
#include "archie/rl/replay.hpp"
#include "archie/rl/sac.hpp"

namespace archie::rl {

using EnvFactory = std::function<std::unique_ptr<env::Env>()>;

struct TrainConfig {
  SacConfig sac;
  int n_envs = 1;
  std::int64_t total_steps = 100'000;
  std::int64_t eval_every = 5'000;
  int eval_episodes = 10;
  std::uint64_t seed = 0;
  std::size_t replay_capacity = 1'000'000;
  // Uniform random actions for the first `random_steps` env steps.
  std::int64_t random_steps = 0;
  // Add the terminal bonus to the training reward.
  bool terminal_reward = true;
  // End training episodes when the success classifier fires.
  bool terminate_on_success = true;
  // Also mark horizon truncation as done in the replay buffer.
  bool truncation_done = false;
  // Stop after the first evaluation whose success rate reaches this value.
  std::optional<double> stop_at_success;

  // Throws Error(kInvalidConfig).
  void validate() const;
  // Stable fingerprint of every field, stored in checkpoints.
  std::uint64_t hash() const;
};

struct MetricsRow {
  std::int64_t step = 0;
  std::uint64_t seed = 0;
  std::string env_id;
  double success_rate = 0.0;
  double critic_loss = 0.0;  // mean since the previous row
  double actor_loss = 0.0;   // mean since the previous row
  double alpha = 0.0;
  double episode_return = 0.0;  // mean over this row's evaluation episodes
  std::int64_t episodes_done = 0;  // training episodes finished so far
};

struct EvalEpisode {
  bool success = false;
  bool failure = false;
  int length = 0;
  double episode_return = 0.0;
  std::vector<reward::RewardBreakdown> breakdowns;  // filled when recording
};

struct EvalResult {
  double success_rate = 0.0;
  double mean_return = 0.0;
  std::vector<EvalEpisode> episodes;
};

// Mean-action rollouts of `episodes` episodes, episode i reset with seed
// `seed + i`. An episode ends when the failure classifier fires, at the
// horizon, or (with terminate_on_success) when the success classifier fires.
// Success is the success classifier at the final step.
EvalResult evaluate(const GaussianPolicy& policy, const EnvFactory& make, const reward::BoundSpec& spec,
                    int episodes, std::uint64_t seed, bool record_breakdowns = false,
                    bool terminal_reward = true, bool terminate_on_success = true);
EvalResult evaluate(const GaussianPolicy& policy, const env::EnvConfig& env_config,
                    const reward::BoundSpec& spec, int episodes, std::uint64_t seed,
                    bool record_breakdowns = false, bool terminal_reward = true,
                    bool terminate_on_success = true);

// Reference-mode trainer: N environments stepped round-robin, one critic
// update per collected transition. Deterministic for a fixed config.
class Trainer {
 public:
  Trainer(EnvFactory make, reward::BoundSpec spec, TrainConfig config);
  Trainer(const env::EnvConfig& env_config, reward::BoundSpec spec, TrainConfig config);
  ~Trainer();

  // Runs until the next evaluation (or the step budget) and returns the
  // emitted metrics row, if any. No-op once finished().
  std::optional<MetricsRow> advance();
  // Runs to completion.
  void run(const std::function<void(const MetricsRow&)>& on_row = {});

  bool finished() const;
  bool early_stopped() const { return early_stopped_; }
  std::int64_t steps() const { return step_; }

  const PolicyBundle& bundle() const { return bundle_; }
  const std::vector<MetricsRow>& metrics() const { return metrics_; }
  const ReplayBuffer& replay() const { return replay_; }
  const TrainConfig& config() const { return config_; }
  const reward::BoundSpec& spec() const { return spec_; }
  // Evaluation protocol of this run: seed, episode count and termination
  // rules follow the training config.
  EvalResult evaluate_policy(bool record_breakdowns) const;

 private:
  struct Slot;

  void collect_and_update();
  MetricsRow evaluation_row();

  EnvFactory make_;
  reward::BoundSpec spec_;
  TrainConfig config_;
  std::string env_name_;
  std::vector<Slot> slots_;
  PolicyBundle bundle_;
  ReplayBuffer replay_;
  Rng act_rng_;
  Rng update_rng_;
  Batch batch_;
  std::int64_t step_ = 0;
  std::int64_t episodes_done_ = 0;
  std::size_t next_slot_ = 0;
  double critic_loss_sum_ = 0.0;
  std::int64_t critic_loss_n_ = 0;
  double actor_loss_sum_ = 0.0;
  std::int64_t actor_loss_n_ = 0;
  bool early_stopped_ = false;
  std::vector<MetricsRow> metrics_;
};

// Eval episodes of a run are reset with seeds derived from the training seed.
std::uint64_t eval_seed(std::uint64_t train_seed);

}  // namespace archie::rl

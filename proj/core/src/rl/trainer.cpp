#include "archie/rl/trainer.hpp"

#include <cmath>

#include "archie/common/error.hpp"
#include "archie/common/text.hpp"

namespace archie::rl {
namespace {

// Rng streams, kept apart so adding a consumer never shifts another's draws.
constexpr std::uint64_t kStreamInit = 1;
constexpr std::uint64_t kStreamAct = 2;
constexpr std::uint64_t kStreamUpdate = 3;
constexpr std::uint64_t kStreamEval = 4;
constexpr std::uint64_t kStreamEnvBase = 1000;

std::uint64_t episode_seed(std::uint64_t seed, std::size_t env_index, std::uint64_t episode) {
  return Rng::derive(Rng::derive(seed, kStreamEnvBase + env_index), episode);
}

EnvFactory factory_for(const env::EnvConfig& config) {
  config.validate();
  return [config] { return env::make_env(config); };
}

}  // namespace

void TrainConfig::validate() const {
  sac.validate();
  const auto bad = [](const std::string& m) { throw Error(ErrorCode::kInvalidConfig, m); };
  if (n_envs < 1) bad("n_envs must be >= 1");
  if (total_steps < 1) bad("total_steps must be >= 1");
  if (eval_every < 1) bad("eval_every must be >= 1");
  if (eval_episodes < 1) bad("eval_episodes must be >= 1");
  if (replay_capacity < 1) bad("replay_capacity must be >= 1");
  if (random_steps < 0) bad("random_steps must be >= 0");
  if (stop_at_success && !(*stop_at_success >= 0.0 && *stop_at_success <= 1.0)) {
    bad("stop_at_success must be in [0, 1]");
  }
}

std::uint64_t TrainConfig::hash() const {
  std::string s;
  const auto add = [&](std::string_view key, const std::string& v) {
    s.append(key);
    s += '=';
    s += v;
    s += ';';
  };
  add("gamma", format_double(sac.gamma));
  add("tau", format_double(sac.tau));
  add("actor_delay", std::to_string(sac.actor_delay));
  add("batch_size", std::to_string(sac.batch_size));
  add("lr_actor", format_double(sac.lr_actor));
  add("lr_critic", format_double(sac.lr_critic));
  add("lr_alpha", format_double(sac.lr_alpha));
  add("target_entropy", sac.target_entropy ? format_double(*sac.target_entropy) : "auto");
  add("init_log_alpha", format_double(sac.init_log_alpha));
  std::string hidden;
  for (int h : sac.hidden) hidden += std::to_string(h) + ",";
  add("hidden", hidden);
  add("n_envs", std::to_string(n_envs));
  add("total_steps", std::to_string(total_steps));
  add("eval_every", std::to_string(eval_every));
  add("eval_episodes", std::to_string(eval_episodes));
  add("seed", std::to_string(seed));
  add("replay_capacity", std::to_string(replay_capacity));
  add("random_steps", std::to_string(random_steps));
  add("terminal_reward", terminal_reward ? "1" : "0");
  add("terminate_on_success", terminate_on_success ? "1" : "0");
  add("truncation_done", truncation_done ? "1" : "0");
  add("stop_at_success", stop_at_success ? format_double(*stop_at_success) : "none");
  return fnv1a64(s);
}

std::uint64_t eval_seed(std::uint64_t train_seed) { return Rng::derive(train_seed, kStreamEval); }

EvalResult evaluate(const GaussianPolicy& policy, const EnvFactory& make, const reward::BoundSpec& spec,
                    int episodes, std::uint64_t seed, bool record_breakdowns, bool terminal_reward,
                    bool terminate_on_success) {
  if (episodes < 1) throw Error(ErrorCode::kInvalidConfig, "evaluation needs at least one episode");
  const auto n = static_cast<std::size_t>(episodes);
  std::vector<std::unique_ptr<env::Env>> envs;
  std::vector<env::Observation> obs(n);
  EvalResult result;
  result.episodes.resize(n);
  std::vector<bool> active(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    envs.push_back(make());
    obs[i] = envs[i]->reset(seed + i);
  }
  const auto obs_dim = static_cast<Eigen::Index>(spec.schema().size());
  std::vector<double> comps(spec.num_components());
  std::size_t remaining = n;
  // Episodes advance in lockstep so the policy runs one batched forward per step.
  while (remaining > 0) {
    Matrix x(static_cast<Eigen::Index>(remaining), obs_dim);
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      const auto r = static_cast<Eigen::Index>(rows.size());
      for (Eigen::Index k = 0; k < obs_dim; ++k) x(r, k) = obs[i].values[static_cast<std::size_t>(k)];
      rows.push_back(i);
    }
    const Matrix actions = policy.mean_action(x);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const std::size_t i = rows[r];
      const auto row = actions.row(static_cast<Eigen::Index>(r));
      std::vector<double> a(row.data(), row.data() + row.size());
      auto [next, info] = envs[i]->step(a);
      spec.eval_components(next.values, comps);
      const bool phi = spec.success(next.values);
      const bool fail = spec.failure(next.values);
      const auto br = reward::assemble_reward(comps, phi && terminal_reward, spec.horizon());
      EvalEpisode& ep = result.episodes[i];
      ep.episode_return += br.total;
      ++ep.length;
      if (record_breakdowns) ep.breakdowns.push_back(br);
      if ((phi && terminate_on_success) || fail || info.horizon_reached) {
        ep.success = phi;
        ep.failure = fail;
        active[i] = false;
        --remaining;
      } else {
        obs[i] = std::move(next);
      }
    }
  }
  double successes = 0.0;
  double returns = 0.0;
  for (const auto& ep : result.episodes) {
    successes += ep.success ? 1.0 : 0.0;
    returns += ep.episode_return;
  }
  result.success_rate = successes / static_cast<double>(n);
  result.mean_return = returns / static_cast<double>(n);
  return result;
}

EvalResult evaluate(const GaussianPolicy& policy, const env::EnvConfig& env_config,
                    const reward::BoundSpec& spec, int episodes, std::uint64_t seed, bool record_breakdowns,
                    bool terminal_reward, bool terminate_on_success) {
  return evaluate(policy, factory_for(env_config), spec, episodes, seed, record_breakdowns, terminal_reward,
                  terminate_on_success);
}

struct Trainer::Slot {
  std::unique_ptr<env::Env> env;
  env::Observation obs;
  std::uint64_t episode = 0;
};

Trainer::Trainer(const env::EnvConfig& env_config, reward::BoundSpec spec, TrainConfig config)
    : Trainer(factory_for(env_config), std::move(spec), std::move(config)) {}

Trainer::Trainer(EnvFactory make, reward::BoundSpec spec, TrainConfig config)
    : make_(std::move(make)),
      spec_(std::move(spec)),
      config_(std::move(config)),
      replay_(config_.replay_capacity, static_cast<int>(spec_.schema().size()), 1),
      act_rng_(Rng::derive(config_.seed, kStreamAct)),
      update_rng_(Rng::derive(config_.seed, kStreamUpdate)) {
  config_.validate();
  for (int i = 0; i < config_.n_envs; ++i) {
    Slot s;
    s.env = make_();
    if (s.env->observation_schema() != spec_.schema()) {
      throw Error(ErrorCode::kUnboundSpec, "reward spec was bound to a different observation schema");
    }
    if (s.env->horizon() != spec_.horizon()) {
      throw Error(ErrorCode::kUnboundSpec, "reward spec horizon differs from the environment horizon");
    }
    s.obs = s.env->reset(episode_seed(config_.seed, static_cast<std::size_t>(i), 0));
    slots_.push_back(std::move(s));
  }
  env_name_ = std::string(env::to_string(slots_.front().env->id()));
  const int obs_dim = static_cast<int>(spec_.schema().size());
  const int act_dim = slots_.front().env->action_dim();
  bundle_ = PolicyBundle(obs_dim, act_dim, config_.sac, Rng::derive(config_.seed, kStreamInit));
  replay_ = ReplayBuffer(config_.replay_capacity, obs_dim, act_dim);
}

Trainer::~Trainer() = default;

bool Trainer::finished() const { return early_stopped_ || step_ >= config_.total_steps; }

void Trainer::collect_and_update() {
  Slot& s = slots_[next_slot_];
  next_slot_ = (next_slot_ + 1) % slots_.size();

  std::vector<double> action;
  if (step_ < config_.random_steps) {
    action.resize(static_cast<std::size_t>(bundle_.act_dim()));
    for (double& a : action) a = act_rng_.uniform(-1.0, 1.0);
  } else {
    action = bundle_.policy.sample_action(s.obs.values, act_rng_).first;
  }
  auto [next, info] = s.env->step(action);

  std::vector<double> comps(spec_.num_components());
  spec_.eval_components(next.values, comps);
  const bool phi = spec_.success(next.values);
  const bool fail = spec_.failure(next.values);
  const auto br = reward::assemble_reward(comps, phi && config_.terminal_reward, spec_.horizon());

  const bool terminated = (phi && config_.terminate_on_success) || fail;
  const bool done = terminated || (config_.truncation_done && info.horizon_reached);
  replay_.add(s.obs.values, action, br.total, next.values, done);

  if (terminated || info.horizon_reached) {
    ++episodes_done_;
    ++s.episode;
    const auto index = static_cast<std::size_t>(&s - slots_.data());
    s.obs = s.env->reset(episode_seed(config_.seed, index, s.episode));
  } else {
    s.obs = std::move(next);
  }
  ++step_;
  bundle_.env_steps = step_;

  replay_.sample(static_cast<std::size_t>(config_.sac.batch_size), update_rng_, batch_);
  const UpdateStats stats = sac_update(bundle_, config_.sac, batch_, update_rng_);
  critic_loss_sum_ += stats.critic_loss;
  ++critic_loss_n_;
  if (stats.actor_loss) {
    actor_loss_sum_ += *stats.actor_loss;
    ++actor_loss_n_;
  }
}

EvalResult Trainer::evaluate_policy(bool record_breakdowns) const {
  return evaluate(bundle_.policy, make_, spec_, config_.eval_episodes, eval_seed(config_.seed),
                  record_breakdowns, config_.terminal_reward, config_.terminate_on_success);
}

MetricsRow Trainer::evaluation_row() {
  const EvalResult eval = evaluate_policy(false);
  MetricsRow row;
  row.step = step_;
  row.seed = config_.seed;
  row.env_id = env_name_;
  row.success_rate = eval.success_rate;
  row.critic_loss = critic_loss_n_ ? critic_loss_sum_ / static_cast<double>(critic_loss_n_) : 0.0;
  row.actor_loss = actor_loss_n_ ? actor_loss_sum_ / static_cast<double>(actor_loss_n_) : 0.0;
  row.alpha = bundle_.alpha();
  row.episode_return = eval.mean_return;
  row.episodes_done = episodes_done_;
  critic_loss_sum_ = actor_loss_sum_ = 0.0;
  critic_loss_n_ = actor_loss_n_ = 0;
  return row;
}

std::optional<MetricsRow> Trainer::advance() {
  if (finished()) return std::nullopt;
  const std::int64_t next_eval = (step_ / config_.eval_every + 1) * config_.eval_every;
  const std::int64_t stop = std::min(next_eval, config_.total_steps);
  while (step_ < stop) collect_and_update();
  if (step_ % config_.eval_every != 0) return std::nullopt;
  MetricsRow row = evaluation_row();
  metrics_.push_back(row);
  if (config_.stop_at_success && row.success_rate >= *config_.stop_at_success) early_stopped_ = true;
  return row;
}

void Trainer::run(const std::function<void(const MetricsRow&)>& on_row) {
  while (!finished()) {
    if (auto row = advance(); row && on_row) on_row(*row);
  }
}

}  // namespace archie::rl

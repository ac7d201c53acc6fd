#include "archie/harness/config.hpp"

#include <set>

#include "archie/common/error.hpp"
#include "archie/common/text.hpp"

namespace archie::harness {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::kInvalidConfig, msg); }

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) bad(where + " must be an object");
}

void check_keys(const json& j, const std::string& where, std::initializer_list<std::string_view> allowed) {
  require_object(j, where);
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) bad("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get(const json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad(where + "." + key + " is missing or has the wrong type");
  }
}

template <typename T>
void get_opt(const json& j, const std::string& key, const std::string& where, T& out) {
  if (j.contains(key)) out = get<T>(j, key, where);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

env::EnvConfig parse_env_config(const json& j) {
  check_keys(j, "env", {"env_id", "dt", "horizon", "gravity", "geometry"});
  env::EnvConfig c = env::EnvConfig::defaults(env::env_id_from_string(get<std::string>(j, "env_id", "env")));
  get_opt(j, "dt", "env", c.dt);
  get_opt(j, "horizon", "env", c.horizon);
  get_opt(j, "gravity", "env", c.gravity);
  if (j.contains("geometry")) {
    require_object(j.at("geometry"), "env.geometry");
    for (const auto& [key, value] : j.at("geometry").items()) {
      if (!value.is_number()) bad("env.geometry." + key + " must be a number");
      c.geometry[key] = value.get<double>();
    }
  }
  c.validate();
  return c;
}

rl::TrainConfig parse_train_config(const json& j) {
  check_keys(j, "train",
             {"gamma", "tau", "actor_delay", "batch_size", "lr_actor", "lr_critic", "lr_alpha", "target_entropy",
              "init_log_alpha", "hidden", "n_envs", "total_steps", "eval_every", "eval_episodes", "replay_capacity",
              "random_steps", "terminal_reward", "terminate_on_success", "truncation_done", "stop_at_success"});
  rl::TrainConfig c;
  const std::string w = "train";
  get_opt(j, "gamma", w, c.sac.gamma);
  get_opt(j, "tau", w, c.sac.tau);
  get_opt(j, "actor_delay", w, c.sac.actor_delay);
  get_opt(j, "batch_size", w, c.sac.batch_size);
  get_opt(j, "lr_actor", w, c.sac.lr_actor);
  get_opt(j, "lr_critic", w, c.sac.lr_critic);
  get_opt(j, "lr_alpha", w, c.sac.lr_alpha);
  if (j.contains("target_entropy")) c.sac.target_entropy = get<double>(j, "target_entropy", w);
  get_opt(j, "init_log_alpha", w, c.sac.init_log_alpha);
  get_opt(j, "hidden", w, c.sac.hidden);
  get_opt(j, "n_envs", w, c.n_envs);
  get_opt(j, "total_steps", w, c.total_steps);
  get_opt(j, "eval_every", w, c.eval_every);
  get_opt(j, "eval_episodes", w, c.eval_episodes);
  get_opt(j, "replay_capacity", w, c.replay_capacity);
  get_opt(j, "random_steps", w, c.random_steps);
  get_opt(j, "terminal_reward", w, c.terminal_reward);
  get_opt(j, "terminate_on_success", w, c.terminate_on_success);
  get_opt(j, "truncation_done", w, c.truncation_done);
  if (j.contains("stop_at_success")) c.stop_at_success = get<double>(j, "stop_at_success", w);
  c.validate();
  return c;
}

json to_json(const env::EnvConfig& c) {
  json geometry = json::object();
  for (const auto& [k, v] : c.geometry) geometry[k] = v;
  return {{"env_id", std::string(env::to_string(c.env_id))},
          {"dt", c.dt},
          {"horizon", c.horizon},
          {"gravity", c.gravity},
          {"geometry", geometry}};
}

json to_json(const rl::TrainConfig& c) {
  json j = {{"gamma", c.sac.gamma},
            {"tau", c.sac.tau},
            {"actor_delay", c.sac.actor_delay},
            {"batch_size", c.sac.batch_size},
            {"lr_actor", c.sac.lr_actor},
            {"lr_critic", c.sac.lr_critic},
            {"lr_alpha", c.sac.lr_alpha},
            {"init_log_alpha", c.sac.init_log_alpha},
            {"hidden", c.sac.hidden},
            {"n_envs", c.n_envs},
            {"total_steps", c.total_steps},
            {"eval_every", c.eval_every},
            {"eval_episodes", c.eval_episodes},
            {"replay_capacity", c.replay_capacity},
            {"random_steps", c.random_steps},
            {"terminal_reward", c.terminal_reward},
            {"terminate_on_success", c.terminate_on_success},
            {"truncation_done", c.truncation_done}};
  if (c.sac.target_entropy) j["target_entropy"] = *c.sac.target_entropy;
  if (c.stop_at_success) j["stop_at_success"] = *c.stop_at_success;
  return j;
}

void ExperimentConfig::validate() const {
  env.validate();
  train.validate();
  if (seeds.empty()) bad("seeds must not be empty");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) bad("seeds must be distinct");
  if (rewards_per_task < 1) bad("rewards_per_task must be >= 1");
  if (workers < 1) bad("workers must be >= 1");
  if (output_dir.empty()) bad("output_dir must be set");
  switch (reward_source.kind) {
    case RewardSourceKind::kFile:
      if (reward_source.paths.empty()) bad("reward_source.paths must not be empty");
      break;
    case RewardSourceKind::kFixture:
    case RewardSourceKind::kLive:
      if (reward_source.task.empty() && reward_source.task_text.empty()) bad("reward_source needs a task");
      break;
  }
}

ExperimentConfig parse_experiment_config(const json& j, const std::filesystem::path& base_dir,
                                         const std::filesystem::path& data_dir) {
  check_keys(j, "config", {"env", "reward_source", "train", "seeds", "rewards_per_task", "output_dir", "workers"});
  ExperimentConfig c;
  if (!j.contains("env")) bad("config.env is required");
  c.env = parse_env_config(j.at("env"));
  if (j.contains("train")) c.train = parse_train_config(j.at("train"));
  c.seeds = get<std::vector<std::uint64_t>>(j, "seeds", "config");
  get_opt(j, "rewards_per_task", "config", c.rewards_per_task);
  get_opt(j, "workers", "config", c.workers);
  c.output_dir = resolve(base_dir, get<std::string>(j, "output_dir", "config"));

  if (!j.contains("reward_source")) bad("config.reward_source is required");
  const json& rs = j.at("reward_source");
  check_keys(rs, "reward_source",
             {"kind", "paths", "task", "task_text", "fixture_dir", "endpoint", "model", "token_env",
              "response_pointer", "temperature", "max_tokens", "timeout_seconds"});
  const std::string kind = get<std::string>(rs, "kind", "reward_source");
  RewardSource& src = c.reward_source;
  src.fixture_dir = data_dir / "fixtures" / "llm";
  if (rs.contains("fixture_dir")) src.fixture_dir = resolve(base_dir, get<std::string>(rs, "fixture_dir", "reward_source"));
  if (kind == "file") {
    src.kind = RewardSourceKind::kFile;
    for (const auto& p : get<std::vector<std::string>>(rs, "paths", "reward_source")) {
      src.paths.push_back(resolve(base_dir, p));
    }
  } else if (kind == "fixture" || kind == "live") {
    src.kind = kind == "fixture" ? RewardSourceKind::kFixture : RewardSourceKind::kLive;
    get_opt(rs, "task", "reward_source", src.task);
    get_opt(rs, "task_text", "reward_source", src.task_text);
    get_opt(rs, "endpoint", "reward_source", src.live.endpoint);
    get_opt(rs, "model", "reward_source", src.live.model);
    get_opt(rs, "token_env", "reward_source", src.live.token_env);
    get_opt(rs, "response_pointer", "reward_source", src.live.response_pointer);
    if (rs.contains("temperature")) src.live.temperature = get<double>(rs, "temperature", "reward_source");
    if (rs.contains("max_tokens")) src.live.max_tokens = get<int>(rs, "max_tokens", "reward_source");
    get_opt(rs, "timeout_seconds", "reward_source", src.live.timeout_seconds);
  } else {
    bad("reward_source.kind must be file, fixture or live");
  }
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path, const std::filesystem::path& data_dir) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    bad(path.string() + ": " + e.what());
  }
  return parse_experiment_config(j, path.parent_path(), data_dir);
}

}  // namespace archie::harness

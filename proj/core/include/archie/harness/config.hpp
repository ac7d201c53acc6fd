#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "archie/env/env.hpp"
#include "archie/llm/completion.hpp"
#include "archie/rl/trainer.hpp"

namespace archie::harness {

enum class RewardSourceKind { kFile, kFixture, kLive };

struct RewardSource {
  RewardSourceKind kind = RewardSourceKind::kFile;
  std::vector<std::filesystem::path> paths;  // kFile
  std::string task;                          // kFixture / kLive: benchmark task id
  std::string task_text;                     // kLive: overrides the task file when set
  std::filesystem::path fixture_dir;         // kFixture reads, kLive records
  llm::LiveConfig live;                      // kLive
};

struct ExperimentConfig {
  env::EnvConfig env;
  RewardSource reward_source;
  rl::TrainConfig train;  // train.seed is replaced per run
  std::vector<std::uint64_t> seeds;
  int rewards_per_task = 1;
  std::filesystem::path output_dir;
  int workers = 1;

  // Throws Error(kInvalidConfig).
  void validate() const;
};

// Relative paths are resolved against `base_dir`. Unknown keys anywhere are
// errors. Throws Error(kInvalidConfig) or Error(kUnknownEnv).
ExperimentConfig parse_experiment_config(const nlohmann::json& j, const std::filesystem::path& base_dir,
                                         const std::filesystem::path& data_dir);
ExperimentConfig load_experiment_config(const std::filesystem::path& path, const std::filesystem::path& data_dir);

// Shared parsers for the nested sections, also used by single-run commands.
env::EnvConfig parse_env_config(const nlohmann::json& j);
rl::TrainConfig parse_train_config(const nlohmann::json& j);
nlohmann::json to_json(const env::EnvConfig& c);
nlohmann::json to_json(const rl::TrainConfig& c);

}  // namespace archie::harness

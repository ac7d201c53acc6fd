#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "archie/common/error.hpp"
#include "archie/harness/runner.hpp"

namespace archie::harness {

// Process exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitDivergence = 4;

int exit_code_for(ErrorCode code);

struct CommandContext {
  std::ostream& out;
  std::ostream& err;
  std::filesystem::path data_dir;
  BackendFactory backends = default_backend;
};

struct GenerateOptions {
  std::string task;       // benchmark task id
  std::string task_text;  // free text; needs env_id
  std::string env_id;     // defaults to the task's env
  std::string backend = "replay";
  std::filesystem::path fixture_dir;  // defaults to <data>/fixtures/llm
  std::filesystem::path out;
  int sample_index = 0;
  llm::LiveConfig live;
};

struct TrainOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  std::optional<std::string> backend;
  bool truncation_done = false;
  bool resume = true;
};

struct EvalOptions {
  std::filesystem::path run_dir;     // supplies checkpoint, spec and env
  std::filesystem::path checkpoint;  // or these three
  std::filesystem::path spec;
  std::string env_id;
  std::uint64_t seed = 0;
  int episodes = 10;
  // Taken from run.json when evaluating a run directory.
  bool terminal_reward = true;
  bool terminate_on_success = true;
};

struct PlotOptions {
  std::vector<std::filesystem::path> inputs;  // run directories or metrics CSVs
  std::filesystem::path out;
  std::string title = "success rate";
};

int cmd_generate(const GenerateOptions& options, CommandContext& ctx);
int cmd_validate(const std::filesystem::path& spec, const std::string& env_id, CommandContext& ctx);
int cmd_train(const TrainOptions& options, CommandContext& ctx);
int cmd_eval(const EvalOptions& options, CommandContext& ctx);
int cmd_audit(const std::filesystem::path& run_dir, CommandContext& ctx);
int cmd_plot(const PlotOptions& options, CommandContext& ctx);

}  // namespace archie::harness

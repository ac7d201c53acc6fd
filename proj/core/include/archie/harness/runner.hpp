#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "archie/common/error.hpp"
#include "archie/harness/config.hpp"
#include "archie/llm/completion.hpp"
#include "archie/reward/ast.hpp"
#include "archie/reward/audit.hpp"
#include "archie/rl/trainer.hpp"

namespace archie::harness {

struct RewardEntry {
  std::string label;  // unique within a matrix; used in run directory names
  reward::RewardSpec spec;
};

// Turns a response into a validated spec: extract, parse, validate against
// the schema. Throws the stage's error; validation failures raise
// Error(kUnboundSpec) with the report.
reward::RewardSpec ingest_response(const std::string& response, const env::ObservationSchema& schema,
                                   std::vector<std::string>* warnings = nullptr);

// Backend factory for LLM-backed sources; tests inject fakes.
using BackendFactory = std::function<std::unique_ptr<llm::CompletionBackend>(const RewardSource&)>;
std::unique_ptr<llm::CompletionBackend> default_backend(const RewardSource& source);

// Loads or generates every reward of the matrix and validates each against the
// env schema (Error(kUnboundSpec) naming the source otherwise).
std::vector<RewardEntry> resolve_rewards(const ExperimentConfig& config, const std::filesystem::path& data_dir,
                                         const BackendFactory& backends = default_backend);

enum class RunStatus { kOk, kFailed, kSkipped };
std::string_view to_string(RunStatus status);

struct RunOutcome {
  std::string label;
  std::uint64_t seed = 0;
  std::filesystem::path dir;
  RunStatus status = RunStatus::kOk;
  std::string error;
  ErrorCode error_code = ErrorCode::kIo;
  double final_success_rate = 0.0;
};

std::filesystem::path run_dir(const std::filesystem::path& output_dir, const std::string& label, std::uint64_t seed);

// Trains one run into `dir`: metrics.csv (rewritten after each evaluation),
// checkpoint.bin, spec.rsp, breakdowns.jsonl (final evaluation episodes) and
// run.json. Failures are recorded in run.json and returned, not thrown.
RunOutcome execute_run(const env::EnvConfig& env, const RewardEntry& reward, const rl::TrainConfig& train,
                       const std::filesystem::path& dir);

struct MatrixOptions {
  // Skip runs whose run.json already reports success.
  bool resume = true;
  std::function<void(const std::string&)> log;
};

// All (reward, seed) runs; independent runs are spread over config.workers
// threads. One run failing never affects another.
std::vector<RunOutcome> run_matrix(const ExperimentConfig& config, const std::vector<RewardEntry>& rewards,
                                   const MatrixOptions& options = {});

// breakdowns.jsonl: one JSON object per evaluation episode.
nlohmann::json episode_to_json(const rl::EvalEpisode& ep, std::size_t index,
                               const std::vector<std::string>& component_names);
std::vector<rl::EvalEpisode> read_breakdowns(const std::filesystem::path& path);

struct EpisodeAudit {
  std::size_t index = 0;
  bool success = false;
  reward::MonotonicityReport monotonicity;
  reward::DominanceReport dominance;
};

struct AuditReport {
  std::vector<EpisodeAudit> episodes;
  std::size_t solved = 0;
  std::size_t dominance_pass = 0;
  std::size_t monotone = 0;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

AuditReport audit_episodes(const std::vector<rl::EvalEpisode>& episodes);

}  // namespace archie::harness

#include "archie/harness/runner.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "archie/common/error.hpp"
#include "archie/common/text.hpp"
#include "archie/harness/metrics.hpp"
#include "archie/llm/extract.hpp"
#include "archie/llm/prompt.hpp"
#include "archie/llm/tasks.hpp"
#include "archie/reward/evaluator.hpp"
#include "archie/reward/parser.hpp"
#include "archie/rl/checkpoint.hpp"

namespace archie::harness {
namespace {

using nlohmann::json;

std::string task_text_for(const RewardSource& src, const std::filesystem::path& data_dir) {
  if (!src.task_text.empty()) return src.task_text;
  return llm::load_task_text(src.task, data_dir);
}

std::string unique_label(std::string label, std::set<std::string>& used) {
  std::string out = label;
  for (int i = 2; !used.insert(out).second; ++i) out = label + "_" + std::to_string(i);
  return out;
}

json breakdown_to_json(const reward::RewardBreakdown& b) {
  return {{"components", b.components},
          {"shaping_sum", b.shaping_sum},
          {"bonus_sum", b.bonus_sum},
          {"terminal", b.terminal},
          {"total", b.total}};
}

void write_run_json(const std::filesystem::path& dir, const json& j) {
  write_file_atomic(dir / "run.json", j.dump(2) + "\n");
}

}  // namespace

reward::RewardSpec ingest_response(const std::string& response, const env::ObservationSchema& schema,
                                   std::vector<std::string>* warnings) {
  auto extraction = llm::extract_spec(response);
  if (warnings) {
    warnings->insert(warnings->end(), extraction.warnings.begin(), extraction.warnings.end());
  }
  reward::RewardSpec spec = reward::parse_reward_spec(extraction.program);
  const auto report = reward::validate_spec(spec, schema);
  if (!report.ok()) throw Error(ErrorCode::kUnboundSpec, "generated program does not validate:\n" + report.to_text());
  return spec;
}

std::unique_ptr<llm::CompletionBackend> default_backend(const RewardSource& source) {
  if (source.kind == RewardSourceKind::kLive) {
    return std::make_unique<llm::LiveBackend>(source.live, llm::FixtureStore(source.fixture_dir),
                                              llm::make_http_transport());
  }
  return std::make_unique<llm::ReplayBackend>(llm::FixtureStore(source.fixture_dir));
}

std::vector<RewardEntry> resolve_rewards(const ExperimentConfig& config, const std::filesystem::path& data_dir,
                                         const BackendFactory& backends) {
  std::vector<RewardEntry> out;
  std::set<std::string> used;
  const RewardSource& src = config.reward_source;
  const auto schema = env::make_env(config.env)->observation_schema();
  if (src.kind == RewardSourceKind::kFile) {
    for (const auto& path : src.paths) {
      auto spec = reward::parse_reward_spec(read_file(path));
      const auto report = reward::validate_spec(spec, schema);
      if (!report.ok()) throw Error(ErrorCode::kUnboundSpec, path.string() + " does not validate:\n" + report.to_text());
      out.push_back({unique_label(path.stem().string(), used), std::move(spec)});
    }
    return out;
  }
  const std::string prompt = llm::build_prompt(task_text_for(src, data_dir), schema);
  auto backend = backends(src);
  const std::string base = src.task.empty() ? "task" : src.task;
  for (int i = 0; i < config.rewards_per_task; ++i) {
    out.push_back({unique_label(base + "_r" + std::to_string(i), used),
                   ingest_response(backend->complete(prompt, i), schema)});
  }
  return out;
}

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::kOk: return "ok";
    case RunStatus::kFailed: return "failed";
    case RunStatus::kSkipped: return "skipped";
  }
  return "unknown";
}

std::filesystem::path run_dir(const std::filesystem::path& output_dir, const std::string& label, std::uint64_t seed) {
  return output_dir / (label + "__s" + std::to_string(seed));
}

json episode_to_json(const rl::EvalEpisode& ep, std::size_t index, const std::vector<std::string>& names) {
  json steps = json::array();
  for (const auto& b : ep.breakdowns) steps.push_back(breakdown_to_json(b));
  return {{"episode", index},
          {"success", ep.success},
          {"failure", ep.failure},
          {"length", ep.length},
          {"return", ep.episode_return},
          {"component_names", names},
          {"steps", steps}};
}

std::vector<rl::EvalEpisode> read_breakdowns(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::vector<rl::EvalEpisode> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    try {
      const json j = json::parse(line);
      rl::EvalEpisode ep;
      ep.success = j.at("success").get<bool>();
      ep.failure = j.at("failure").get<bool>();
      ep.length = j.at("length").get<int>();
      ep.episode_return = j.at("return").get<double>();
      for (const auto& s : j.at("steps")) {
        reward::RewardBreakdown b;
        b.components = s.at("components").get<std::vector<double>>();
        b.shaping_sum = s.at("shaping_sum").get<double>();
        b.bonus_sum = s.at("bonus_sum").get<double>();
        b.terminal = s.at("terminal").get<double>();
        b.total = s.at("total").get<double>();
        ep.breakdowns.push_back(std::move(b));
      }
      if (ep.breakdowns.empty()) throw Error(ErrorCode::kParse, where + ": episode has no steps");
      out.push_back(std::move(ep));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse, where + ": " + e.what());
    }
  }
  return out;
}

RunOutcome execute_run(const env::EnvConfig& env_config, const RewardEntry& reward, const rl::TrainConfig& train,
                       const std::filesystem::path& dir) {
  RunOutcome outcome;
  outcome.label = reward.label;
  outcome.seed = train.seed;
  outcome.dir = dir;
  json info = {{"label", reward.label},
               {"seed", train.seed},
               {"env", to_json(env_config)},
               {"train", to_json(train)},
               {"config_hash", train.hash()}};
  try {
    std::filesystem::create_directories(dir);
    write_file_atomic(dir / "spec.rsp", reward::serialize(reward.spec));
    info["status"] = "running";
    write_run_json(dir, info);

    const auto schema = env::make_env(env_config)->observation_schema();
    auto bound = reward::BoundSpec::bind(reward.spec, schema, env_config.horizon);
    rl::Trainer trainer(env_config, std::move(bound), train);
    trainer.run([&](const rl::MetricsRow&) {
      write_file_atomic(dir / "metrics.csv", metrics_to_csv(trainer.metrics()));
    });
    write_file_atomic(dir / "metrics.csv", metrics_to_csv(trainer.metrics()));
    rl::save_checkpoint({train.hash(), trainer.bundle()}, dir / "checkpoint.bin");

    const auto final_eval = trainer.evaluate_policy(true);
    std::string lines;
    const auto names = trainer.spec().component_names();
    for (std::size_t i = 0; i < final_eval.episodes.size(); ++i) {
      lines += episode_to_json(final_eval.episodes[i], i, names).dump() + "\n";
    }
    write_file_atomic(dir / "breakdowns.jsonl", lines);

    outcome.final_success_rate = final_eval.success_rate;
    info["status"] = "ok";
    info["steps"] = trainer.steps();
    info["early_stopped"] = trainer.early_stopped();
    info["final_success_rate"] = final_eval.success_rate;
    write_run_json(dir, info);
  } catch (const Error& e) {
    outcome.status = RunStatus::kFailed;
    outcome.error = e.what();
    outcome.error_code = e.code();
    info["status"] = "failed";
    info["error"] = e.what();
    info["error_code"] = std::string(archie::to_string(e.code()));
    try {
      write_run_json(dir, info);
    } catch (const Error&) {
      // The failure is still reported through the outcome.
    }
  }
  return outcome;
}

std::vector<RunOutcome> run_matrix(const ExperimentConfig& config, const std::vector<RewardEntry>& rewards,
                                   const MatrixOptions& options) {
  struct Job {
    const RewardEntry* reward;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& r : rewards) {
    for (auto seed : config.seeds) jobs.push_back({&r, seed});
  }
  std::vector<RunOutcome> outcomes(jobs.size());
  std::mutex log_mutex;
  const auto log = [&](const std::string& msg) {
    if (!options.log) return;
    std::lock_guard lock(log_mutex);
    options.log(msg);
  };

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      const auto dir = run_dir(config.output_dir, job.reward->label, job.seed);
      if (options.resume && std::filesystem::exists(dir / "run.json")) {
        try {
          const auto j = json::parse(read_file(dir / "run.json"));
          if (j.value("status", "") == "ok") {
            outcomes[i] = {job.reward->label, job.seed, dir, RunStatus::kSkipped, {}, ErrorCode::kIo,
                           j.value("final_success_rate", 0.0)};
            log("skip " + dir.filename().string() + " (already complete)");
            continue;
          }
        } catch (const std::exception&) {
          // Unreadable status: rerun.
        }
      }
      log("start " + dir.filename().string());
      rl::TrainConfig train = config.train;
      train.seed = job.seed;
      outcomes[i] = execute_run(config.env, *job.reward, train, dir);
      log(std::string(to_string(outcomes[i].status)) + " " + dir.filename().string() +
          (outcomes[i].error.empty() ? "" : ": " + outcomes[i].error));
    }
  };
  const int n_threads = std::min<int>(config.workers, static_cast<int>(jobs.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  return outcomes;
}

AuditReport audit_episodes(const std::vector<rl::EvalEpisode>& episodes) {
  AuditReport report;
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    const auto& ep = episodes[i];
    if (ep.breakdowns.empty()) continue;
    EpisodeAudit a;
    a.index = i;
    a.success = ep.success;
    a.monotonicity = reward::audit_monotonicity(ep.breakdowns);
    a.dominance = reward::audit_dominance(ep.breakdowns, ep.success);
    if (a.monotonicity.monotone()) ++report.monotone;
    if (ep.success) {
      ++report.solved;
      if (a.dominance.pass) ++report.dominance_pass;
    }
    report.episodes.push_back(std::move(a));
  }
  return report;
}

json AuditReport::to_json() const {
  json eps = json::array();
  for (const auto& a : episodes) {
    json violations = json::array();
    for (const auto& v : a.monotonicity.violations) {
      violations.push_back({{"component", v.component}, {"t", v.t}, {"t_later", v.t_later}, {"magnitude", v.magnitude}});
    }
    json e = {{"episode", a.index},
              {"success", a.success},
              {"monotonicity",
               {{"violation_count", a.monotonicity.violation_count},
                {"max_magnitude", a.monotonicity.max_magnitude},
                {"violations", violations}}}};
    if (a.success) {
      e["dominance"] = {{"pass", a.dominance.pass},
                        {"conditional", a.dominance.conditional},
                        {"terminal", a.dominance.terminal},
                        {"cumulative_bonus", a.dominance.cumulative_bonus},
                        {"cumulative_shaping", a.dominance.cumulative_shaping},
                        {"ratio", a.dominance.ratio}};
    }
    eps.push_back(std::move(e));
  }
  return {{"episodes", eps},
          {"solved", solved},
          {"dominance_pass", dominance_pass},
          {"monotone", monotone},
          {"no_solved_episodes", solved == 0}};
}

std::string AuditReport::to_text() const {
  std::string out = "monotonicity: " + std::to_string(monotone) + "/" + std::to_string(episodes.size()) +
                    " episodes without violations\n";
  for (const auto& a : episodes) {
    if (a.monotonicity.monotone()) continue;
    out += "  episode " + std::to_string(a.index) + ": " + std::to_string(a.monotonicity.violation_count) +
           " violations, max magnitude " + format_double(a.monotonicity.max_magnitude) + "\n";
  }
  if (solved == 0) {
    out += "dominance: no solved episodes\n";
    return out;
  }
  out += "dominance: " + std::to_string(dominance_pass) + "/" + std::to_string(solved) + " solved episodes pass\n";
  for (const auto& a : episodes) {
    if (!a.success) continue;
    out += "  episode " + std::to_string(a.index) + ": " + (a.dominance.pass ? "pass" : "FAIL") +
           (a.dominance.conditional ? " (conditional: bonuses not monotone)" : "") +
           ", terminal " + format_double(a.dominance.terminal) + " vs 10 x cumulative bonus " +
           format_double(10.0 * a.dominance.cumulative_bonus) + ", ratio " + format_double(a.dominance.ratio) + "\n";
  }
  return out;
}

}  // namespace archie::harness

#include "archie/harness/commands.hpp"

#include <ostream>

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

int report(CommandContext& ctx, const Error& e, const std::string& stage = {}) {
  ctx.err << "error";
  if (!stage.empty()) ctx.err << " in stage " << stage;
  ctx.err << " [" << to_string(e.code()) << "]: " << e.what() << "\n";
  return exit_code_for(e.code());
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kUnknownEnv:
    case ErrorCode::kAuthMissing:
    case ErrorCode::kFixtureMiss:
    case ErrorCode::kEmptyTask:
    case ErrorCode::kIo:
    case ErrorCode::kParse:
    case ErrorCode::kCheckpointFormat:
    case ErrorCode::kRaggedGrid:
      return kExitConfig;
    case ErrorCode::kSyntax:
    case ErrorCode::kDuplicateComponent:
    case ErrorCode::kMissingSuccess:
    case ErrorCode::kUnboundSpec:
    case ErrorCode::kNoCodeBlock:
      return kExitValidation;
    case ErrorCode::kNonFinite:
      return kExitDivergence;
    default:
      return kExitRuntime;
  }
}

int cmd_generate(const GenerateOptions& o, CommandContext& ctx) {
  std::string stage = "config";
  std::string response;
  try {
    if (o.out.empty()) throw Error(ErrorCode::kInvalidConfig, "--out is required");
    if (o.task.empty() && o.task_text.empty()) throw Error(ErrorCode::kInvalidConfig, "--task or --task-text is required");
    std::string env_name = o.env_id;
    if (env_name.empty()) {
      if (o.task.empty()) throw Error(ErrorCode::kInvalidConfig, "--env is required with --task-text");
      env_name = env::to_string(llm::find_task(o.task).env);
    }
    const auto env_config = env::EnvConfig::defaults(env::env_id_from_string(env_name));
    const auto schema = env::make_env(env_config)->observation_schema();

    RewardSource src;
    src.kind = o.backend == "live" ? RewardSourceKind::kLive : RewardSourceKind::kFixture;
    if (o.backend != "live" && o.backend != "replay") {
      throw Error(ErrorCode::kInvalidConfig, "--backend must be live or replay");
    }
    src.task = o.task;
    src.task_text = o.task_text;
    src.fixture_dir = o.fixture_dir.empty() ? ctx.data_dir / "fixtures" / "llm" : o.fixture_dir;
    src.live = o.live;

    stage = "prompt";
    const std::string text = o.task_text.empty() ? llm::load_task_text(o.task, ctx.data_dir) : o.task_text;
    const std::string prompt = llm::build_prompt(text, schema);

    stage = "complete";
    auto backend = ctx.backends(src);
    response = backend->complete(prompt, o.sample_index);

    stage = "extract";
    const auto extraction = llm::extract_spec(response);
    for (const auto& w : extraction.warnings) ctx.err << "warning: " << w << "\n";

    stage = "parse";
    const auto spec = reward::parse_reward_spec(extraction.program);

    stage = "validate";
    const auto validation = reward::validate_spec(spec, schema);
    if (!validation.ok()) {
      ctx.err << validation.to_text();
      throw Error(ErrorCode::kUnboundSpec, "generated program does not validate against " + env_name);
    }

    stage = "write";
    if (o.out.has_parent_path()) std::filesystem::create_directories(o.out.parent_path());
    write_file_atomic(o.out, reward::serialize(spec));
    ctx.out << "wrote " << o.out.string() << " (" << spec.components.size() << " components, prompt hash "
            << llm::fixture_key(prompt, o.sample_index) << ")\n";
    return kExitOk;
  } catch (const Error& e) {
    if (!response.empty() && !o.out.empty()) {
      const auto raw = std::filesystem::path(o.out.string() + ".response.txt");
      try {
        if (raw.has_parent_path()) std::filesystem::create_directories(raw.parent_path());
        write_file_atomic(raw, response);
        ctx.err << "raw response saved to " << raw.string() << "\n";
      } catch (const Error&) {
      }
    }
    return report(ctx, e, stage);
  }
}

int cmd_validate(const std::filesystem::path& spec_path, const std::string& env_id, CommandContext& ctx) {
  try {
    const auto env_config = env::EnvConfig::defaults(env::env_id_from_string(env_id));
    const auto schema = env::make_env(env_config)->observation_schema();
    const auto spec = reward::parse_reward_spec(read_file(spec_path));
    const auto validation = reward::validate_spec(spec, schema);
    if (!validation.ok()) {
      ctx.out << spec_path.string() << ": " << validation.issues.size() << " issue(s)\n" << validation.to_text();
      return kExitValidation;
    }
    ctx.out << spec_path.string() << ": ok (" << spec.components.size() << " components)\n";
    return kExitOk;
  } catch (const Error& e) {
    return report(ctx, e);
  }
}

int cmd_train(const TrainOptions& o, CommandContext& ctx) {
  try {
    ExperimentConfig config = load_experiment_config(o.config, ctx.data_dir);
    if (o.out) config.output_dir = *o.out;
    if (o.truncation_done) config.train.truncation_done = true;
    if (o.backend) {
      if (*o.backend == "live") {
        if (config.reward_source.kind == RewardSourceKind::kFile) {
          throw Error(ErrorCode::kInvalidConfig, "--backend live needs an LLM reward source");
        }
        config.reward_source.kind = RewardSourceKind::kLive;
      } else if (*o.backend == "replay") {
        if (config.reward_source.kind == RewardSourceKind::kLive) config.reward_source.kind = RewardSourceKind::kFixture;
      } else {
        throw Error(ErrorCode::kInvalidConfig, "--backend must be live or replay");
      }
    }
    const auto rewards = resolve_rewards(config, ctx.data_dir, ctx.backends);
    std::filesystem::create_directories(config.output_dir);
    MatrixOptions mo;
    mo.resume = o.resume;
    mo.log = [&](const std::string& m) { ctx.err << m << "\n"; };
    const auto outcomes = run_matrix(config, rewards, mo);

    json summary = json::array();
    bool diverged = false;
    bool failed = false;
    for (const auto& r : outcomes) {
      summary.push_back({{"label", r.label},
                         {"seed", r.seed},
                         {"dir", r.dir.string()},
                         {"status", std::string(to_string(r.status))},
                         {"final_success_rate", r.final_success_rate},
                         {"error", r.error}});
      ctx.out << r.dir.filename().string() << " " << to_string(r.status) << " "
              << format_double(r.final_success_rate) << "\n";
      if (r.status == RunStatus::kFailed) {
        failed = true;
        diverged = diverged || r.error_code == ErrorCode::kNonFinite;
      }
    }
    write_file_atomic(config.output_dir / "matrix.json", summary.dump(2) + "\n");
    if (diverged) return kExitDivergence;
    return failed ? kExitRuntime : kExitOk;
  } catch (const Error& e) {
    return report(ctx, e);
  }
}

int cmd_eval(const EvalOptions& o, CommandContext& ctx) {
  try {
    std::filesystem::path ckpt_path = o.checkpoint;
    std::filesystem::path spec_path = o.spec;
    env::EnvConfig env_config;
    bool terminal_reward = o.terminal_reward;
    bool terminate_on_success = o.terminate_on_success;
    if (!o.run_dir.empty()) {
      if (ckpt_path.empty()) ckpt_path = o.run_dir / "checkpoint.bin";
      if (spec_path.empty()) spec_path = o.run_dir / "spec.rsp";
      json run;
      try {
        run = json::parse(read_file(o.run_dir / "run.json"));
        env_config = parse_env_config(run.at("env"));
        terminal_reward = run.at("train").at("terminal_reward").get<bool>();
        terminate_on_success = run.at("train").at("terminate_on_success").get<bool>();
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kParse, (o.run_dir / "run.json").string() + ": " + e.what());
      }
    } else {
      if (ckpt_path.empty() || spec_path.empty() || o.env_id.empty()) {
        throw Error(ErrorCode::kInvalidConfig, "eval needs --run, or --checkpoint with --spec and --env");
      }
      env_config = env::EnvConfig::defaults(env::env_id_from_string(o.env_id));
    }
    if (!o.env_id.empty() && !o.run_dir.empty()) {
      env_config = env::EnvConfig::defaults(env::env_id_from_string(o.env_id));
    }
    const auto ckpt = rl::load_checkpoint(ckpt_path);
    const auto schema = env::make_env(env_config)->observation_schema();
    auto bound = reward::BoundSpec::bind(reward::parse_reward_spec(read_file(spec_path)), schema, env_config.horizon);
    if (ckpt.bundle.obs_dim() != static_cast<int>(schema.size())) {
      throw Error(ErrorCode::kCheckpointFormat, "checkpoint observation size does not match " +
                                                    std::string(env::to_string(env_config.env_id)));
    }
    const auto result = rl::evaluate(ckpt.bundle.policy, env_config, bound, o.episodes, o.seed, false,
                                     terminal_reward, terminate_on_success);
    json episodes = json::array();
    for (const auto& ep : result.episodes) {
      episodes.push_back({{"success", ep.success}, {"failure", ep.failure}, {"length", ep.length},
                          {"return", ep.episode_return}});
    }
    const json j = {{"env_id", std::string(env::to_string(env_config.env_id))},
                    {"seed", o.seed},
                    {"episodes", o.episodes},
                    {"success_rate", result.success_rate},
                    {"mean_return", result.mean_return},
                    {"per_episode", episodes}};
    ctx.out << "success_rate " << format_double(result.success_rate) << "\n" << j.dump() << "\n";
    return kExitOk;
  } catch (const Error& e) {
    return report(ctx, e);
  }
}

int cmd_audit(const std::filesystem::path& dir, CommandContext& ctx) {
  try {
    const auto episodes = read_breakdowns(dir / "breakdowns.jsonl");
    const auto audit = audit_episodes(episodes);
    write_file_atomic(dir / "audit.json", audit.to_json().dump(2) + "\n");
    ctx.out << audit.to_text();
    return kExitOk;
  } catch (const Error& e) {
    return report(ctx, e);
  }
}

int cmd_plot(const PlotOptions& o, CommandContext& ctx) {
  try {
    if (o.inputs.empty()) throw Error(ErrorCode::kInvalidConfig, "plot needs at least one run directory or CSV");
    if (o.out.empty()) throw Error(ErrorCode::kInvalidConfig, "--out is required");
    std::vector<Curve> curves;
    for (const auto& in : o.inputs) {
      const auto csv = std::filesystem::is_directory(in) ? in / "metrics.csv" : in;
      curves.push_back(success_curve(read_metrics_csv(csv)));
    }
    const auto stats = aggregate_percentiles(curves);
    if (o.out.has_parent_path()) std::filesystem::create_directories(o.out.parent_path());
    write_file_atomic(o.out, render_svg(stats, o.title));
    std::string table = "step,p25,median,p75\n";
    for (std::size_t i = 0; i < stats.steps.size(); ++i) {
      table += std::to_string(stats.steps[i]) + "," + format_double(stats.p25[i]) + "," +
               format_double(stats.median[i]) + "," + format_double(stats.p75[i]) + "\n";
    }
    auto table_path = o.out;
    table_path.replace_extension(".csv");
    write_file_atomic(table_path, table);
    ctx.out << "wrote " << o.out.string() << " and " << table_path.string() << " from " << curves.size()
            << " run(s)\n";
    return kExitOk;
  } catch (const Error& e) {
    return report(ctx, e);
  }
}

}  // namespace archie::harness

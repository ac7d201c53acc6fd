#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "archie/harness/commands.hpp"

namespace h = archie::harness;

int main(int argc, char** argv) {
  CLI::App app{"archie-lab: reward-spec generation, SAC training and analysis"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string data_dir = ARCHIE_DEFAULT_DATA_DIR;
  if (const char* env = std::getenv("ARCHIE_DATA_DIR")) data_dir = env;
  app.add_option("--data-dir", data_dir, "Directory holding tasks/, specs/ and fixtures/");

  h::GenerateOptions gen;
  std::string gen_out, gen_fixtures;
  auto* generate = app.add_subcommand("generate", "Generate a reward spec from a task description");
  generate->add_option("--task", gen.task, "Benchmark task id (grasp_lift, grasp_slide, place, push_cube)");
  generate->add_option("--task-text", gen.task_text, "Free-form task description");
  generate->add_option("--env", gen.env_id, "Environment id; defaults to the task's env");
  generate->add_option("--backend", gen.backend, "Completion backend")->check(CLI::IsMember({"live", "replay"}));
  generate->add_option("--fixtures", gen_fixtures, "Fixture directory");
  generate->add_option("--sample", gen.sample_index, "Sample index for repeated generations");
  generate->add_option("--out", gen_out, "Output .rsp path")->required();
  generate->add_option("--endpoint", gen.live.endpoint, "Live completion endpoint URL");
  generate->add_option("--model", gen.live.model, "Live model id");
  generate->add_option("--token-env", gen.live.token_env, "Environment variable holding the bearer token");

  std::string val_spec, val_env;
  auto* validate = app.add_subcommand("validate", "Validate a reward spec against an env schema");
  validate->add_option("--spec", val_spec, "Reward spec (.rsp)")->required();
  validate->add_option("--env", val_env, "Environment id")->required();

  std::string train_config, train_out, train_backend;
  bool truncation_done = false, no_resume = false;
  auto* train = app.add_subcommand("train", "Run a (reward x seed) training matrix");
  train->add_option("--config", train_config, "Experiment config (JSON)")->required();
  train->add_option("--out", train_out, "Override output directory");
  train->add_option("--backend", train_backend, "Override completion backend")->check(CLI::IsMember({"live", "replay"}));
  train->add_flag("--truncation-done", truncation_done, "Treat horizon truncation as terminal in replay");
  train->add_flag("--no-resume", no_resume, "Rerun runs that already completed");

  h::EvalOptions ev;
  std::string ev_run, ev_ckpt, ev_spec;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint with deterministic actions");
  eval->add_option("--run", ev_run, "Run directory (supplies checkpoint, spec and env)");
  eval->add_option("--checkpoint", ev_ckpt, "Checkpoint file");
  eval->add_option("--spec", ev_spec, "Reward spec (.rsp)");
  eval->add_option("--env", ev.env_id, "Environment id");
  eval->add_option("--seed", ev.seed, "Evaluation seed");
  eval->add_option("--episodes", ev.episodes, "Number of episodes")->check(CLI::PositiveNumber);

  std::string audit_run;
  auto* audit = app.add_subcommand("audit", "Monotonicity and dominance audit of a run's episodes");
  audit->add_option("--run", audit_run, "Run directory")->required();

  std::vector<std::string> plot_inputs;
  std::string plot_out;
  h::PlotOptions plot_opts;
  auto* plot = app.add_subcommand("plot", "Percentile success-rate curves as SVG");
  plot->add_option("inputs", plot_inputs, "Run directories or metrics CSVs");
  plot->add_option("--out", plot_out, "Output SVG path")->required();
  plot->add_option("--title", plot_opts.title, "Plot title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? h::kExitOk : h::kExitConfig;
  }

  h::CommandContext ctx{std::cout, std::cerr, data_dir};
  if (generate->parsed()) {
    gen.out = gen_out;
    gen.fixture_dir = gen_fixtures;
    return h::cmd_generate(gen, ctx);
  }
  if (validate->parsed()) return h::cmd_validate(val_spec, val_env, ctx);
  if (train->parsed()) {
    h::TrainOptions o;
    o.config = train_config;
    if (!train_out.empty()) o.out = train_out;
    if (!train_backend.empty()) o.backend = train_backend;
    o.truncation_done = truncation_done;
    o.resume = !no_resume;
    return h::cmd_train(o, ctx);
  }
  if (eval->parsed()) {
    ev.run_dir = ev_run;
    ev.checkpoint = ev_ckpt;
    ev.spec = ev_spec;
    return h::cmd_eval(ev, ctx);
  }
  if (audit->parsed()) return h::cmd_audit(audit_run, ctx);
  if (plot->parsed()) {
    for (const auto& p : plot_inputs) plot_opts.inputs.emplace_back(p);
    plot_opts.out = plot_out;
    return h::cmd_plot(plot_opts, ctx);
  }
  return h::kExitConfig;
}

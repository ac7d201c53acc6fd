// Rebuilds the replay fixture corpus from the hand-translated specs in
// <data>/specs: every benchmark task's prompt is rendered and paired with a
// response wrapping <task>.rsp (sample 0) and <task>_s<i>.rsp (sample i).
// Run after changing prompt wording, since fixture keys hash the prompt.

#include <iostream>

#include <CLI11.hpp>

#include "archie/common/error.hpp"
#include "archie/common/text.hpp"
#include "archie/llm/completion.hpp"
#include "archie/llm/prompt.hpp"
#include "archie/llm/tasks.hpp"

namespace fs = std::filesystem;
using namespace archie;

int main(int argc, char** argv) {
  CLI::App app{"Regenerate or check the replay fixture corpus"};
  std::string data_dir = ARCHIE_DEFAULT_DATA_DIR;
  bool check = false;
  app.add_option("--data-dir", data_dir, "Data directory");
  app.add_flag("--check", check, "Verify the corpus instead of writing it");
  CLI11_PARSE(app, argc, argv);

  const fs::path data(data_dir);
  const llm::FixtureStore store(data / "fixtures" / "llm");
  int problems = 0;
  try {
    for (const auto& task : llm::benchmark_tasks()) {
      const auto schema = env::make_env(env::EnvConfig::defaults(task.env))->observation_schema();
      const std::string prompt = llm::build_prompt(llm::load_task_text(task.id, data), schema);
      for (int i = 0;; ++i) {
        const fs::path spec = data / "specs" / (i == 0 ? task.id + ".rsp" : task.id + "_s" + std::to_string(i) + ".rsp");
        if (!fs::exists(spec)) break;
        llm::Fixture f;
        f.key = llm::fixture_key(prompt, i);
        f.prompt = prompt;
        f.response = "Here is the reward program for the task.\n\n```rsp\n" + read_file(spec) + "```\n";
        f.metadata = {{"model", "hand-translation"}, {"source", spec.filename().string()}, {"sample_index", i}};
        if (check) {
          const auto found = store.find(f.key);
          if (!found || found->response != f.response) {
            std::cerr << "stale or missing fixture for " << spec.filename().string() << " (" << f.key << ")\n";
            ++problems;
          }
        } else {
          store.put(f);
          std::cout << f.key << "  " << spec.filename().string() << "\n";
        }
      }
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 2;
  }
  return problems == 0 ? 0 : 1;
}

#pragma once

#include <string>
#include <string_view>

#include "archie/env/env.hpp"

namespace archie::llm {

struct PromptBlocks {
  std::string introduction;
  std::string task_description;
  // Language grammar, the observation variables, and the fixed assembly the
  // engine applies to every program.
  std::string coding_context;
  // Reward-design advice and a worked example.
  std::string rl_context;

  // The four blocks in order, separated by blank lines.
  std::string render() const;
};

// Reference description of the reward language, embedded in prompts.
std::string_view grammar_doc();

// One line per observation variable with its range and a short meaning.
std::string render_schema(const env::ObservationSchema& schema);

// Throws Error(kEmptyTask) when the task text is blank.
PromptBlocks build_prompt_blocks(std::string_view task_text, const env::ObservationSchema& schema,
                                 std::string_view grammar = grammar_doc());
std::string build_prompt(std::string_view task_text, const env::ObservationSchema& schema,
                         std::string_view grammar = grammar_doc());

}  // namespace archie::llm

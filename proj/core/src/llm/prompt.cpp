#include "archie/llm/prompt.hpp"

#include <algorithm>
#include <cctype>

#include "archie/common/error.hpp"
#include "archie/common/text.hpp"

namespace archie::llm {
namespace {

constexpr std::string_view kIntroduction =
    "You write reward programs for reinforcement-learning agents. An agent will be trained\n"
    "with the program you return, so it has to describe a dense reward that steers the\n"
    "agent to complete the task below, together with the conditions under which the task\n"
    "counts as solved or failed. Use only the observation variables listed later.";

constexpr std::string_view kGrammar =
    "Reward language\n"
    "  program    := component+ success failure?\n"
    "  component  := \"component\" NAME \":\" expr\n"
    "  success    := \"success\" \":\" expr\n"
    "  failure    := \"failure\" \":\" expr\n"
    "Expressions use numbers, observation variables, + - * and parentheses, the functions\n"
    "min(a, b), max(a, b), abs(a), clamp(a, lo, hi) and dist(p, q), comparisons\n"
    "< <= > >= (each yields 1 or 0), and the logical operators and, or, not.\n"
    "dist(p, q) is the Euclidean distance between two points. A point is either a group\n"
    "name such as agent, meaning (agent.x, agent.y), or a literal such as (0, 0).\n"
    "Comparisons do not chain. A # starts a comment that runs to the end of the line.\n"
    "Component names are plain identifiers without dots and must be unique.\n"
    "success and failure must be conditions: comparisons, logical combinations of\n"
    "them, or 0/1 flag variables.";

constexpr std::string_view kAssembly =
    "How the engine turns your program into a reward (applied automatically, do not\n"
    "write it yourself):\n"
    "  shaping  = sum of all component values\n"
    "  bonuses  = max(sum of the positive component values, 1)\n"
    "  terminal = 10 * T * bonuses if success holds in the next state, otherwise 0\n"
    "  reward   = shaping + terminal\n"
    "T is the episode length in steps. The name task_solved_reward is reserved for the\n"
    "terminal term; no component may use it. An episode ends when success or failure\n"
    "holds. Omit the failure line if the task has no failure condition.";

constexpr std::string_view kAdvice =
    "Guidelines for good reward programs:\n"
    "- Shape the reward so that progress toward the goal is always visible to the agent.\n"
    "- A partial-progress bonus (for instance for touching or holding an object) helps.\n"
    "- When a failure condition can end the episode early, prefer positive shaping terms\n"
    "  so the agent is not tempted to fail on purpose.\n"
    "- Keep the components on comparable scales; one term should not dwarf the others.\n"
    "- Negative distances are a simple way to reward approaching something.\n"
    "- Bonuses should keep growing, or at least not shrink, as the task progresses.\n"
    "- Penalties for undesired behaviour should be small next to the positive terms.";

constexpr std::string_view kExample =
    "Example for a different task (move a held ball above a shelf at height 0.8 without\n"
    "letting go):\n"
    "```rsp\n"
    "component approach_ball: -dist(agent, ball)\n"
    "component hold_bonus: holding\n"
    "component ball_height: ball.y\n"
    "success: ball.y > 0.8 and holding\n"
    "failure: not holding\n"
    "```";

constexpr std::string_view kAnswerFormat =
    "Answer with exactly one fenced code block tagged rsp that contains the whole program.";

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string_view grammar_doc() { return kGrammar; }

std::string render_schema(const env::ObservationSchema& schema) {
  std::string out = "Observation variables\n";
  for (const auto& e : schema.entries) {
    out += "  " + e.name + " in [" + format_double(e.lo) + ", " + format_double(e.hi) + "]";
    if (e.flag) out += " (flag)";
    if (!e.description.empty()) out += ": " + e.description;
    out += "\n";
  }
  return out;
}

PromptBlocks build_prompt_blocks(std::string_view task_text, const env::ObservationSchema& schema,
                                 std::string_view grammar) {
  if (blank(task_text)) throw Error(ErrorCode::kEmptyTask, "task description is empty");
  PromptBlocks b;
  b.introduction = std::string(kIntroduction);
  b.task_description = "Task\n" + trim(task_text);
  b.coding_context = std::string(grammar) + "\n\n" + render_schema(schema) + "\n" + std::string(kAssembly);
  b.rl_context = std::string(kAdvice) + "\n\n" + std::string(kExample) + "\n\n" + std::string(kAnswerFormat);
  return b;
}

std::string PromptBlocks::render() const {
  return introduction + "\n\n" + task_description + "\n\n" + coding_context + "\n\n" + rl_context + "\n";
}

std::string build_prompt(std::string_view task_text, const env::ObservationSchema& schema,
                         std::string_view grammar) {
  return build_prompt_blocks(task_text, schema, grammar).render();
}

}  // namespace archie::llm

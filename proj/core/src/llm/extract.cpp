#include "archie/llm/extract.hpp"

#include <optional>

#include "archie/common/error.hpp"

namespace archie::llm {
namespace {

struct Block {
  std::string tag;
  std::string body;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<Block> fenced_blocks(std::string_view text) {
  std::vector<Block> blocks;
  std::optional<Block> open;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    const std::string_view t = trim(line);
    if (t.starts_with("```")) {
      if (open) {
        if (trim(t.substr(3)).empty()) {
          blocks.push_back(std::move(*open));
          open.reset();
        } else {
          open->body += std::string(line) + "\n";
        }
      } else {
        open = Block{std::string(trim(t.substr(3))), {}};
      }
    } else if (open) {
      open->body += std::string(line) + "\n";
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  // An unterminated final fence still counts; models sometimes stop early.
  if (open) blocks.push_back(std::move(*open));
  return blocks;
}

}  // namespace

Extraction extract_spec(std::string_view response) {
  const auto blocks = fenced_blocks(response);
  const Block* tagged = nullptr;
  const Block* untagged = nullptr;
  std::size_t candidates = 0;
  for (const auto& b : blocks) {
    if (b.tag == "rsp") {
      ++candidates;
      if (!tagged) tagged = &b;
    } else if (b.tag.empty()) {
      ++candidates;
      if (!untagged) untagged = &b;
    }
  }
  const Block* pick = tagged ? tagged : untagged;
  if (!pick) throw Error(ErrorCode::kNoCodeBlock, "response contains no rsp or untagged code block");
  Extraction out;
  out.program = pick->body;
  if (candidates > 1) {
    out.warnings.push_back("response has " + std::to_string(candidates) +
                           " candidate code blocks; using the first" + (tagged ? " tagged rsp" : ""));
  }
  return out;
}

}  // namespace archie::llm

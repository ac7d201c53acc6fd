#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace archie::llm {

struct Extraction {
  std::string program;
  std::vector<std::string> warnings;
};

// Returns the body of the first ``` block tagged rsp, or failing that the first
// untagged block. Blocks tagged with another language are ignored. Warns when
// more than one candidate block is present. Throws Error(kNoCodeBlock).
Extraction extract_spec(std::string_view response);

}  // namespace archie::llm

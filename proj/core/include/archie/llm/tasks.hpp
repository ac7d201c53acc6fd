#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "archie/env/env.hpp"

namespace archie::llm {

struct TaskInfo {
  std::string id;
  env::EnvId env;
};

// The four benchmark tasks; their texts live in <data>/tasks/<id>.txt.
const std::vector<TaskInfo>& benchmark_tasks();
// Throws Error(kInvalidConfig) for an unknown id.
const TaskInfo& find_task(std::string_view id);
std::string load_task_text(std::string_view id, const std::filesystem::path& data_dir);

}  // namespace archie::llm

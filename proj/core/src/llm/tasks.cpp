#include "archie/llm/tasks.hpp"

#include "archie/common/error.hpp"
#include "archie/common/text.hpp"

namespace archie::llm {

const std::vector<TaskInfo>& benchmark_tasks() {
  static const std::vector<TaskInfo> tasks = {
      {"grasp_lift", env::EnvId::kGraspLift2D},
      {"grasp_slide", env::EnvId::kGraspSlide2D},
      {"place", env::EnvId::kPlace2D},
      {"push_cube", env::EnvId::kNarrowTablePush},
  };
  return tasks;
}

const TaskInfo& find_task(std::string_view id) {
  for (const auto& t : benchmark_tasks()) {
    if (t.id == id) return t;
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown task '" + std::string(id) + "'");
}

std::string load_task_text(std::string_view id, const std::filesystem::path& data_dir) {
  find_task(id);
  return read_file(data_dir / "tasks" / (std::string(id) + ".txt"));
}

}  // namespace archie::llm

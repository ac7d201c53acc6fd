#include "archie/common/error.hpp"
#include "archie/common/text.hpp"
#include "archie/env/env.hpp"
#include "archie/llm/completion.hpp"
#include "archie/llm/prompt.hpp"
#include "archie/llm/tasks.hpp"
#include "helpers.hpp"

namespace archie::llm {
namespace {

env::ObservationSchema schema_of(env::EnvId id) {
  return env::make_env(env::EnvConfig::defaults(id))->observation_schema();
}

TEST(Prompt, ContainsTaskTextVerbatim) {
  const auto text = load_task_text("grasp_lift", test::data_dir());
  const auto prompt = build_prompt(text, schema_of(env::EnvId::kGraspLift2D));
  EXPECT_NE(prompt.find("Consider the task solved when the cube is at 0.5 height"), std::string::npos);
}

TEST(Prompt, BlocksAppearInOrder) {
  const auto schema = schema_of(env::EnvId::kNarrowTablePush);
  const auto blocks = build_prompt_blocks(load_task_text("push_cube", test::data_dir()), schema);
  const auto prompt = blocks.render();
  for (const auto* b : {&blocks.introduction, &blocks.task_description, &blocks.coding_context, &blocks.rl_context}) {
    ASSERT_FALSE(b->empty());
  }
  const auto a = prompt.find(blocks.introduction);
  const auto b = prompt.find(blocks.task_description);
  const auto c = prompt.find(blocks.coding_context);
  const auto d = prompt.find(blocks.rl_context);
  ASSERT_NE(d, std::string::npos);
  EXPECT_LT(a, b);
  EXPECT_LT(b, c);
  EXPECT_LT(c, d);
  EXPECT_EQ(prompt, build_prompt(load_task_text("push_cube", test::data_dir()), schema));
}

TEST(Prompt, CodingContextListsEveryVariable) {
  const auto schema = schema_of(env::EnvId::kNarrowTablePush);
  const auto blocks = build_prompt_blocks("Push the cube.", schema);
  for (const auto& name : schema.names()) {
    EXPECT_NE(blocks.coding_context.find(name), std::string::npos) << name;
  }
  EXPECT_NE(blocks.coding_context.find(std::string(grammar_doc())), std::string::npos);
}

TEST(Prompt, RejectsEmptyTask) {
  const auto schema = schema_of(env::EnvId::kGraspLift2D);
  EXPECT_THROW_CODE(build_prompt("", schema), ErrorCode::kEmptyTask);
  EXPECT_THROW_CODE(build_prompt(" \n\t ", schema), ErrorCode::kEmptyTask);
}

TEST(Prompt, TaskChangesOnlyTaskBlock) {
  const auto schema = schema_of(env::EnvId::kGraspLift2D);
  const auto a = build_prompt_blocks("Lift the cube.", schema);
  const auto b = build_prompt_blocks("Slide the cube.", schema);
  EXPECT_EQ(a.introduction, b.introduction);
  EXPECT_EQ(a.coding_context, b.coding_context);
  EXPECT_EQ(a.rl_context, b.rl_context);
  EXPECT_NE(a.task_description, b.task_description);
}

TEST(Tasks, Registry) {
  EXPECT_EQ(benchmark_tasks().size(), 4u);
  EXPECT_EQ(find_task("push_cube").env, env::EnvId::kNarrowTablePush);
  EXPECT_EQ(find_task("grasp_slide").env, env::EnvId::kGraspSlide2D);
  EXPECT_THROW_CODE(find_task("nope"), ErrorCode::kInvalidConfig);
}

// Shipped fixtures are keyed by these prompts; any prompt drift changes the
// key and is caught here.
TEST(Prompt, ShippedFixtureKeysAreStable) {
  const std::vector<std::pair<std::string, std::string>> expected = {
      {"grasp_lift", "0a61454f5dc1dd3cee69dc54e92ddc774f53caab6249b01125ebed705d43077f"},
      {"grasp_slide", "a9a0c579a9c5ff98d79c81ea3fb6374685b5ec5c1c85735e41dd33203df53fbc"},
      {"place", "3f3cb6bc39d88953d832124f9e5a9a5811e2d5d4fe0824aa2291fe8aa19ab839"},
      {"push_cube", "2ae1ad2726e0a75067a52282e43e0745819b6208f3c1449436b4be1cdd718dd4"},
  };
  for (const auto& [task, key] : expected) {
    const auto prompt = build_prompt(load_task_text(task, test::data_dir()), schema_of(find_task(task).env));
    EXPECT_EQ(fixture_key(prompt), key) << task;
    EXPECT_EQ(fixture_key(prompt), sha256_hex(prompt));
  }
}

TEST(Fixture, SampleIndexKey) {
  EXPECT_EQ(fixture_key("abc", 0), sha256_hex("abc"));
  EXPECT_EQ(fixture_key("abc", 2), sha256_hex("abc\n#sample=2"));
  EXPECT_NE(fixture_key("abc", 1), fixture_key("abc", 2));
}

}  // namespace
}  // namespace archie::llm

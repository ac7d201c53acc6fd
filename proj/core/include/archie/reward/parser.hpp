#pragma once

#include <string_view>

#include "archie/reward/ast.hpp"

namespace archie::reward {

// Parses a reward program:
//
//   spec      := component* success failure?
//   component := "component" IDENT ":" expr
//   success   := "success" ":" expr
//   failure   := "failure" ":" expr
//
// Expressions support + - * (unary minus included), parentheses, min(e,e),
// max(e,e), abs(e), clamp(e,lo,hi), dist(p,p), comparisons < <= > >= yielding
// 0/1, and `and` / `or` / `not`. A dist() operand is a dotted group name or a
// literal point such as (0, 0). `#` starts a comment running to end of line.
//
// Throws ParseError with codes kSyntax, kDuplicateComponent or
// kMissingSuccess. The returned spec has horizon 0.
RewardSpec parse_reward_spec(std::string_view text);

// Parses a single expression (used by tests and tooling).
Expr parse_expr(std::string_view text);

// True if `name` is a legal dotted identifier in the reward language.
bool is_identifier(std::string_view name);

}  // namespace archie::reward

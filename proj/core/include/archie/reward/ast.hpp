#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace archie::reward {

enum class NodeKind {
  kConst,
  kVar,
  kNeg,
  kAdd,
  kSub,
  kMul,
  kMin,
  kMax,
  kAbs,
  kClamp,
  kDist,
  kCmp,
  kAnd,
  kOr,
  kNot,
};

enum class CmpOp { kLt, kLe, kGt, kGe };

// Operand of dist(): either a named coordinate group such as `agent`, which
// resolves to agent.x / agent.y / agent.z in the schema, or a literal point.
struct PointRef {
  std::string group;
  std::vector<double> coords;

  bool is_literal() const { return group.empty(); }
  friend bool operator==(const PointRef&, const PointRef&) = default;
};

struct Expr {
  NodeKind kind = NodeKind::kConst;
  double value = 0.0;          // kConst
  std::string name;            // kVar
  CmpOp op = CmpOp::kLt;       // kCmp
  std::vector<Expr> children;  // operands, left to right
  std::vector<PointRef> points;  // kDist: exactly two

  static Expr constant(double v);
  static Expr var(std::string name);
  static Expr unary(NodeKind kind, Expr operand);
  static Expr binary(NodeKind kind, Expr lhs, Expr rhs);
  static Expr compare(CmpOp op, Expr lhs, Expr rhs);
  static Expr clamp(Expr value, Expr lo, Expr hi);
  static Expr dist(PointRef a, PointRef b);

  friend bool operator==(const Expr&, const Expr&) = default;
};

struct RewardComponent {
  std::string name;
  Expr expr;

  friend bool operator==(const RewardComponent&, const RewardComponent&) = default;
};

struct Classifier {
  Expr expr;

  friend bool operator==(const Classifier&, const Classifier&) = default;
};

// Name under which the assembled terminal bonus is reported. Components may
// neither use nor reference it.
inline constexpr std::string_view kReservedTerminalName = "task_solved_reward";

struct RewardSpec {
  std::vector<RewardComponent> components;
  Classifier success;
  std::optional<Classifier> failure;
  // Episode length T used by the terminal bonus. The program text does not
  // carry it; it is filled in from the environment when the spec is bound.
  int horizon = 0;

  std::vector<std::string> component_names() const;
  friend bool operator==(const RewardSpec&, const RewardSpec&) = default;
};

std::string_view to_string(CmpOp op);

// Canonical program text. Re-parsing it yields a structurally identical spec
// (horizon excepted).
std::string serialize(const RewardSpec& spec);
std::string serialize(const Expr& expr);

}  // namespace archie::reward

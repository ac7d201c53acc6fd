#include "archie/reward/ast.hpp"

#include <cmath>

#include "archie/common/text.hpp"

namespace archie::reward {
namespace {

// Binding strength, loosest first. Mirrors the parser's grammar levels.
enum Prec : int {
  kPrecOr = 1,
  kPrecAnd = 2,
  kPrecNot = 3,
  kPrecCmp = 4,
  kPrecAdd = 5,
  kPrecMul = 6,
  kPrecUnary = 7,
  kPrecAtom = 8,
};

int precedence(const Expr& e) {
  switch (e.kind) {
    case NodeKind::kOr: return kPrecOr;
    case NodeKind::kAnd: return kPrecAnd;
    case NodeKind::kNot: return kPrecNot;
    case NodeKind::kCmp: return kPrecCmp;
    case NodeKind::kAdd:
    case NodeKind::kSub: return kPrecAdd;
    case NodeKind::kMul: return kPrecMul;
    case NodeKind::kNeg: return kPrecUnary;
    default: return kPrecAtom;
  }
}

std::string number(double v) {
  if (std::isinf(v)) return v > 0 ? "1e999" : "-1e999";
  return format_double(v);
}

std::string point(const PointRef& p) {
  if (!p.is_literal()) return p.group;
  std::string out = "(";
  for (std::size_t i = 0; i < p.coords.size(); ++i) {
    if (i) out += ", ";
    out += number(p.coords[i]);
  }
  return out + ")";
}

void emit(const Expr& e, int min_prec, std::string& out);

void emit_call(const char* fn, const Expr& e, std::string& out) {
  out += fn;
  out += '(';
  for (std::size_t i = 0; i < e.children.size(); ++i) {
    if (i) out += ", ";
    emit(e.children[i], 0, out);
  }
  out += ')';
}

void emit_binary(const char* op, const Expr& e, int left_prec, int right_prec, std::string& out) {
  emit(e.children[0], left_prec, out);
  out += op;
  emit(e.children[1], right_prec, out);
}

void emit(const Expr& e, int min_prec, std::string& out) {
  const int prec = precedence(e);
  const bool parens = prec < min_prec;
  if (parens) out += '(';
  switch (e.kind) {
    case NodeKind::kConst: out += number(e.value); break;
    case NodeKind::kVar: out += e.name; break;
    case NodeKind::kNeg:
      out += '-';
      emit(e.children[0], kPrecUnary, out);
      break;
    case NodeKind::kNot:
      out += "not ";
      emit(e.children[0], kPrecNot, out);
      break;
    case NodeKind::kAdd: emit_binary(" + ", e, kPrecAdd, kPrecAdd + 1, out); break;
    case NodeKind::kSub: emit_binary(" - ", e, kPrecAdd, kPrecAdd + 1, out); break;
    case NodeKind::kMul: emit_binary(" * ", e, kPrecMul, kPrecMul + 1, out); break;
    case NodeKind::kAnd: emit_binary(" and ", e, kPrecAnd, kPrecAnd + 1, out); break;
    case NodeKind::kOr: emit_binary(" or ", e, kPrecOr, kPrecOr + 1, out); break;
    case NodeKind::kCmp: {
      std::string op = " ";
      op += to_string(e.op);
      op += ' ';
      emit_binary(op.c_str(), e, kPrecAdd, kPrecAdd, out);
      break;
    }
    case NodeKind::kMin: emit_call("min", e, out); break;
    case NodeKind::kMax: emit_call("max", e, out); break;
    case NodeKind::kAbs: emit_call("abs", e, out); break;
    case NodeKind::kClamp: emit_call("clamp", e, out); break;
    case NodeKind::kDist:
      out += "dist(" + point(e.points[0]) + ", " + point(e.points[1]) + ")";
      break;
  }
  if (parens) out += ')';
}

}  // namespace

Expr Expr::constant(double v) {
  Expr e;
  e.kind = NodeKind::kConst;
  e.value = v;
  return e;
}

Expr Expr::var(std::string name) {
  Expr e;
  e.kind = NodeKind::kVar;
  e.name = std::move(name);
  return e;
}

Expr Expr::unary(NodeKind kind, Expr operand) {
  Expr e;
  e.kind = kind;
  e.children.push_back(std::move(operand));
  return e;
}

Expr Expr::binary(NodeKind kind, Expr lhs, Expr rhs) {
  Expr e;
  e.kind = kind;
  e.children.push_back(std::move(lhs));
  e.children.push_back(std::move(rhs));
  return e;
}

Expr Expr::compare(CmpOp op, Expr lhs, Expr rhs) {
  Expr e = binary(NodeKind::kCmp, std::move(lhs), std::move(rhs));
  e.op = op;
  return e;
}

Expr Expr::clamp(Expr value, Expr lo, Expr hi) {
  Expr e;
  e.kind = NodeKind::kClamp;
  e.children.push_back(std::move(value));
  e.children.push_back(std::move(lo));
  e.children.push_back(std::move(hi));
  return e;
}

Expr Expr::dist(PointRef a, PointRef b) {
  Expr e;
  e.kind = NodeKind::kDist;
  e.points.push_back(std::move(a));
  e.points.push_back(std::move(b));
  return e;
}

std::vector<std::string> RewardSpec::component_names() const {
  std::vector<std::string> names;
  names.reserve(components.size());
  for (const auto& c : components) names.push_back(c.name);
  return names;
}

std::string_view to_string(CmpOp op) {
  switch (op) {
    case CmpOp::kLt: return "<";
    case CmpOp::kLe: return "<=";
    case CmpOp::kGt: return ">";
    case CmpOp::kGe: return ">=";
  }
  return "?";
}

std::string serialize(const Expr& expr) {
  std::string out;
  emit(expr, 0, out);
  return out;
}

std::string serialize(const RewardSpec& spec) {
  std::string out;
  for (const auto& c : spec.components) {
    out += "component " + c.name + ": " + serialize(c.expr) + "\n";
  }
  out += "success: " + serialize(spec.success.expr) + "\n";
  if (spec.failure) out += "failure: " + serialize(spec.failure->expr) + "\n";
  return out;
}

}  // namespace archie::reward

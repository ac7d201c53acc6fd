#include "archie/reward/evaluator.hpp"

#include <algorithm>
#include <cmath>

#include "archie/common/error.hpp"

namespace archie::reward {
namespace {

constexpr std::string_view kAxisNames[] = {"x", "y", "z"};

// Schema indices of group.x / group.y / group.z, in that order, for the axes
// that exist.
std::vector<std::size_t> group_axes(const std::string& group, const env::ObservationSchema& schema) {
  std::vector<std::size_t> out;
  for (auto axis : kAxisNames) {
    if (auto idx = schema.index_of(group + "." + std::string(axis))) out.push_back(*idx);
  }
  return out;
}

bool is_reserved_ref(const std::string& name) { return name == kReservedTerminalName; }

class Validator {
 public:
  Validator(const env::ObservationSchema& schema, ValidationReport& report)
      : schema_(schema), report_(report) {}

  void check(const Expr& e, const std::string& where) {
    switch (e.kind) {
      case NodeKind::kConst:
        if (!std::isfinite(e.value)) add(IssueCode::kNonFiniteConstant, where, "constant is not finite");
        break;
      case NodeKind::kVar:
        if (is_reserved_ref(e.name)) {
          add(IssueCode::kReservedName, where, "references the terminal term '" + e.name + "'");
        } else if (!schema_.index_of(e.name)) {
          add(IssueCode::kUnknownVariable, where, "unknown variable '" + e.name + "'");
        }
        break;
      case NodeKind::kDist: check_dist(e, where); break;
      default:
        for (const auto& c : e.children) check(c, where);
    }
  }

 private:
  void check_dist(const Expr& e, const std::string& where) {
    std::size_t dims[2] = {0, 0};
    for (int i = 0; i < 2; ++i) {
      const PointRef& p = e.points[i];
      if (p.is_literal()) {
        for (double v : p.coords) {
          if (!std::isfinite(v)) add(IssueCode::kNonFiniteConstant, where, "point coordinate is not finite");
        }
        dims[i] = p.coords.size();
      } else {
        dims[i] = group_axes(p.group, schema_).size();
        if (dims[i] == 0) {
          add(IssueCode::kUnknownVariable, where, "group '" + p.group + "' has no .x/.y/.z variables");
          return;
        }
      }
    }
    if (dims[0] != dims[1]) {
      add(IssueCode::kDimensionMismatch, where,
          "dist operands have " + std::to_string(dims[0]) + " and " + std::to_string(dims[1]) +
              " coordinates");
    }
  }

  void add(IssueCode code, const std::string& where, std::string message) {
    report_.issues.push_back({code, where, std::move(message)});
  }

  const env::ObservationSchema& schema_;
  ValidationReport& report_;
};

bool is_flag_var(const Expr& e, const env::ObservationSchema& schema) {
  auto idx = schema.index_of(e.name);
  return idx && schema.entries[*idx].flag;
}

}  // namespace

std::string_view to_string(IssueCode code) {
  switch (code) {
    case IssueCode::kUnknownVariable: return "UnknownVariable";
    case IssueCode::kNonBooleanClassifier: return "NonBooleanClassifier";
    case IssueCode::kReservedName: return "ReservedName";
    case IssueCode::kNonFiniteConstant: return "NonFiniteConstant";
    case IssueCode::kDimensionMismatch: return "DimensionMismatch";
  }
  return "Unknown";
}

bool ValidationReport::has(IssueCode code) const {
  return std::any_of(issues.begin(), issues.end(), [&](const auto& i) { return i.code == code; });
}

std::string ValidationReport::to_text() const {
  std::string out;
  for (const auto& i : issues) {
    out += std::string(to_string(i.code)) + " in " + i.where + ": " + i.message + "\n";
  }
  return out;
}

bool is_boolean_valued(const Expr& e, const env::ObservationSchema& schema) {
  switch (e.kind) {
    case NodeKind::kCmp:
    case NodeKind::kAnd:
    case NodeKind::kOr:
    case NodeKind::kNot: return true;
    case NodeKind::kConst: return e.value == 0.0 || e.value == 1.0;
    case NodeKind::kVar: return is_flag_var(e, schema);
    case NodeKind::kMin:
    case NodeKind::kMax:
    case NodeKind::kMul:
      return std::all_of(e.children.begin(), e.children.end(),
                         [&](const Expr& c) { return is_boolean_valued(c, schema); });
    default: return false;
  }
}

ValidationReport validate_spec(const RewardSpec& spec, const env::ObservationSchema& schema) {
  ValidationReport report;
  Validator v(schema, report);
  for (const auto& c : spec.components) {
    const std::string where = "component " + c.name;
    if (c.name == kReservedTerminalName) {
      report.issues.push_back({IssueCode::kReservedName, where, "component name is reserved"});
    }
    v.check(c.expr, where);
  }
  v.check(spec.success.expr, "success");
  if (!is_boolean_valued(spec.success.expr, schema)) {
    report.issues.push_back({IssueCode::kNonBooleanClassifier, "success", "root is not boolean-valued"});
  }
  if (spec.failure) {
    v.check(spec.failure->expr, "failure");
    if (!is_boolean_valued(spec.failure->expr, schema)) {
      report.issues.push_back({IssueCode::kNonBooleanClassifier, "failure", "root is not boolean-valued"});
    }
  }
  return report;
}

CompiledExpr::CompiledExpr(const Expr& expr, const env::ObservationSchema& schema) {
  compile(expr, schema, 1);
}

void CompiledExpr::compile(const Expr& e, const env::ObservationSchema& schema, int depth) {
  max_depth_ = std::max(max_depth_, depth);
  // Children occupy consecutive stack slots starting at `depth`.
  for (std::size_t i = 0; i < e.children.size(); ++i) {
    compile(e.children[i], schema, depth + static_cast<int>(i));
  }
  Instr in{};
  switch (e.kind) {
    case NodeKind::kConst:
      in.op = Op::kConst;
      in.value = e.value;
      break;
    case NodeKind::kVar: {
      auto idx = schema.index_of(e.name);
      if (!idx) throw Error(ErrorCode::kUnboundSpec, "unknown variable '" + e.name + "'");
      in.op = Op::kVar;
      in.arg = static_cast<int>(*idx);
      break;
    }
    case NodeKind::kNeg: in.op = Op::kNeg; break;
    case NodeKind::kAdd: in.op = Op::kAdd; break;
    case NodeKind::kSub: in.op = Op::kSub; break;
    case NodeKind::kMul: in.op = Op::kMul; break;
    case NodeKind::kMin: in.op = Op::kMin; break;
    case NodeKind::kMax: in.op = Op::kMax; break;
    case NodeKind::kAbs: in.op = Op::kAbs; break;
    case NodeKind::kClamp: in.op = Op::kClamp; break;
    case NodeKind::kAnd: in.op = Op::kAnd; break;
    case NodeKind::kOr: in.op = Op::kOr; break;
    case NodeKind::kNot: in.op = Op::kNot; break;
    case NodeKind::kCmp:
      switch (e.op) {
        case CmpOp::kLt: in.op = Op::kLt; break;
        case CmpOp::kLe: in.op = Op::kLe; break;
        case CmpOp::kGt: in.op = Op::kGt; break;
        case CmpOp::kGe: in.op = Op::kGe; break;
      }
      break;
    case NodeKind::kDist: {
      in.op = Op::kDist;
      in.arg = static_cast<int>(axes_.size());
      std::vector<std::size_t> idx[2];
      for (int i = 0; i < 2; ++i) {
        if (!e.points[i].is_literal()) idx[i] = group_axes(e.points[i].group, schema);
      }
      const auto dim_of = [&](int i) {
        return e.points[i].is_literal() ? e.points[i].coords.size() : idx[i].size();
      };
      if (dim_of(0) != dim_of(1) || dim_of(0) == 0) {
        throw Error(ErrorCode::kUnboundSpec, "dist operands do not match");
      }
      for (std::size_t k = 0; k < dim_of(0); ++k) {
        Axis ax{-1, 0.0, -1, 0.0};
        if (e.points[0].is_literal()) ax.a_value = e.points[0].coords[k];
        else ax.a_index = static_cast<int>(idx[0][k]);
        if (e.points[1].is_literal()) ax.b_value = e.points[1].coords[k];
        else ax.b_index = static_cast<int>(idx[1][k]);
        axes_.push_back(ax);
      }
      in.count = static_cast<int>(dim_of(0));
      break;
    }
  }
  code_.push_back(in);
}

double CompiledExpr::eval(std::span<const double> obs) const {
  // Depth is bounded by the expression tree; 64 covers any realistic program
  // without a heap allocation.
  double small[64] = {};
  std::vector<double> big;
  double* st = small;
  if (max_depth_ > 64) {
    big.resize(static_cast<std::size_t>(max_depth_));
    st = big.data();
  }
  int sp = 0;
  const auto truth = [](double v) { return v != 0.0 ? 1.0 : 0.0; };
  for (const Instr& in : code_) {
    switch (in.op) {
      case Op::kConst: st[sp++] = in.value; break;
      case Op::kVar: st[sp++] = obs[static_cast<std::size_t>(in.arg)]; break;
      case Op::kNeg: st[sp - 1] = -st[sp - 1]; break;
      case Op::kAbs: st[sp - 1] = std::abs(st[sp - 1]); break;
      case Op::kNot: st[sp - 1] = st[sp - 1] != 0.0 ? 0.0 : 1.0; break;
      case Op::kAdd: --sp; st[sp - 1] = st[sp - 1] + st[sp]; break;
      case Op::kSub: --sp; st[sp - 1] = st[sp - 1] - st[sp]; break;
      case Op::kMul: --sp; st[sp - 1] = st[sp - 1] * st[sp]; break;
      case Op::kMin: --sp; st[sp - 1] = std::min(st[sp - 1], st[sp]); break;
      case Op::kMax: --sp; st[sp - 1] = std::max(st[sp - 1], st[sp]); break;
      case Op::kLt: --sp; st[sp - 1] = st[sp - 1] < st[sp] ? 1.0 : 0.0; break;
      case Op::kLe: --sp; st[sp - 1] = st[sp - 1] <= st[sp] ? 1.0 : 0.0; break;
      case Op::kGt: --sp; st[sp - 1] = st[sp - 1] > st[sp] ? 1.0 : 0.0; break;
      case Op::kGe: --sp; st[sp - 1] = st[sp - 1] >= st[sp] ? 1.0 : 0.0; break;
      case Op::kAnd: --sp; st[sp - 1] = truth(st[sp - 1]) * truth(st[sp]); break;
      case Op::kOr: --sp; st[sp - 1] = std::max(truth(st[sp - 1]), truth(st[sp])); break;
      case Op::kClamp:
        sp -= 2;
        st[sp - 1] = std::min(std::max(st[sp - 1], st[sp]), st[sp + 1]);
        break;
      case Op::kDist: {
        double sq = 0.0;
        for (int k = 0; k < in.count; ++k) {
          const Axis& ax = axes_[static_cast<std::size_t>(in.arg + k)];
          const double a = ax.a_index >= 0 ? obs[static_cast<std::size_t>(ax.a_index)] : ax.a_value;
          const double b = ax.b_index >= 0 ? obs[static_cast<std::size_t>(ax.b_index)] : ax.b_value;
          sq += (a - b) * (a - b);
        }
        st[sp++] = std::sqrt(sq);
        break;
      }
    }
  }
  return st[0];
}

BoundSpec BoundSpec::bind(RewardSpec spec, const env::ObservationSchema& schema, int horizon) {
  if (horizon < 1) throw Error(ErrorCode::kInvalidConfig, "horizon must be >= 1");
  if (spec.components.empty()) throw Error(ErrorCode::kUnboundSpec, "spec has no components");
  auto report = validate_spec(spec, schema);
  if (!report.ok()) throw Error(ErrorCode::kUnboundSpec, "spec does not validate:\n" + report.to_text());
  BoundSpec b;
  spec.horizon = horizon;
  b.schema_ = schema;
  for (const auto& c : spec.components) {
    b.names_.push_back(c.name);
    b.components_.emplace_back(c.expr, schema);
  }
  b.success_ = CompiledExpr(spec.success.expr, schema);
  if (spec.failure) b.failure_.emplace(spec.failure->expr, schema);
  b.spec_ = std::move(spec);
  return b;
}

void BoundSpec::eval_components(std::span<const double> obs, std::span<double> out) const {
  if (obs.size() != schema_.size() || out.size() != components_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "observation or output size does not match the bound spec");
  }
  for (std::size_t k = 0; k < components_.size(); ++k) {
    out[k] = components_[k].eval(obs);
    if (!std::isfinite(out[k])) {
      throw Error(ErrorCode::kNonFinite, "component '" + names_[k] + "' evaluated to a non-finite value");
    }
  }
}

std::vector<double> BoundSpec::eval_components(const env::Observation& obs) const {
  std::vector<double> out(components_.size());
  eval_components(obs.values, out);
  return out;
}

bool BoundSpec::success(std::span<const double> obs) const { return success_.eval(obs) != 0.0; }

bool BoundSpec::failure(std::span<const double> obs) const {
  return failure_ && failure_->eval(obs) != 0.0;
}

std::vector<double> eval_components(const BoundSpec& spec, const env::Observation& obs) {
  return spec.eval_components(obs);
}

int eval_classifier(const Classifier& classifier, const env::ObservationSchema& schema,
                    const env::Observation& obs) {
  CompiledExpr compiled(classifier.expr, schema);
  return compiled.eval(obs.values) != 0.0 ? 1 : 0;
}

}  // namespace archie::reward

#pragma once

#include <span>
#include <string>
#include <vector>

#include "archie/env/env.hpp"
#include "archie/reward/ast.hpp"

namespace archie::reward {

enum class IssueCode {
  kUnknownVariable,
  kNonBooleanClassifier,
  kReservedName,
  kNonFiniteConstant,
  kDimensionMismatch,
};

std::string_view to_string(IssueCode code);

struct ValidationIssue {
  IssueCode code;
  std::string where;  // e.g. "component dist", "success"
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const { return issues.empty(); }
  bool has(IssueCode code) const;
  std::string to_text() const;
};

// Static checks only; never evaluates anything.
ValidationReport validate_spec(const RewardSpec& spec, const env::ObservationSchema& schema);

// True when the expression's root is guaranteed to produce 0 or 1.
bool is_boolean_valued(const Expr& expr, const env::ObservationSchema& schema);

// An expression compiled to a small stack program with variables resolved to
// observation indices.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  // Assumes `expr` passed validation against `schema`.
  CompiledExpr(const Expr& expr, const env::ObservationSchema& schema);

  double eval(std::span<const double> obs) const;

 private:
  enum class Op : unsigned char {
    kConst, kVar, kNeg, kAdd, kSub, kMul, kMin, kMax, kAbs, kClamp,
    kLt, kLe, kGt, kGe, kAnd, kOr, kNot, kDist,
  };
  struct Instr {
    Op op;
    int arg = 0;    // variable index, or first dist axis
    int count = 0;  // number of dist axes
    double value = 0.0;
  };
  // One axis of a dist(): each side is a variable index or, if negative, a
  // literal coordinate.
  struct Axis {
    int a_index;
    double a_value;
    int b_index;
    double b_value;
  };

  void compile(const Expr& e, const env::ObservationSchema& schema, int depth);

  std::vector<Instr> code_;
  std::vector<Axis> axes_;
  int max_depth_ = 0;
};

// A validated spec bound to an observation schema and horizon; immutable and
// safe to share across threads.
class BoundSpec {
 public:
  // Throws Error(kUnboundSpec) carrying the validation report when the spec
  // does not validate, and Error(kInvalidConfig) when horizon < 1.
  static BoundSpec bind(RewardSpec spec, const env::ObservationSchema& schema, int horizon);

  const RewardSpec& spec() const { return spec_; }
  const env::ObservationSchema& schema() const { return schema_; }
  int horizon() const { return spec_.horizon; }
  std::size_t num_components() const { return components_.size(); }
  const std::vector<std::string>& component_names() const { return names_; }
  bool has_failure() const { return failure_.has_value(); }

  // Writes one value per component; throws Error(kNonFinite) naming the
  // offending component.
  void eval_components(std::span<const double> obs, std::span<double> out) const;
  std::vector<double> eval_components(const env::Observation& obs) const;

  bool success(std::span<const double> obs) const;
  bool failure(std::span<const double> obs) const;

 private:
  RewardSpec spec_;
  env::ObservationSchema schema_;
  std::vector<std::string> names_;
  std::vector<CompiledExpr> components_;
  CompiledExpr success_;
  std::optional<CompiledExpr> failure_;
};

std::vector<double> eval_components(const BoundSpec& spec, const env::Observation& obs);

// Evaluates a classifier; the result is exactly 0 or 1.
int eval_classifier(const Classifier& classifier, const env::ObservationSchema& schema,
                    const env::Observation& obs);

}  // namespace archie::reward

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cex/core/value.hpp"

namespace cex {

/// Equation body AST. Variables are referenced by name; resolution against a
/// signature happens when the model is built. Boolean connectives treat any
/// nonzero integer as true and yield 0/1; arithmetic requires integers.
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Op {
    Const,  // value
    Var,    // name
    Eq, Ne,
    Not,
    And, Or,
    Ite,    // args[0] ? args[1] : args[2]
    Add, Sub,
    Min, Max,
  };

  Op op;
  Value constant;              // Op::Const
  std::string var;             // Op::Var
  std::vector<ExprPtr> args;

  static ExprPtr make_const(Value v);
  static ExprPtr make_var(std::string name);
  static ExprPtr make(Op op, std::vector<ExprPtr> args);
};

/// Distinct referenced variable names, in first-appearance order.
std::vector<std::string> expr_variables(const Expr& e);

/// Evaluates with `lookup` supplying variable values by name.
using VarLookup = std::function<const Value&(const std::string&)>;
Value eval_expr(const Expr& e, const VarLookup& lookup);

/// Renders the canonical surface form (used by the serializer).
std::string expr_str(const Expr& e);

}  // namespace cex

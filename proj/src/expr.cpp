#include "cex/core/expr.hpp"

#include <algorithm>

#include "cex/core/error.hpp"

namespace cex {

ExprPtr Expr::make_const(Value v) {
  auto e = std::make_shared<Expr>();
  e->op = Op::Const;
  e->constant = std::move(v);
  return e;
}

ExprPtr Expr::make_var(std::string name) {
  auto e = std::make_shared<Expr>();
  e->op = Op::Var;
  e->var = std::move(name);
  return e;
}

ExprPtr Expr::make(Op op, std::vector<ExprPtr> args) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->args = std::move(args);
  return e;
}

namespace {

void collect_vars(const Expr& e, std::vector<std::string>& out) {
  if (e.op == Expr::Op::Var) {
    if (std::find(out.begin(), out.end(), e.var) == out.end()) out.push_back(e.var);
    return;
  }
  for (const auto& a : e.args) collect_vars(*a, out);
}

std::int64_t as_int(const Value& v, const char* what) {
  if (!std::holds_alternative<std::int64_t>(v))
    fail(ErrorCode::InvalidArgument,
         std::string(what) + " requires an integer operand, got symbol '" + value_str(v) + "'");
  return std::get<std::int64_t>(v);
}

bool truthy(const Value& v) { return as_int(v, "boolean context") != 0; }

Value bool_value(bool b) { return Value{std::int64_t{b ? 1 : 0}}; }

}  // namespace

std::vector<std::string> expr_variables(const Expr& e) {
  std::vector<std::string> out;
  collect_vars(e, out);
  return out;
}

Value eval_expr(const Expr& e, const VarLookup& lookup) {
  using Op = Expr::Op;
  switch (e.op) {
    case Op::Const: return e.constant;
    case Op::Var: return lookup(e.var);
    case Op::Eq: return bool_value(eval_expr(*e.args[0], lookup) == eval_expr(*e.args[1], lookup));
    case Op::Ne: return bool_value(!(eval_expr(*e.args[0], lookup) == eval_expr(*e.args[1], lookup)));
    case Op::Not: return bool_value(!truthy(eval_expr(*e.args[0], lookup)));
    case Op::And: return bool_value(truthy(eval_expr(*e.args[0], lookup)) && truthy(eval_expr(*e.args[1], lookup)));
    case Op::Or: return bool_value(truthy(eval_expr(*e.args[0], lookup)) || truthy(eval_expr(*e.args[1], lookup)));
    case Op::Ite:
      return truthy(eval_expr(*e.args[0], lookup)) ? eval_expr(*e.args[1], lookup)
                                                   : eval_expr(*e.args[2], lookup);
    case Op::Add:
      return Value{as_int(eval_expr(*e.args[0], lookup), "+") + as_int(eval_expr(*e.args[1], lookup), "+")};
    case Op::Sub:
      return Value{as_int(eval_expr(*e.args[0], lookup), "-") - as_int(eval_expr(*e.args[1], lookup), "-")};
    case Op::Min: {
      auto a = as_int(eval_expr(*e.args[0], lookup), "min");
      auto b = as_int(eval_expr(*e.args[1], lookup), "min");
      return Value{std::min(a, b)};
    }
    case Op::Max: {
      auto a = as_int(eval_expr(*e.args[0], lookup), "max");
      auto b = as_int(eval_expr(*e.args[1], lookup), "max");
      return Value{std::max(a, b)};
    }
  }
  fail(ErrorCode::InvalidArgument, "unreachable expression op");
}

namespace {

// Precedence: || < && < ==,!= < +,- < unary/atoms.
int precedence(Expr::Op op) {
  using Op = Expr::Op;
  switch (op) {
    case Op::Or: return 1;
    case Op::And: return 2;
    case Op::Eq:
    case Op::Ne: return 3;
    case Op::Add:
    case Op::Sub: return 4;
    default: return 5;
  }
}

void render(const Expr& e, std::string& out, int parent_prec) {
  using Op = Expr::Op;
  int prec = precedence(e.op);
  auto binary = [&](const char* sym) {
    bool paren = prec < parent_prec;
    if (paren) out += '(';
    render(*e.args[0], out, prec);
    out += ' ';
    out += sym;
    out += ' ';
    // Left-associative chains re-parenthesize the right operand at prec+1.
    render(*e.args[1], out, prec + 1);
    if (paren) out += ')';
  };
  switch (e.op) {
    case Op::Const: out += value_str(e.constant); return;
    case Op::Var: out += e.var; return;
    case Op::Eq: binary("=="); return;
    case Op::Ne: binary("!="); return;
    case Op::And: binary("&&"); return;
    case Op::Or: binary("||"); return;
    case Op::Add: binary("+"); return;
    case Op::Sub: binary("-"); return;
    case Op::Not:
      out += '!';
      render(*e.args[0], out, 6);
      return;
    case Op::Ite:
    case Op::Min:
    case Op::Max: {
      out += e.op == Op::Ite ? "ite" : (e.op == Op::Min ? "min" : "max");
      out += '(';
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        render(*e.args[i], out, 0);
      }
      out += ')';
      return;
    }
  }
}

}  // namespace

std::string expr_str(const Expr& e) {
  std::string out;
  render(e, out, 0);
  return out;
}

}  // namespace cex

#include "cex/core/formula.hpp"

#include <algorithm>

#include "cex/core/error.hpp"

namespace cex {

Formula Formula::prim(int endo_ordinal, int value_index) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Prim;
  n->var = endo_ordinal;
  n->value = value_index;
  Formula f;
  f.node_ = std::move(n);
  return f;
}

Formula Formula::negation(Formula f) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Not;
  n->children.push_back(std::move(f));
  Formula out;
  out.node_ = std::move(n);
  return out;
}

Formula Formula::conj(Formula a, Formula b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::And;
  n->children.push_back(std::move(a));
  n->children.push_back(std::move(b));
  Formula out;
  out.node_ = std::move(n);
  return out;
}

Formula Formula::disj(Formula a, Formula b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Or;
  n->children.push_back(std::move(a));
  n->children.push_back(std::move(b));
  Formula out;
  out.node_ = std::move(n);
  return out;
}

Formula Formula::causal(Intervention iv, Formula inner) {
  if (inner.has_causal())
    fail(ErrorCode::NestedIntervention, "interventions cannot nest inside an intervened formula");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Causal;
  n->iv = std::move(iv);
  n->children.push_back(std::move(inner));
  Formula out;
  out.node_ = std::move(n);
  return out;
}

bool Formula::has_causal() const {
  if (kind() == Kind::Causal) return true;
  for (int i = 0; i < child_count(); ++i)
    if (child(i).has_causal()) return true;
  return false;
}

namespace {

void collect_vars(const Formula& f, std::vector<int>& out) {
  if (f.kind() == Formula::Kind::Prim) {
    out.push_back(f.prim_var());
    return;
  }
  for (int i = 0; i < f.child_count(); ++i) collect_vars(f.child(i), out);
}

}  // namespace

std::vector<int> Formula::variables() const {
  std::vector<int> out;
  collect_vars(*this, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool eval_formula(const CausalModel& m, ContextCode u, const Assignment& base, const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Prim:
      return base[static_cast<std::size_t>(f.prim_var())] == f.prim_value();
    case Formula::Kind::Not:
      return !eval_formula(m, u, base, f.child(0));
    case Formula::Kind::And:
      return eval_formula(m, u, base, f.child(0)) && eval_formula(m, u, base, f.child(1));
    case Formula::Kind::Or:
      return eval_formula(m, u, base, f.child(0)) || eval_formula(m, u, base, f.child(1));
    case Formula::Kind::Causal: {
      Assignment inner = m.evaluate(u, f.intervention());
      return eval_formula(m, u, inner, f.child(0));
    }
  }
  return false;
}

bool satisfies(const CausalModel& m, ContextCode u, const Formula& f) {
  return eval_formula(m, u, m.evaluate(u), f);
}

}  // namespace cex

#pragma once

#include <memory>
#include <vector>

#include "cex/core/model.hpp"

namespace cex {

/// Boolean combination of primitive events over endogenous variables, with
/// optional top-level interventions ([Y<-y] phi). Nesting of interventions
/// inside an intervened subformula is rejected at construction.
class Formula {
public:
  enum class Kind { Prim, Not, And, Or, Causal };

  static Formula prim(int endo_ordinal, int value_index);
  static Formula negation(Formula f);
  static Formula conj(Formula a, Formula b);
  static Formula disj(Formula a, Formula b);
  static Formula causal(Intervention iv, Formula inner);  // inner must be causal-free

  Kind kind() const { return node_->kind; }
  int prim_var() const { return node_->var; }
  int prim_value() const { return node_->value; }
  const Formula& child(int i) const { return node_->children[static_cast<std::size_t>(i)]; }
  int child_count() const { return static_cast<int>(node_->children.size()); }
  const Intervention& intervention() const { return node_->iv; }

  bool has_causal() const;
  /// Distinct endogenous ordinals mentioned in primitive events, sorted.
  std::vector<int> variables() const;

private:
  struct Node {
    Kind kind;
    int var = -1;
    int value = -1;
    Intervention iv;
    std::vector<Formula> children;
  };
  Formula() = default;
  std::shared_ptr<const Node> node_;
};

/// (M, u) |= f, with causal subformulas evaluated in the intervened model.
bool satisfies(const CausalModel& m, ContextCode u, const Formula& f);

/// Evaluates the causal-free part of `f` against a precomputed assignment.
bool eval_formula(const CausalModel& m, ContextCode u, const Assignment& base, const Formula& f);

}  // namespace cex

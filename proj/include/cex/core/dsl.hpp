#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cex/core/explanation.hpp"
#include "cex/core/model.hpp"

namespace cex {

/// A parsed model file: the validated model plus the declaration-level
/// artifacts needed for canonical re-serialization and name resolution.
struct ModelBundle {
  std::string name;
  Signature signature;
  std::vector<EquationSpec> equations;
  CausalModel model;
  std::vector<std::pair<std::string, ContextCode>> contexts;  // declaration order
  std::optional<ContextDistribution> distribution;
  std::optional<ContextSet> k_default;
  std::vector<std::pair<std::string, ContextSet>> k_named;

  std::optional<ContextCode> context_by_name(const std::string& name) const;
  std::optional<ContextSet> k_by_name(const std::string& name) const;
};

/// Grammar (lexical: identifiers, integers, rationals p/q, exact decimals,
/// '//' line comments):
///
///   model    := 'model' IDENT '{' item* '}'
///   item     := 'exo' IDENT ':' range ';'
///             | 'endo' IDENT ':' range ';'
///             | 'eq' IDENT ':=' expr ';'
///             | 'table' IDENT '(' IDENT (',' IDENT)* ')' '{' row* 'default' '->' value ';' '}'
///             | 'context' IDENT '{' IDENT '=' value (',' IDENT '=' value)* '}'
///             | 'prob' '{' IDENT ':' rational (',' IDENT ':' rational)* '}'
///             | 'K' IDENT? '=' ('all' | '{' IDENT (',' IDENT)* '}') ';'
///   row      := value (',' value)* '->' value ';'
///   range    := '{' value (',' value)* '}'
///   value    := INT | IDENT
///   expr     := or-expr with '||' '&&' '!' '==' '!=' '+' '-',
///               calls ite(c,a,b), min(a,b), max(a,b), parentheses
ModelBundle parse_model(const std::string& text);
ModelBundle load_model_file(const std::string& path);

/// Formula surface syntax: primitive `X=v`, negation `~f`, conjunction
/// `f & g`, disjunction `f | g`, parentheses, interventions `[X<-v,Y<-w](f)`.
Formula parse_formula(const std::string& text, const CausalModel& m);

/// Conjunction-of-primitives restriction of the formula syntax.
Conjunction parse_conjunction(const std::string& text, const CausalModel& m);

/// Canonical serialization: declarations sorted, rationals normalized, LF
/// line endings. parse(serialize(b)) is semantically equal to b, and
/// serialization is a fixed point from the first round-trip on.
std::string serialize_model(const ModelBundle& bundle);

}  // namespace cex

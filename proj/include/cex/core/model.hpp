#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cex/core/error.hpp"
#include "cex/core/expr.hpp"
#include "cex/core/value.hpp"

namespace cex {

struct VariableSpec {
  std::string name;
  ValueRange range;
};

struct Signature {
  std::vector<VariableSpec> exogenous;
  std::vector<VariableSpec> endogenous;
};

// ---- equations ------------------------------------------------------------

struct TableRowSpec {
  std::vector<Value> inputs;  // one value per declared parent
  Value output;
};

/// Explicit lookup form: exact-match rows plus a mandatory fallback.
struct TableSpec {
  std::vector<std::string> parents;
  std::vector<TableRowSpec> rows;
  Value fallback;
};

/// Exactly one of `expr` / `table` is set.
struct EquationSpec {
  std::string target;
  ExprPtr expr;
  std::optional<TableSpec> table;
};

// ---- runtime representations ----------------------------------------------

/// Rank of a context in the mixed-radix space over exogenous variables
/// (first exogenous variable most significant, range order per digit).
using ContextCode = std::uint64_t;

/// Value index per variable ordinal; exogenous first, then endogenous.
using Assignment = std::vector<int>;

/// Sorted (endogenous ordinal, value index) pairs; distinct variables.
struct Intervention {
  std::vector<std::pair<int, int>> settings;

  bool targets(int ordinal) const;
};

struct GraphEdge {
  int from = 0;
  int to = 0;
  // Witness: varying `from` between the two value indexes changes the
  // target's equation output with every other variable fixed as recorded.
  Assignment others;
  int value_a = 0;
  int value_b = 0;
};

/// Semantic dependence graph, exhaustively derived from compiled equations.
struct CausalGraph {
  int var_count = 0;
  std::vector<std::vector<int>> parents;   // per ordinal, sorted
  std::vector<std::vector<int>> children;  // per ordinal, sorted
  std::vector<GraphEdge> edges;

  bool has_edge(int from, int to) const;
};

std::uint64_t default_context_cap();  // CEX_MAX_CONTEXTS, else 2^22

/// Validated finite acyclic structural causal model. Immutable after build;
/// safe to share across threads.
class CausalModel {
public:
  CausalModel() = default;  // the empty model; populate via build()

  static CausalModel build(Signature sig, std::vector<EquationSpec> eqs,
                           std::uint64_t context_cap = default_context_cap());

  int var_count() const { return static_cast<int>(vars_.size()); }
  int exo_count() const { return exo_count_; }
  int endo_count() const { return var_count() - exo_count_; }
  bool is_exogenous(int ordinal) const { return ordinal < exo_count_; }
  const VariableSpec& var(int ordinal) const { return vars_[static_cast<std::size_t>(ordinal)]; }
  /// Ordinal for a name, -1 if unknown. Exogenous ordinals precede endogenous;
  /// each block is sorted lexicographically by name.
  int ordinal_of(std::string_view name) const;
  int require_endogenous(std::string_view name) const;

  std::uint64_t context_space() const { return context_space_; }

  /// Unique solution of the equations under context `u`.
  Assignment evaluate(ContextCode u) const;
  Assignment evaluate(ContextCode u, const Intervention& iv) const;

  /// Context digit extraction / construction.
  std::vector<int> decode_context(ContextCode u) const;
  ContextCode encode_context(const std::vector<int>& exo_value_indexes) const;

  /// Submodel with targeted equations replaced by constants.
  CausalModel intervene(const Intervention& iv) const;

  const CausalGraph& graph() const { return graph_; }
  const std::vector<int>& topo_order() const { return topo_; }  // endo ordinals

  Intervention make_intervention(const std::vector<std::pair<std::string, Value>>& settings) const;

private:
  struct CompiledEq {
    std::vector<int> parents;        // ordinals, sorted; table digit order
    std::vector<int> semantic;       // subset of parents with real dependence
    std::vector<std::uint64_t> strides;
    std::vector<int> out;            // dense table of target value indexes
  };

  void compile_equation(int endo_index, const EquationSpec& spec, std::uint64_t context_cap);
  void finalize();  // semantic graph, cycle check, topological order
  int eval_one(const CompiledEq& eq, const Assignment& a) const;

  std::vector<VariableSpec> vars_;
  std::map<std::string, int, std::less<>> ordinals_;
  int exo_count_ = 0;
  std::uint64_t context_space_ = 1;
  std::vector<CompiledEq> eqs_;  // indexed by endo ordinal - exo_count
  std::vector<int> topo_;
  CausalGraph graph_;
};

/// Renders an assignment restricted to the given ordinals, e.g. "A=1, B=0".
std::string assignment_str(const CausalModel& m, const Assignment& a,
                           const std::vector<int>& ordinals);

}  // namespace cex

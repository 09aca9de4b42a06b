#include "cex/core/model.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <set>

namespace cex {

bool Intervention::targets(int ordinal) const {
  for (const auto& [var, _] : settings)
    if (var == ordinal) return true;
  return false;
}

bool CausalGraph::has_edge(int from, int to) const {
  const auto& p = parents[static_cast<std::size_t>(to)];
  return std::binary_search(p.begin(), p.end(), from);
}

std::uint64_t default_context_cap() {
  if (const char* env = std::getenv("CEX_MAX_CONTEXTS")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
  }
  return std::uint64_t{1} << 22;
}

int CausalModel::ordinal_of(std::string_view name) const {
  auto it = ordinals_.find(name);
  return it == ordinals_.end() ? -1 : it->second;
}

int CausalModel::require_endogenous(std::string_view name) const {
  int ord = ordinal_of(name);
  if (ord < 0) fail(ErrorCode::UnknownVariable, "unknown variable '" + std::string(name) + "'");
  if (is_exogenous(ord))
    fail(ErrorCode::InvalidArgument, "'" + std::string(name) + "' is exogenous");
  return ord;
}

namespace {

void check_signature_part(const std::vector<VariableSpec>& part, std::set<std::string>& seen) {
  for (const auto& v : part) {
    if (v.name.empty()) fail(ErrorCode::InvalidArgument, "empty variable name");
    if (!seen.insert(v.name).second)
      fail(ErrorCode::InvalidArgument, "duplicate variable '" + v.name + "'");
    if (v.range.values.empty())
      fail(ErrorCode::RangeViolation, "empty range for '" + v.name + "'");
    for (std::size_t i = 0; i < v.range.values.size(); ++i)
      for (std::size_t j = i + 1; j < v.range.values.size(); ++j)
        if (v.range.values[i] == v.range.values[j])
          fail(ErrorCode::RangeViolation,
               "duplicate range value " + value_str(v.range.values[i]) + " for '" + v.name + "'");
  }
}

}  // namespace

CausalModel CausalModel::build(Signature sig, std::vector<EquationSpec> eqs,
                               std::uint64_t context_cap) {
  std::sort(sig.exogenous.begin(), sig.exogenous.end(),
            [](const auto& a, const auto& b) { return a.name < b.name; });
  std::sort(sig.endogenous.begin(), sig.endogenous.end(),
            [](const auto& a, const auto& b) { return a.name < b.name; });
  std::set<std::string> seen;
  check_signature_part(sig.exogenous, seen);
  check_signature_part(sig.endogenous, seen);

  CausalModel m;
  m.exo_count_ = static_cast<int>(sig.exogenous.size());
  for (auto& v : sig.exogenous) m.vars_.push_back(std::move(v));
  for (auto& v : sig.endogenous) m.vars_.push_back(std::move(v));
  for (int i = 0; i < m.var_count(); ++i) m.ordinals_[m.vars_[static_cast<std::size_t>(i)].name] = i;

  m.context_space_ = 1;
  for (int i = 0; i < m.exo_count_; ++i) {
    std::uint64_t r = static_cast<std::uint64_t>(m.var(i).range.size());
    if (m.context_space_ > context_cap / r)
      fail(ErrorCode::ScaleExceeded,
           "context space exceeds the cap of " + std::to_string(context_cap) +
               " contexts (set CEX_MAX_CONTEXTS to raise it)");
    m.context_space_ *= r;
  }

  // Exactly one equation per endogenous variable.
  std::vector<const EquationSpec*> by_target(static_cast<std::size_t>(m.endo_count()), nullptr);
  for (const auto& eq : eqs) {
    int ord = m.ordinal_of(eq.target);
    if (ord < 0) fail(ErrorCode::UnknownVariable, "equation for unknown variable '" + eq.target + "'");
    if (m.is_exogenous(ord))
      fail(ErrorCode::InvalidArgument, "equation for exogenous variable '" + eq.target + "'");
    auto& slot = by_target[static_cast<std::size_t>(ord - m.exo_count_)];
    if (slot) fail(ErrorCode::DuplicateEquation, "duplicate equation for '" + eq.target + "'");
    slot = &eq;
  }
  for (int e = 0; e < m.endo_count(); ++e)
    if (!by_target[static_cast<std::size_t>(e)])
      fail(ErrorCode::MissingEquation,
           "missing equation for '" + m.var(m.exo_count_ + e).name + "'");

  m.eqs_.resize(static_cast<std::size_t>(m.endo_count()));
  for (int e = 0; e < m.endo_count(); ++e) m.compile_equation(e, *by_target[static_cast<std::size_t>(e)], context_cap);

  m.finalize();
  return m;
}

void CausalModel::compile_equation(int endo_index, const EquationSpec& spec,
                                   std::uint64_t context_cap) {
  const int target = exo_count_ + endo_index;
  const ValueRange& target_range = var(target).range;
  CompiledEq eq;

  std::vector<std::string> parent_names;
  if (spec.table) {
    parent_names = spec.table->parents;
  } else if (spec.expr) {
    parent_names = expr_variables(*spec.expr);
  } else {
    fail(ErrorCode::InvalidArgument, "equation for '" + spec.target + "' has no body");
  }

  std::set<int> parent_set;
  for (const auto& name : parent_names) {
    int ord = ordinal_of(name);
    if (ord < 0)
      fail(ErrorCode::UnknownVariable,
           "equation for '" + spec.target + "' references unknown variable '" + name + "'");
    parent_set.insert(ord);
  }
  eq.parents.assign(parent_set.begin(), parent_set.end());

  std::uint64_t table_size = 1;
  for (int p : eq.parents) {
    std::uint64_t r = static_cast<std::uint64_t>(var(p).range.size());
    if (table_size > context_cap / r)
      fail(ErrorCode::ScaleExceeded, "equation table for '" + spec.target + "' exceeds the scale cap");
    table_size *= r;
  }
  eq.strides.assign(eq.parents.size(), 1);
  for (int i = static_cast<int>(eq.parents.size()) - 2; i >= 0; --i)
    eq.strides[static_cast<std::size_t>(i)] =
        eq.strides[static_cast<std::size_t>(i + 1)] *
        static_cast<std::uint64_t>(var(eq.parents[static_cast<std::size_t>(i + 1)]).range.size());

  eq.out.assign(static_cast<std::size_t>(table_size), 0);

  auto render_inputs = [&](const std::vector<int>& digits) {
    std::string s;
    for (std::size_t i = 0; i < eq.parents.size(); ++i) {
      if (i) s += ", ";
      s += var(eq.parents[i]).name + "=" +
           value_str(var(eq.parents[i]).range.at(digits[i]));
    }
    return s;
  };

  if (spec.table) {
    const TableSpec& t = *spec.table;
    // Positional inputs follow the declared parent order; map to digit order.
    std::vector<int> decl_to_digit(t.parents.size());
    for (std::size_t i = 0; i < t.parents.size(); ++i) {
      int ord = ordinal_of(t.parents[i]);
      auto it = std::find(eq.parents.begin(), eq.parents.end(), ord);
      decl_to_digit[i] = static_cast<int>(it - eq.parents.begin());
      for (std::size_t j = i + 1; j < t.parents.size(); ++j)
        if (t.parents[i] == t.parents[j])
          fail(ErrorCode::InvalidArgument,
               "table for '" + spec.target + "' repeats parent '" + t.parents[i] + "'");
    }
    int fallback_index = target_range.index_of(t.fallback);
    if (fallback_index < 0)
      fail(ErrorCode::OutOfRangeEquationOutput,
           "table default for '" + spec.target + "' is " + value_str(t.fallback) +
               ", outside the declared range");
    std::fill(eq.out.begin(), eq.out.end(), fallback_index);

    std::set<std::uint64_t> filled;
    for (const auto& row : t.rows) {
      if (row.inputs.size() != t.parents.size())
        fail(ErrorCode::InvalidArgument, "table row arity mismatch for '" + spec.target + "'");
      std::uint64_t index = 0;
      for (std::size_t i = 0; i < row.inputs.size(); ++i) {
        int digit_pos = decl_to_digit[i];
        int vi = var(eq.parents[static_cast<std::size_t>(digit_pos)]).range.index_of(row.inputs[i]);
        if (vi < 0)
          fail(ErrorCode::ValueOutOfRange,
               "table row value " + value_str(row.inputs[i]) + " outside the range of '" +
                   t.parents[i] + "'");
        index += static_cast<std::uint64_t>(vi) * eq.strides[static_cast<std::size_t>(digit_pos)];
      }
      if (!filled.insert(index).second)
        fail(ErrorCode::InvalidArgument, "duplicate table row for '" + spec.target + "'");
      int out_index = target_range.index_of(row.output);
      if (out_index < 0)
        fail(ErrorCode::OutOfRangeEquationOutput,
             "table output " + value_str(row.output) + " for '" + spec.target +
                 "' is outside the declared range");
      eq.out[static_cast<std::size_t>(index)] = out_index;
    }
  } else {
    std::vector<int> digits(eq.parents.size(), 0);
    std::vector<Value> values(eq.parents.size());
    for (std::size_t i = 0; i < eq.parents.size(); ++i)
      values[i] = var(eq.parents[i]).range.at(0);
    VarLookup lookup = [&](const std::string& name) -> const Value& {
      int ord = ordinal_of(name);
      auto it = std::find(eq.parents.begin(), eq.parents.end(), ord);
      return values[static_cast<std::size_t>(it - eq.parents.begin())];
    };
    for (std::uint64_t index = 0;; ++index) {
      Value out = eval_expr(*spec.expr, lookup);
      int out_index = target_range.index_of(out);
      if (out_index < 0)
        fail(ErrorCode::OutOfRangeEquationOutput,
             "equation for '" + spec.target + "' yields " + value_str(out) +
                 " outside the declared range at " + render_inputs(digits));
      eq.out[static_cast<std::size_t>(index)] = out_index;

      int pos = static_cast<int>(eq.parents.size()) - 1;
      while (pos >= 0) {
        auto& d = digits[static_cast<std::size_t>(pos)];
        if (++d < var(eq.parents[static_cast<std::size_t>(pos)]).range.size()) {
          values[static_cast<std::size_t>(pos)] = var(eq.parents[static_cast<std::size_t>(pos)]).range.at(d);
          break;
        }
        d = 0;
        values[static_cast<std::size_t>(pos)] = var(eq.parents[static_cast<std::size_t>(pos)]).range.at(0);
        --pos;
      }
      if (pos < 0) break;
    }
  }

  // Semantic parents: digits whose variation can change the output.
  for (std::size_t d = 0; d < eq.parents.size(); ++d) {
    std::uint64_t radix = static_cast<std::uint64_t>(var(eq.parents[d]).range.size());
    std::uint64_t stride = eq.strides[d];
    bool depends = false;
    for (std::uint64_t index = 0; index < eq.out.size() && !depends; ++index) {
      std::uint64_t digit = (index / stride) % radix;
      if (digit == 0) continue;
      if (eq.out[static_cast<std::size_t>(index)] != eq.out[static_cast<std::size_t>(index - digit * stride)])
        depends = true;
    }
    if (depends) eq.semantic.push_back(eq.parents[d]);
  }

  eqs_[static_cast<std::size_t>(endo_index)] = std::move(eq);
}

void CausalModel::finalize() {
  const int n = var_count();
  graph_ = CausalGraph{};
  graph_.var_count = n;
  graph_.parents.assign(static_cast<std::size_t>(n), {});
  graph_.children.assign(static_cast<std::size_t>(n), {});

  for (int e = 0; e < endo_count(); ++e) {
    const CompiledEq& eq = eqs_[static_cast<std::size_t>(e)];
    int target = exo_count_ + e;
    for (int p : eq.semantic) {
      graph_.parents[static_cast<std::size_t>(target)].push_back(p);
      graph_.children[static_cast<std::size_t>(p)].push_back(target);

      // Witness: first table index where the p-digit changes the output.
      std::size_t d = 0;
      while (eq.parents[d] != p) ++d;
      std::uint64_t radix = static_cast<std::uint64_t>(var(p).range.size());
      std::uint64_t stride = eq.strides[d];
      GraphEdge edge{p, target, Assignment(static_cast<std::size_t>(n), 0), 0, 0};
      for (std::uint64_t index = 0; index < eq.out.size(); ++index) {
        std::uint64_t digit = (index / stride) % radix;
        if (digit == 0) continue;
        std::uint64_t base = index - digit * stride;
        if (eq.out[static_cast<std::size_t>(index)] == eq.out[static_cast<std::size_t>(base)]) continue;
        for (std::size_t i = 0; i < eq.parents.size(); ++i) {
          std::uint64_t r = static_cast<std::uint64_t>(var(eq.parents[i]).range.size());
          edge.others[static_cast<std::size_t>(eq.parents[i])] =
              static_cast<int>((index / eq.strides[i]) % r);
        }
        edge.value_a = static_cast<int>((base / stride) % radix);
        edge.value_b = static_cast<int>(digit);
        break;
      }
      graph_.edges.push_back(std::move(edge));
    }
  }
  for (auto& v : graph_.parents) std::sort(v.begin(), v.end());
  for (auto& v : graph_.children) std::sort(v.begin(), v.end());

  // Cycle check plus deterministic topological order over endogenous edges.
  std::vector<int> indegree(static_cast<std::size_t>(endo_count()), 0);
  for (int e = 0; e < endo_count(); ++e)
    for (int p : graph_.parents[static_cast<std::size_t>(exo_count_ + e)])
      if (!is_exogenous(p)) ++indegree[static_cast<std::size_t>(e)];

  topo_.clear();
  std::set<int> ready;
  for (int e = 0; e < endo_count(); ++e)
    if (indegree[static_cast<std::size_t>(e)] == 0) ready.insert(e);
  while (!ready.empty()) {
    int e = *ready.begin();
    ready.erase(ready.begin());
    topo_.push_back(exo_count_ + e);
    for (int child : graph_.children[static_cast<std::size_t>(exo_count_ + e)]) {
      int ce = child - exo_count_;
      if (--indegree[static_cast<std::size_t>(ce)] == 0) ready.insert(ce);
    }
  }
  if (static_cast<int>(topo_.size()) != endo_count()) {
    // Extract one cycle for the message.
    std::vector<int> on_cycle;
    for (int e = 0; e < endo_count(); ++e)
      if (indegree[static_cast<std::size_t>(e)] > 0) on_cycle.push_back(exo_count_ + e);
    std::string names;
    // Walk parent links among the leftover vertices until a vertex repeats.
    std::vector<int> path;
    std::set<int> path_set;
    int cur = on_cycle.front();
    while (!path_set.count(cur)) {
      path.push_back(cur);
      path_set.insert(cur);
      for (int p : graph_.parents[static_cast<std::size_t>(cur)])
        if (!is_exogenous(p) && indegree[static_cast<std::size_t>(p - exo_count_)] > 0) {
          cur = p;
          break;
        }
    }
    auto start = std::find(path.begin(), path.end(), cur);
    for (auto it = start; it != path.end(); ++it)
      names += var(*it).name + " -> ";
    names += var(cur).name;
    fail(ErrorCode::CyclicModel, "equations are cyclic: " + names);
  }
}

int CausalModel::eval_one(const CompiledEq& eq, const Assignment& a) const {
  std::uint64_t index = 0;
  for (std::size_t i = 0; i < eq.parents.size(); ++i)
    index += static_cast<std::uint64_t>(a[static_cast<std::size_t>(eq.parents[i])]) * eq.strides[i];
  return eq.out[static_cast<std::size_t>(index)];
}

std::vector<int> CausalModel::decode_context(ContextCode u) const {
  std::vector<int> digits(static_cast<std::size_t>(exo_count_), 0);
  for (int i = exo_count_ - 1; i >= 0; --i) {
    std::uint64_t r = static_cast<std::uint64_t>(var(i).range.size());
    digits[static_cast<std::size_t>(i)] = static_cast<int>(u % r);
    u /= r;
  }
  return digits;
}

ContextCode CausalModel::encode_context(const std::vector<int>& exo_value_indexes) const {
  ContextCode u = 0;
  for (int i = 0; i < exo_count_; ++i) {
    std::uint64_t r = static_cast<std::uint64_t>(var(i).range.size());
    u = u * r + static_cast<std::uint64_t>(exo_value_indexes[static_cast<std::size_t>(i)]);
  }
  return u;
}

Assignment CausalModel::evaluate(ContextCode u) const {
  static const Intervention kEmpty{};
  return evaluate(u, kEmpty);
}

Assignment CausalModel::evaluate(ContextCode u, const Intervention& iv) const {
  if (u >= context_space_) fail(ErrorCode::InvalidArgument, "context code out of range");
  Assignment a(static_cast<std::size_t>(var_count()), 0);
  ContextCode rest = u;
  for (int i = exo_count_ - 1; i >= 0; --i) {
    std::uint64_t r = static_cast<std::uint64_t>(var(i).range.size());
    a[static_cast<std::size_t>(i)] = static_cast<int>(rest % r);
    rest /= r;
  }
  for (const auto& [ord, value] : iv.settings) a[static_cast<std::size_t>(ord)] = value;
  for (int target : topo_) {
    if (iv.targets(target)) continue;
    a[static_cast<std::size_t>(target)] = eval_one(eqs_[static_cast<std::size_t>(target - exo_count_)], a);
  }
  return a;
}

CausalModel CausalModel::intervene(const Intervention& iv) const {
  CausalModel m = *this;
  for (const auto& [ord, value] : iv.settings) {
    if (ord < exo_count_ || ord >= var_count())
      fail(ErrorCode::UnknownVariable, "intervention target out of range");
    if (value < 0 || value >= var(ord).range.size())
      fail(ErrorCode::ValueOutOfRange, "intervention value out of range for '" + var(ord).name + "'");
    m.eqs_[static_cast<std::size_t>(ord - exo_count_)] =
        CompiledEq{{}, {}, {}, std::vector<int>{value}};
  }
  m.finalize();
  return m;
}

Intervention CausalModel::make_intervention(
    const std::vector<std::pair<std::string, Value>>& settings) const {
  Intervention iv;
  for (const auto& [name, value] : settings) {
    int ord = ordinal_of(name);
    if (ord < 0) fail(ErrorCode::UnknownVariable, "unknown variable '" + name + "'");
    if (is_exogenous(ord))
      fail(ErrorCode::InvalidArgument, "cannot intervene on exogenous variable '" + name + "'");
    int vi = var(ord).range.index_of(value);
    if (vi < 0)
      fail(ErrorCode::ValueOutOfRange,
           "value " + value_str(value) + " outside the range of '" + name + "'");
    for (const auto& [prev, _] : iv.settings)
      if (prev == ord) fail(ErrorCode::InvalidArgument, "variable '" + name + "' set twice");
    iv.settings.emplace_back(ord, vi);
  }
  std::sort(iv.settings.begin(), iv.settings.end());
  return iv;
}

std::string assignment_str(const CausalModel& m, const Assignment& a,
                           const std::vector<int>& ordinals) {
  std::string s;
  for (std::size_t i = 0; i < ordinals.size(); ++i) {
    if (i) s += ", ";
    int ord = ordinals[i];
    s += m.var(ord).name + "=" + value_str(m.var(ord).range.at(a[static_cast<std::size_t>(ord)]));
  }
  return s;
}

}  // namespace cex

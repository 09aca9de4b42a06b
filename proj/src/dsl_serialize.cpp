#include <algorithm>
#include <map>
#include <sstream>

#include "cex/core/dsl.hpp"

namespace cex {

namespace {

std::string range_str(const ValueRange& range) {
  std::string out = "{";
  for (int i = 0; i < range.size(); ++i) {
    if (i) out += ", ";
    out += value_str(range.at(i));
  }
  return out + "}";
}

std::vector<VariableSpec> sorted_by_name(std::vector<VariableSpec> part) {
  std::sort(part.begin(), part.end(),
            [](const VariableSpec& a, const VariableSpec& b) { return a.name < b.name; });
  return part;
}

/// Row sort key: input value indexes in the declared parent ranges.
std::vector<int> row_key(const ModelBundle& bundle, const TableSpec& table,
                         const TableRowSpec& row) {
  std::vector<int> key;
  key.reserve(row.inputs.size());
  for (std::size_t i = 0; i < row.inputs.size() && i < table.parents.size(); ++i) {
    int ordinal = bundle.model.ordinal_of(table.parents[i]);
    key.push_back(ordinal >= 0 ? bundle.model.var(ordinal).range.index_of(row.inputs[i]) : -1);
  }
  return key;
}

void write_equation(std::ostringstream& out, const ModelBundle& bundle,
                    const EquationSpec& eq) {
  if (eq.expr) {
    out << "  eq " << eq.target << " := " << expr_str(*eq.expr) << ";\n";
    return;
  }
  const TableSpec& table = *eq.table;
  out << "  table " << eq.target << "(";
  for (std::size_t i = 0; i < table.parents.size(); ++i) {
    if (i) out << ", ";
    out << table.parents[i];
  }
  out << ") {\n";
  std::vector<const TableRowSpec*> rows;
  rows.reserve(table.rows.size());
  for (const auto& row : table.rows) rows.push_back(&row);
  std::stable_sort(rows.begin(), rows.end(), [&](const TableRowSpec* a, const TableRowSpec* b) {
    return row_key(bundle, table, *a) < row_key(bundle, table, *b);
  });
  for (const TableRowSpec* row : rows) {
    out << "    ";
    for (std::size_t i = 0; i < row->inputs.size(); ++i) {
      if (i) out << ", ";
      out << value_str(row->inputs[i]);
    }
    out << " -> " << value_str(row->output) << ";\n";
  }
  out << "    default -> " << value_str(table.fallback) << ";\n";
  out << "  }\n";
}

}  // namespace

std::string serialize_model(const ModelBundle& bundle) {
  const CausalModel& m = bundle.model;
  std::ostringstream out;
  out << "model " << bundle.name << " {\n";

  for (const auto& v : sorted_by_name(bundle.signature.exogenous))
    out << "  exo " << v.name << ": " << range_str(v.range) << ";\n";
  for (const auto& v : sorted_by_name(bundle.signature.endogenous))
    out << "  endo " << v.name << ": " << range_str(v.range) << ";\n";

  std::vector<const EquationSpec*> eqs;
  eqs.reserve(bundle.equations.size());
  for (const auto& eq : bundle.equations) eqs.push_back(&eq);
  std::sort(eqs.begin(), eqs.end(), [](const EquationSpec* a, const EquationSpec* b) {
    return a->target < b->target;
  });
  for (const EquationSpec* eq : eqs) write_equation(out, bundle, *eq);

  // First declared name wins when several names denote one context.
  std::map<ContextCode, std::string> name_of;
  std::vector<std::pair<std::string, ContextCode>> contexts = bundle.contexts;
  for (const auto& [name, code] : contexts) name_of.emplace(code, name);
  std::sort(contexts.begin(), contexts.end());
  for (const auto& [name, code] : contexts) {
    std::vector<int> digits = m.decode_context(code);
    out << "  context " << name << " { ";
    for (int i = 0; i < m.exo_count(); ++i) {
      if (i) out << ", ";
      out << m.var(i).name << " = " << value_str(m.var(i).range.at(digits[i]));
    }
    out << " }\n";
  }

  auto context_name = [&](ContextCode code) -> const std::string& {
    auto it = name_of.find(code);
    if (it == name_of.end())
      fail(ErrorCode::InvalidArgument,
           "serialization needs a declared name for every referenced context");
    return it->second;
  };

  if (bundle.distribution) {
    std::vector<std::pair<std::string, Rat>> entries;
    for (const auto& [code, weight] : bundle.distribution->weights)
      entries.emplace_back(context_name(code), weight);
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    out << "  prob {\n";
    for (std::size_t i = 0; i < entries.size(); ++i) {
      out << "    " << entries[i].first << ": " << rational_str(entries[i].second)
          << (i + 1 < entries.size() ? "," : "") << "\n";
    }
    out << "  }\n";
  }

  auto write_k = [&](const std::optional<std::string>& name, const ContextSet& set) {
    out << "  K";
    if (name) out << " " << *name;
    out << " = ";
    if (set.all) {
      out << "all";
    } else {
      std::vector<std::string> names;
      names.reserve(set.codes.size());
      for (ContextCode code : set.codes) names.push_back(context_name(code));
      std::sort(names.begin(), names.end());
      out << "{ ";
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out << ", ";
        out << names[i];
      }
      out << " }";
    }
    out << ";\n";
  };

  if (bundle.k_default) write_k(std::nullopt, *bundle.k_default);
  std::vector<std::pair<std::string, ContextSet>> named = bundle.k_named;
  std::sort(named.begin(), named.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [name, set] : named) write_k(name, set);

  out << "}\n";
  return out.str();
}

}  // namespace cex

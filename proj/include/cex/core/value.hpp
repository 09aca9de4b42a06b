#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace cex {

/// A point in a variable's range: an integer or a symbolic token.
using Value = std::variant<std::int64_t, std::string>;

std::string value_str(const Value& v);
bool value_eq(const Value& a, const Value& b);

/// Finite, non-empty, duplicate-free list of values. Declaration order is
/// the canonical order used everywhere (witness enumeration, serialization).
struct ValueRange {
  std::vector<Value> values;

  int size() const { return static_cast<int>(values.size()); }
  /// Index of `v` in the range, -1 if absent.
  int index_of(const Value& v) const;
  const Value& at(int index) const { return values[static_cast<std::size_t>(index)]; }

  static ValueRange boolean();  // {0, 1}
};

}  // namespace cex

#include "cex/core/value.hpp"

namespace cex {

std::string value_str(const Value& v) {
  if (std::holds_alternative<std::int64_t>(v)) return std::to_string(std::get<std::int64_t>(v));
  return std::get<std::string>(v);
}

bool value_eq(const Value& a, const Value& b) { return a == b; }

int ValueRange::index_of(const Value& v) const {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] == v) return static_cast<int>(i);
  return -1;
}

ValueRange ValueRange::boolean() {
  return ValueRange{{Value{std::int64_t{0}}, Value{std::int64_t{1}}}};
}

}  // namespace cex

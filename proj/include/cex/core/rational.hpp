#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <string_view>

namespace cex {

/// Exact rational arithmetic; probabilities never touch floating point.
using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Parses "p/q", an integer, or an exact decimal like "0.9" (-> 9/10).
Rat parse_rational(std::string_view text);

/// Canonical form "p/q", or just "p" when the denominator is 1.
std::string rational_str(const Rat& value);

}  // namespace cex

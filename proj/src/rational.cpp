#include "cex/core/rational.hpp"

#include <cctype>

#include "cex/core/error.hpp"

namespace cex {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

Rat parse_rational(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  auto bad = [&] { fail(ErrorCode::SyntaxError, "malformed rational: '" + std::string(text) + "'"); };

  Rat out;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) bad();
    BigInt n{std::string(num)}, d{std::string(den)};
    if (d == 0) fail(ErrorCode::SyntaxError, "zero denominator: '" + std::string(text) + "'");
    out = Rat(n, d);
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    auto whole = s.substr(0, dot), frac = s.substr(dot + 1);
    if (!all_digits(whole) || !all_digits(frac)) bad();
    BigInt scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    BigInt w{std::string(whole)}, f{std::string(frac)};
    out = Rat(w * scale + f, scale);
  } else {
    if (!all_digits(s)) bad();
    BigInt n{std::string(s)};
    out = Rat(n);
  }
  return negative ? Rat(-out) : out;
}

std::string rational_str(const Rat& value) {
  BigInt num = numerator(value), den = denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::ValueOutOfRange: return "ValueOutOfRange";
    case ErrorCode::RangeViolation: return "RangeViolation";
    case ErrorCode::NestedIntervention: return "NestedIntervention";
    case ErrorCode::MissingEquation: return "MissingEquation";
    case ErrorCode::DuplicateEquation: return "DuplicateEquation";
    case ErrorCode::CyclicModel: return "CyclicModel";
    case ErrorCode::OutOfRangeEquationOutput: return "OutOfRangeEquationOutput";
    case ErrorCode::ScaleExceeded: return "ScaleExceeded";
    case ErrorCode::ProbSumError: return "ProbSumError";
    case ErrorCode::WeightSumNotOne: return "WeightSumNotOne";
    case ErrorCode::ZeroProbabilityCondition: return "ZeroProbabilityCondition";
    case ErrorCode::EmptyRestriction: return "EmptyRestriction";
    case ErrorCode::EmptyCandidate: return "EmptyCandidate";
    case ErrorCode::NotDepthTwo: return "NotDepthTwo";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace cex

#pragma once

#include <cstdlib>
#include <set>
#include <string>
#include <vector>

#include "cex/core/classifier.hpp"
#include "cex/core/dsl.hpp"

#ifndef CEX_CORPUS_DIR
#define CEX_CORPUS_DIR "corpus"
#endif

namespace testutil {

inline std::string corpus_path(const std::string& name) {
  if (const char* env = std::getenv("CEX_CORPUS")) return std::string(env) + "/" + name;
  return std::string(CEX_CORPUS_DIR) + "/" + name;
}

inline cex::ModelBundle load_fixture(const std::string& name) {
  return cex::load_model_file(corpus_path(name));
}

inline cex::Conjunction conj(const cex::CausalModel& m, const std::string& text) {
  return cex::parse_conjunction(text, m);
}

inline cex::Formula phi(const cex::CausalModel& m, const std::string& text) {
  return cex::parse_formula(text, m);
}

/// Event lists as comparable sets, independent of enumeration order.
inline std::set<std::vector<std::pair<int, int>>> event_set(
    const std::vector<std::pair<cex::Conjunction, cex::ActualCauseWitness>>& causes) {
  std::set<std::vector<std::pair<int, int>>> out;
  for (const auto& [c, _] : causes) out.insert(c.events);
  return out;
}

/// Holder candidates of an explanation enumeration, as a comparable set.
inline std::set<std::string> holder_names(
    const cex::CausalModel& m,
    const std::vector<std::pair<cex::Conjunction, cex::ExplanationVerdict>>& entries) {
  std::set<std::string> out;
  for (const auto& [c, v] : entries)
    if (v.holds) out.insert(conjunction_str(m, c));
  return out;
}

/// The depth-2 view of an already-lifted model file.
inline cex::ProbabilisticModel as_lift(const cex::ModelBundle& bundle) {
  cex::ProbabilisticModel pm;
  pm.model = bundle.model;
  if (bundle.distribution) pm.dist = *bundle.distribution;
  if (!cex::is_depth2_lift(pm.model, &pm.pixel_ordinals, &pm.output_ordinal))
    cex::fail(cex::ErrorCode::NotDepthTwo, "fixture is not a depth-2 lift");
  return pm;
}

}  // namespace testutil

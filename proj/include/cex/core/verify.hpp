#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "cex/core/classifier.hpp"
#include "cex/core/dsl.hpp"

namespace cex {

/// Deterministic RNG wrapper; identical sequences for identical seeds on
/// every platform (no std::uniform_int_distribution).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  std::uint64_t next();
  std::uint64_t below(std::uint64_t n);  // uniform-ish over [0, n)

private:
  std::uint64_t state_;
};

struct TrialSummary {
  int trials = 0;
  int conditions_met = 0;
  int implication_failures = 0;
  std::string first_failure;  // rendered description, empty when none
};

/// Random depth-2 lifts satisfying Theorem 1's conditions (a)-(e); checks the
/// implication on every trial.
TrialSummary run_theorem1_trials(int trials, std::uint64_t seed);

/// Random depth-2 lifts with rational distributions and goodness pairs;
/// checks Theorem 2's implication on every trial.
TrialSummary run_theorem2_trials(int trials, std::uint64_t seed);

/// Exhaustive Theorem 1 sweep on a model file: every context, every
/// primitive-event phi over sink variables (or the given phi), candidates =
/// non-empty subsets of the superset at actual values.
TrialSummary run_theorem1_on_model(const ModelBundle& bundle,
                                   const std::optional<std::string>& phi_text,
                                   const std::optional<std::vector<std::string>>& superset_names);

/// Theorem 2 sweep on a depth-2 model file: candidate subsets of pixels (up
/// to max_cand_size) at realized values, every label value.
TrialSummary run_theorem2_on_model(const ModelBundle& bundle, const GoodnessPair& goodness,
                                   int max_cand_size);

}  // namespace cex

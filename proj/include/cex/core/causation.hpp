#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cex/core/formula.hpp"
#include "cex/core/model.hpp"

namespace cex {

/// Non-empty conjunction of primitive events over distinct endogenous
/// variables, kept sorted by ordinal (canonical form).
struct Conjunction {
  std::vector<std::pair<int, int>> events;  // (endo ordinal, value index)

  int size() const { return static_cast<int>(events.size()); }
  std::vector<int> ordinals() const;
  bool contains(int ordinal) const;
  /// Restriction to a subset of positions (indexes into `events`).
  Conjunction restrict_to(const std::vector<int>& positions) const;

  static Conjunction make(std::vector<std::pair<int, int>> events);  // sorts, validates
};

std::string conjunction_str(const CausalModel& m, const Conjunction& c);
Formula conjunction_formula(const Conjunction& c);
bool conjunction_holds(const CausalModel& m, const Assignment& a, const Conjunction& c);

// ---- actual causes ----------------------------------------------------------

/// AC2 witness: alternative setting for the candidate variables plus the
/// variables frozen at their actual values.
struct ActualCauseWitness {
  std::vector<int> alt_values;              // per candidate event, value index
  std::vector<std::pair<int, int>> fixed;   // (ordinal, actual value index)
};

struct SubsetCheck {
  Conjunction subset;
  bool satisfied_ac2 = false;
};

struct CauseVerdict {
  bool holds = false;
  bool ac1 = false, ac2 = false, ac3 = false;
  const char* failed = nullptr;  // first failing clause name, null when holds
  std::optional<ActualCauseWitness> witness;
  std::vector<SubsetCheck> minimality_trace;
};

/// Modified Halpern-Pearl actual cause (witness variables frozen at their
/// actual values).
CauseVerdict is_actual_cause(const CausalModel& m, ContextCode u,
                             const Conjunction& cand, const Formula& phi);

struct ButForVerdict {
  bool holds = false;
  bool ac1 = false, flip = false, ac3 = false;
  const char* failed = nullptr;
  std::optional<std::vector<int>> alt_values;
  std::vector<SubsetCheck> minimality_trace;
};

/// Special case of actual cause whose AC2 witness has W = {} (an alternative
/// setting of the candidate alone falsifies phi). Minimality is full AC3.
ButForVerdict is_but_for_cause(const CausalModel& m, ContextCode u,
                               const Conjunction& cand, const Formula& phi);

/// All actual causes of phi in (M, u), canonical order (size, then ordinals).
/// Candidates range over endogenous variables not mentioned in phi, at their
/// actual values.
std::vector<std::pair<Conjunction, ActualCauseWitness>> find_actual_causes(
    const CausalModel& m, ContextCode u, const Formula& phi);

// ---- sufficient causes ------------------------------------------------------

struct SufficientCauseWitness {
  std::pair<int, int> conjunct;   // chosen candidate event
  Conjunction extension_or_self;  // the actual cause containing the conjunct
  ActualCauseWitness inner;
};

struct SufficientVerdict {
  bool holds = false;
  bool sc1 = false, sc2 = false, sc3 = false, sc4 = false;
  const char* failed = nullptr;
  std::optional<SufficientCauseWitness> witness;        // when sc2
  std::optional<ContextCode> sc3_failure_context;       // when !sc3
  std::optional<Conjunction> sc4_violating_subset;      // when !sc4
};

/// SC1 actuality; SC2 some conjunct extends (by a conjunction of other
/// variables at their actual values) to an actual cause; SC3 [X<-x]phi in
/// every context; SC4 no strict subset satisfies SC1, SC3 and contains an
/// actual cause.
SufficientVerdict is_sufficient_cause(const CausalModel& m, ContextCode u,
                                      const Conjunction& cand, const Formula& phi);

// ---- structural predicates --------------------------------------------------

struct IndependenceCounterexample {
  ContextCode u = 0;
  std::vector<int> subset;          // ordinals set by the intervention
  std::vector<int> subset_values;   // value indexes
  int changed = -1;                 // variable whose value moved
};

struct IndependenceVerdict {
  bool holds = false;
  std::optional<IndependenceCounterexample> counterexample;
};

/// No intervention on a strict subset can move another variable in the set,
/// in any context.
IndependenceVerdict is_causally_independent(const CausalModel& m,
                                            const std::vector<int>& ordinals);

struct DeterminedVerdict {
  bool holds = false;
  std::optional<std::vector<int>> missing_values;  // first unreachable setting
};

/// Every joint setting of the variables is realized by some context.
DeterminedVerdict is_determined_by_context(const CausalModel& m,
                                           const std::vector<int>& ordinals);

struct Theorem1Report {
  bool cond_a = false;  // superset causally independent
  bool cond_b = false;  // superset determined by context
  bool cond_c = false;  // superset includes all parents of phi's variables
  bool cond_d = false;  // some setting of the superset falsifies phi
  bool cond_e = false;  // candidate variables inside the superset
  bool sc134 = false;
  bool sc2 = false;
  bool sufficient = false;
  bool implication_holds = false;
};

Theorem1Report verify_theorem1(const CausalModel& m, const std::vector<int>& superset,
                               const Conjunction& cand, const Formula& phi, ContextCode u);

// ---- shared search machinery ------------------------------------------------

enum class WitnessMode { ActualValues, EmptyOnly };

/// AC2 search over witness sets W (canonical order: |W| then lexicographic)
/// and alternative settings (lexicographic). Domain of W excludes the
/// candidate ordinals.
std::optional<ActualCauseWitness> ac2_search(const CausalModel& m, ContextCode u,
                                             const Assignment& actual,
                                             const Conjunction& cand, const Formula& phi,
                                             WitnessMode mode);

/// Minimal AC2-satisfying conjunctions (at actual values) over `domain`, in
/// canonical order. `stop_when_touching`: return early once a cause
/// intersecting that set is found (necessity checks).
struct CauseFamily {
  std::vector<std::pair<Conjunction, ActualCauseWitness>> causes;
};
CauseFamily minimal_ac2_family(const CausalModel& m, ContextCode u, const Formula& phi,
                               const std::vector<int>& domain, WitnessMode mode,
                               const std::vector<int>* stop_when_touching = nullptr);

}  // namespace cex

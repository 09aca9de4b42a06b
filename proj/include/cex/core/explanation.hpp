#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "cex/core/causation.hpp"
#include "cex/core/rational.hpp"

namespace cex {

/// Subset of the context space, or the whole of it (`all`). Codes are kept
/// sorted and duplicate-free.
struct ContextSet {
  bool all = false;
  std::vector<ContextCode> codes;

  static ContextSet everything();
  static ContextSet of(std::vector<ContextCode> codes);

  std::uint64_t size(const CausalModel& m) const;
  bool contains(ContextCode u) const;
  void for_each(const CausalModel& m, const std::function<void(ContextCode)>& fn) const;
  std::vector<ContextCode> materialize(const CausalModel& m) const;
};

/// Probability over contexts; weights nonnegative rationals summing to 1.
/// Contexts absent from `weights` have probability zero.
struct ContextDistribution {
  std::vector<std::pair<ContextCode, Rat>> weights;  // sorted by code

  void validate(const CausalModel& m) const;  // WeightSumNotOne on violation
  Rat probability_of(ContextCode u) const;
  Rat mass(const std::vector<ContextCode>& codes) const;
};

struct GoodnessPair {
  Rat alpha;
  Rat beta;
};

// ---- definition variants ------------------------------------------------------

enum class NecessityMode { ConjunctExtendable, SubsetIsCause };
enum class WitnessConstraint { ActualValues, Unconstrained };
enum class ContextScope { GivenK, AllContexts };

struct DefinitionVariant {
  NecessityMode necessity = NecessityMode::ConjunctExtendable;
  WitnessConstraint witness = WitnessConstraint::ActualValues;
  ContextScope scope = ContextScope::GivenK;

  static DefinitionVariant halpern();
  static DefinitionVariant mmts();
};

// ---- verdicts -------------------------------------------------------------------

struct NecessityRecord {
  ContextCode u = 0;
  bool ok = false;
  std::optional<SufficientCauseWitness> witness;
};

struct ExplanationVerdict {
  bool holds = false;
  bool ex1_necessity = false;    // first EX1 clause over the relevant contexts
  bool ex1_sufficiency = false;  // [X<-x]phi throughout the context set
  bool ex2_minimal = false;
  bool ex3_possible = false;
  const char* failed = nullptr;
  std::vector<NecessityRecord> necessity;
  std::optional<ContextCode> ex1b_failure_context;
  std::optional<ContextCode> ex3_witness;
  std::optional<Conjunction> ex2_violating_subset;
  // Partial mode only: achieved (alpha, beta).
  std::optional<GoodnessPair> achieved;
};

// ---- operations -----------------------------------------------------------------

/// Contexts of K satisfying psi (psi may contain interventions).
ContextSet k_sat(const CausalModel& m, const ContextSet& k, const Formula& psi);

/// Contexts of K satisfying X=x and phi where the EX1 necessity clause holds
/// for the candidate, per the variant.
ContextSet k_sc2(const CausalModel& m, const ContextSet& k, const Conjunction& cand,
                 const Formula& phi, const DefinitionVariant& variant = DefinitionVariant::halpern());

ExplanationVerdict is_explanation(const CausalModel& m, const ContextSet& k,
                                  const Conjunction& cand, const Formula& phi,
                                  const DefinitionVariant& variant = DefinitionVariant::halpern());

/// Probabilistic relaxation: alpha bounds the conditional necessity mass,
/// beta the unconditional sufficiency mass. Raises ZeroProbabilityCondition
/// when Pr(K and X=x and phi) = 0.
ExplanationVerdict is_partial_explanation(const CausalModel& m, const ContextDistribution& pr,
                                          const ContextSet& k, const Conjunction& cand,
                                          const Formula& phi, const GoodnessPair& goodness,
                                          const DefinitionVariant& variant = DefinitionVariant::halpern());

/// All explanations of phi relative to K with at most max_size conjuncts,
/// canonical order. Candidates range over endogenous variables not in phi,
/// with value tuples realized in some phi-satisfying context of K.
std::vector<std::pair<Conjunction, ExplanationVerdict>> find_explanations(
    const CausalModel& m, const ContextSet& k, const Formula& phi,
    const DefinitionVariant& variant, int max_size);

/// Partial-mode enumeration; returns every realizable candidate with its
/// verdict (holders and near-misses both carry achieved values). Candidates
/// with zero conditioning mass are skipped.
std::vector<std::pair<Conjunction, ExplanationVerdict>> evaluate_partial_candidates(
    const CausalModel& m, const ContextDistribution& pr, const ContextSet& k,
    const Formula& phi, const GoodnessPair& goodness, const DefinitionVariant& variant,
    int max_size, const std::vector<int>& exclude_ordinals = {});

struct Theorem2Report {
  bool cond1 = false;  // beta <= Pr(K_{[X<-x](O=o)})
  bool cond2 = false;  // no strict subset reaches beta
  bool cond3 = false;  // alpha <= Pr(flip possible | K_{X=x, O=o})
  bool direct_verdict = false;
  bool implication_holds = false;
  Rat beta_achieved;
  Rat alpha_flip;       // the conditional in cond3
};

/// Checks the depth-2 partial-explanation sufficient conditions against the
/// direct verdict. Requires a depth-2 lifted model shape.
Theorem2Report verify_theorem2(const CausalModel& m, const ContextDistribution& pr,
                               const Conjunction& cand, int output_ordinal, int o_value,
                               const GoodnessPair& goodness);

}  // namespace cex

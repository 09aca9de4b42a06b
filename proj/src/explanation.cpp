#include "cex/core/explanation.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "cex/core/classifier.hpp"
#include "cex/core/error.hpp"
#include "enumeration.hpp"

namespace cex {

using detail::for_each_combination;
using detail::for_each_tuple;

// ---- ContextSet -------------------------------------------------------------

ContextSet ContextSet::everything() {
  ContextSet s;
  s.all = true;
  return s;
}

ContextSet ContextSet::of(std::vector<ContextCode> codes) {
  std::sort(codes.begin(), codes.end());
  codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
  ContextSet s;
  s.codes = std::move(codes);
  return s;
}

std::uint64_t ContextSet::size(const CausalModel& m) const {
  return all ? m.context_space() : codes.size();
}

bool ContextSet::contains(ContextCode u) const {
  return all || std::binary_search(codes.begin(), codes.end(), u);
}

void ContextSet::for_each(const CausalModel& m,
                          const std::function<void(ContextCode)>& fn) const {
  if (all) {
    for (ContextCode u = 0; u < m.context_space(); ++u) fn(u);
  } else {
    for (ContextCode u : codes) fn(u);
  }
}

std::vector<ContextCode> ContextSet::materialize(const CausalModel& m) const {
  if (!all) return codes;
  std::vector<ContextCode> out;
  out.reserve(static_cast<std::size_t>(m.context_space()));
  for (ContextCode u = 0; u < m.context_space(); ++u) out.push_back(u);
  return out;
}

// ---- ContextDistribution ----------------------------------------------------

void ContextDistribution::validate(const CausalModel& m) const {
  Rat sum = 0;
  ContextCode prev = 0;
  bool first = true;
  for (const auto& [u, w] : weights) {
    if (u >= m.context_space())
      fail(ErrorCode::InvalidArgument, "distribution mentions a context out of range");
    if (!first && u <= prev)
      fail(ErrorCode::InvalidArgument, "distribution contexts must be sorted and distinct");
    if (w < 0) fail(ErrorCode::InvalidArgument, "negative probability weight");
    sum += w;
    prev = u;
    first = false;
  }
  if (sum != 1)
    fail(ErrorCode::WeightSumNotOne,
         "context weights sum to " + rational_str(sum) + ", expected 1");
}

Rat ContextDistribution::probability_of(ContextCode u) const {
  auto it = std::lower_bound(weights.begin(), weights.end(), u,
                             [](const auto& entry, ContextCode code) { return entry.first < code; });
  if (it == weights.end() || it->first != u) return Rat(0);
  return it->second;
}

Rat ContextDistribution::mass(const std::vector<ContextCode>& codes) const {
  Rat sum = 0;
  std::size_t i = 0, j = 0;
  while (i < codes.size() && j < weights.size()) {
    if (weights[j].first < codes[i]) {
      ++j;
    } else if (weights[j].first > codes[i]) {
      ++i;
    } else {
      sum += weights[j].second;
      ++i;
      ++j;
    }
  }
  return sum;
}

// ---- variants ---------------------------------------------------------------

DefinitionVariant DefinitionVariant::halpern() { return DefinitionVariant{}; }

DefinitionVariant DefinitionVariant::mmts() {
  return DefinitionVariant{NecessityMode::SubsetIsCause, WitnessConstraint::Unconstrained,
                           ContextScope::AllContexts};
}

namespace {

void reject_causal(const Formula& phi) {
  if (phi.has_causal())
    fail(ErrorCode::NestedIntervention,
         "cause and explanation queries require an intervention-free formula");
}

ContextSet scope_adjusted(const ContextSet& k, const DefinitionVariant& variant) {
  return variant.scope == ContextScope::AllContexts ? ContextSet::everything() : k;
}

WitnessMode witness_mode(const DefinitionVariant& variant) {
  return variant.witness == WitnessConstraint::ActualValues ? WitnessMode::ActualValues
                                                            : WitnessMode::EmptyOnly;
}

std::vector<int> all_endo(const CausalModel& m) {
  std::vector<int> out;
  for (int v = m.exo_count(); v < m.var_count(); ++v) out.push_back(v);
  return out;
}

/// Per-query cache shared across candidates and their minimality subsets.
/// The minimal-AC2 family at a context does not depend on the candidate, so
/// enumeration over many candidates pays for it once per context.
struct EvalCache {
  const CausalModel& m;
  const Formula& phi;
  DefinitionVariant variant;
  std::map<ContextCode, Assignment> actuals;
  std::map<ContextCode, CauseFamily> families;

  const Assignment& actual_of(ContextCode u) {
    auto it = actuals.find(u);
    if (it == actuals.end()) it = actuals.emplace(u, m.evaluate(u)).first;
    return it->second;
  }

  const CauseFamily& family_of(ContextCode u) {
    auto it = families.find(u);
    if (it == families.end())
      it = families
               .emplace(u, minimal_ac2_family(m, u, phi, all_endo(m), witness_mode(variant)))
               .first;
    return it->second;
  }
};

/// The EX1 first-clause check at one context (which must already satisfy
/// cand and phi), per the variant.
std::optional<SufficientCauseWitness> necessity_witness(EvalCache& cache, ContextCode u,
                                                        const Conjunction& cand) {
  const CausalModel& m = cache.m;
  const Formula& phi = cache.phi;
  const Assignment& actual = cache.actual_of(u);
  if (!eval_formula(m, u, actual, phi)) return std::nullopt;
  WitnessMode mode = witness_mode(cache.variant);

  if (cache.variant.necessity == NecessityMode::ConjunctExtendable) {
    std::vector<int> touch;
    for (const auto& [ord, val] : cand.events)
      if (actual[static_cast<std::size_t>(ord)] == val) touch.push_back(ord);
    if (touch.empty()) return std::nullopt;
    const CauseFamily& fam = cache.family_of(u);
    for (const auto& [c, w] : fam.causes)
      for (int t : touch)
        if (c.contains(t))
          return SufficientCauseWitness{{t, actual[static_cast<std::size_t>(t)]}, c, w};
    return std::nullopt;
  }

  // Subset-is-cause: some nonempty subset of the candidate, at its stated
  // values (which must be actual), is itself a cause under the witness mode.
  std::vector<int> live;
  for (int i = 0; i < cand.size(); ++i) {
    const auto& [ord, val] = cand.events[static_cast<std::size_t>(i)];
    if (actual[static_cast<std::size_t>(ord)] == val) live.push_back(i);
  }
  const int n = static_cast<int>(live.size());
  std::optional<SufficientCauseWitness> found;
  for (int s = 1; s <= n && !found; ++s) {
    for_each_combination(n, s, [&](const std::vector<int>& idx) {
      std::vector<int> positions;
      positions.reserve(idx.size());
      for (int i : idx) positions.push_back(live[static_cast<std::size_t>(i)]);
      Conjunction sub = cand.restrict_to(positions);
      auto w = ac2_search(m, u, actual, sub, phi, mode);
      if (!w) return true;
      bool minimal = true;
      for (int t = 1; t < sub.size() && minimal; ++t) {
        for_each_combination(sub.size(), t, [&](const std::vector<int>& inner) {
          Conjunction strict = sub.restrict_to(inner);
          if (ac2_search(m, u, actual, strict, phi, mode)) {
            minimal = false;
            return false;
          }
          return true;
        });
      }
      if (!minimal) return true;
      found = SufficientCauseWitness{sub.events[0], sub, std::move(*w)};
      return false;
    });
  }
  return found;
}

bool satisfies_ex1(EvalCache& cache, const std::vector<ContextCode>& contexts,
                   const Conjunction& cand) {
  const CausalModel& m = cache.m;
  const Formula& phi = cache.phi;
  Intervention iv;
  iv.settings = cand.events;
  for (ContextCode u : contexts) {
    const Assignment& a = cache.actual_of(u);
    if (conjunction_holds(m, a, cand) && eval_formula(m, u, a, phi)) {
      if (!necessity_witness(cache, u, cand)) return false;
    }
    Assignment forced = m.evaluate(u, iv);
    if (!eval_formula(m, u, forced, phi)) return false;
  }
  return true;
}

}  // namespace

// ---- operations -------------------------------------------------------------

ContextSet k_sat(const CausalModel& m, const ContextSet& k, const Formula& psi) {
  std::vector<ContextCode> out;
  k.for_each(m, [&](ContextCode u) {
    if (satisfies(m, u, psi)) out.push_back(u);
  });
  return ContextSet::of(std::move(out));
}

ContextSet k_sc2(const CausalModel& m, const ContextSet& k, const Conjunction& cand,
                 const Formula& phi, const DefinitionVariant& variant) {
  reject_causal(phi);
  EvalCache cache{m, phi, variant, {}, {}};
  ContextSet kk = scope_adjusted(k, variant);
  std::vector<ContextCode> out;
  kk.for_each(m, [&](ContextCode u) {
    const Assignment& a = cache.actual_of(u);
    if (!(conjunction_holds(m, a, cand) && eval_formula(m, u, a, phi))) return;
    if (necessity_witness(cache, u, cand)) out.push_back(u);
  });
  return ContextSet::of(std::move(out));
}

namespace {

ExplanationVerdict explanation_core(EvalCache& cache, const std::vector<ContextCode>& contexts,
                                    const Conjunction& cand) {
  const CausalModel& m = cache.m;
  const Formula& phi = cache.phi;
  ExplanationVerdict v;

  v.ex1_necessity = true;
  for (ContextCode u : contexts) {
    const Assignment& a = cache.actual_of(u);
    if (!(conjunction_holds(m, a, cand) && eval_formula(m, u, a, phi))) continue;
    if (!v.ex3_witness) v.ex3_witness = u;
    NecessityRecord rec;
    rec.u = u;
    rec.witness = necessity_witness(cache, u, cand);
    rec.ok = rec.witness.has_value();
    if (!rec.ok) v.ex1_necessity = false;
    v.necessity.push_back(std::move(rec));
  }
  v.ex3_possible = v.ex3_witness.has_value();

  v.ex1_sufficiency = true;
  {
    Intervention iv;
    iv.settings = cand.events;
    for (ContextCode u : contexts) {
      Assignment a = m.evaluate(u, iv);
      if (!eval_formula(m, u, a, phi)) {
        v.ex1_sufficiency = false;
        v.ex1b_failure_context = u;
        break;
      }
    }
  }

  v.ex2_minimal = true;
  for (int s = 1; s < cand.size() && v.ex2_minimal; ++s) {
    for_each_combination(cand.size(), s, [&](const std::vector<int>& idx) {
      Conjunction sub = cand.restrict_to(idx);
      if (satisfies_ex1(cache, contexts, sub)) {
        v.ex2_minimal = false;
        v.ex2_violating_subset = std::move(sub);
        return false;
      }
      return true;
    });
  }

  v.holds = v.ex1_necessity && v.ex1_sufficiency && v.ex2_minimal && v.ex3_possible;
  v.failed = v.holds ? nullptr
                     : (!(v.ex1_necessity && v.ex1_sufficiency)
                            ? "EX1"
                            : (!v.ex2_minimal ? "EX2" : "EX3"));
  return v;
}

}  // namespace

ExplanationVerdict is_explanation(const CausalModel& m, const ContextSet& k,
                                  const Conjunction& cand, const Formula& phi,
                                  const DefinitionVariant& variant) {
  reject_causal(phi);
  EvalCache cache{m, phi, variant, {}, {}};
  std::vector<ContextCode> contexts = scope_adjusted(k, variant).materialize(m);
  return explanation_core(cache, contexts, cand);
}

namespace {

struct PartialNumbers {
  Rat conditioning_mass;  // Pr over K-contexts with cand & phi
  Rat conditional;        // Pr(K_sc2 | conditioning), valid when mass > 0
  Rat sufficiency;        // Pr over K-contexts with [cand]phi
};

PartialNumbers partial_numbers(EvalCache& cache, const ContextDistribution& pr,
                               const std::vector<ContextCode>& contexts, const Conjunction& cand,
                               std::vector<NecessityRecord>* records) {
  const CausalModel& m = cache.m;
  const Formula& phi = cache.phi;
  PartialNumbers out{Rat(0), Rat(0), Rat(0)};
  Rat sc2_mass = 0;
  Intervention iv;
  iv.settings = cand.events;
  for (ContextCode u : contexts) {
    Rat w = pr.probability_of(u);
    const Assignment& a = cache.actual_of(u);
    if (conjunction_holds(m, a, cand) && eval_formula(m, u, a, phi)) {
      out.conditioning_mass += w;
      NecessityRecord rec;
      rec.u = u;
      rec.witness = necessity_witness(cache, u, cand);
      rec.ok = rec.witness.has_value();
      if (rec.ok) sc2_mass += w;
      if (records) records->push_back(std::move(rec));
    }
    Assignment forced = m.evaluate(u, iv);
    if (eval_formula(m, u, forced, phi)) out.sufficiency += w;
  }
  if (out.conditioning_mass != 0) out.conditional = sc2_mass / out.conditioning_mass;
  return out;
}

using NumbersMemo = std::map<std::vector<std::pair<int, int>>, PartialNumbers>;

PartialNumbers memo_numbers(EvalCache& cache, const ContextDistribution& pr,
                            const std::vector<ContextCode>& contexts, const Conjunction& cand,
                            NumbersMemo* memo) {
  if (!memo) return partial_numbers(cache, pr, contexts, cand, nullptr);
  auto it = memo->find(cand.events);
  if (it == memo->end())
    it = memo->emplace(cand.events, partial_numbers(cache, pr, contexts, cand, nullptr)).first;
  return it->second;
}

ExplanationVerdict partial_core(EvalCache& cache, const ContextDistribution& pr,
                                const std::vector<ContextCode>& contexts, const Conjunction& cand,
                                const GoodnessPair& goodness, NumbersMemo* memo) {
  const CausalModel& m = cache.m;
  const Formula& phi = cache.phi;
  if (goodness.alpha < 0 || goodness.alpha > 1 || goodness.beta < 0 || goodness.beta > 1)
    fail(ErrorCode::InvalidArgument, "goodness thresholds must lie in [0,1]");

  ExplanationVerdict v;
  PartialNumbers nums = partial_numbers(cache, pr, contexts, cand, &v.necessity);
  if (nums.conditioning_mass == 0)
    fail(ErrorCode::ZeroProbabilityCondition,
         "the candidate and formula have probability zero in K; the conditional is undefined");

  v.ex1_necessity = goodness.alpha <= nums.conditional;
  v.ex1_sufficiency = goodness.beta <= nums.sufficiency;
  v.achieved = GoodnessPair{nums.conditional, nums.sufficiency};

  v.ex2_minimal = true;
  for (int s = 1; s < cand.size() && v.ex2_minimal; ++s) {
    for_each_combination(cand.size(), s, [&](const std::vector<int>& idx) {
      Conjunction sub = cand.restrict_to(idx);
      PartialNumbers sn = memo_numbers(cache, pr, contexts, sub, memo);
      if (sn.conditioning_mass == 0) return true;  // conditional undefined; cannot violate
      if (goodness.alpha <= sn.conditional && goodness.beta <= sn.sufficiency) {
        v.ex2_minimal = false;
        v.ex2_violating_subset = std::move(sub);
        return false;
      }
      return true;
    });
  }

  for (ContextCode u : contexts) {
    const Assignment& a = cache.actual_of(u);
    if (conjunction_holds(m, a, cand) && eval_formula(m, u, a, phi)) {
      v.ex3_witness = u;
      break;
    }
  }
  v.ex3_possible = v.ex3_witness.has_value();

  v.holds = v.ex1_necessity && v.ex1_sufficiency && v.ex2_minimal && v.ex3_possible;
  v.failed = v.holds ? nullptr
                     : (!(v.ex1_necessity && v.ex1_sufficiency)
                            ? "EX1'"
                            : (!v.ex2_minimal ? "EX2'" : "EX3'"));
  return v;
}

}  // namespace

ExplanationVerdict is_partial_explanation(const CausalModel& m, const ContextDistribution& pr,
                                          const ContextSet& k, const Conjunction& cand,
                                          const Formula& phi, const GoodnessPair& goodness,
                                          const DefinitionVariant& variant) {
  reject_causal(phi);
  if (goodness.alpha < 0 || goodness.alpha > 1 || goodness.beta < 0 || goodness.beta > 1)
    fail(ErrorCode::InvalidArgument, "goodness thresholds must lie in [0,1]");
  pr.validate(m);
  EvalCache cache{m, phi, variant, {}, {}};
  std::vector<ContextCode> contexts = scope_adjusted(k, variant).materialize(m);
  return partial_core(cache, pr, contexts, cand, goodness, nullptr);
}

namespace {

struct CandidateSpace {
  // Variable ordinal sets paired with realized value tuples, canonical order.
  std::vector<Conjunction> candidates;
};

/// Value tuples for each variable subset realized in the given contexts.
CandidateSpace realized_candidates(const CausalModel& m,
                                   const std::vector<ContextCode>& phi_contexts,
                                   const std::vector<int>& domain, int max_size) {
  CandidateSpace out;
  std::vector<Assignment> assignments;
  assignments.reserve(phi_contexts.size());
  for (ContextCode u : phi_contexts) assignments.push_back(m.evaluate(u));
  const int n = static_cast<int>(domain.size());
  int cap = std::min(max_size, n);
  for (int s = 1; s <= cap; ++s) {
    for_each_combination(n, s, [&](const std::vector<int>& idx) {
      std::set<std::vector<int>> tuples;
      for (const Assignment& a : assignments) {
        std::vector<int> t;
        t.reserve(idx.size());
        for (int i : idx) t.push_back(a[static_cast<std::size_t>(domain[static_cast<std::size_t>(i)])]);
        tuples.insert(std::move(t));
      }
      for (const auto& t : tuples) {
        std::vector<std::pair<int, int>> events;
        for (std::size_t i = 0; i < idx.size(); ++i)
          events.emplace_back(domain[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])],
                              t[i]);
        out.candidates.push_back(Conjunction{std::move(events)});
      }
      return true;
    });
  }
  return out;
}

}  // namespace

std::vector<std::pair<Conjunction, ExplanationVerdict>> find_explanations(
    const CausalModel& m, const ContextSet& k, const Formula& phi,
    const DefinitionVariant& variant, int max_size) {
  reject_causal(phi);
  if (max_size <= 0) max_size = m.var_count() - 1;
  std::vector<ContextCode> contexts = scope_adjusted(k, variant).materialize(m);

  std::vector<ContextCode> phi_contexts;
  for (ContextCode u : contexts)
    if (satisfies(m, u, phi)) phi_contexts.push_back(u);
  if (phi_contexts.empty()) return {};

  EvalCache cache{m, phi, variant, {}, {}};

  // Cause-participation sets, used to drop candidates with causally inert
  // conjuncts: per phi-context, the variables appearing in some actual cause.
  std::map<ContextCode, std::vector<int>> cause_vars;
  for (ContextCode u : phi_contexts) {
    CauseFamily local;
    const CauseFamily* fam;
    if (witness_mode(variant) == WitnessMode::ActualValues) {
      fam = &cache.family_of(u);
    } else {
      local = minimal_ac2_family(m, u, phi, all_endo(m), WitnessMode::ActualValues);
      fam = &local;
    }
    std::set<int> vars;
    for (const auto& [c, _] : fam->causes)
      for (const auto& [ord, __] : c.events) vars.insert(ord);
    cause_vars[u] = std::vector<int>(vars.begin(), vars.end());
  }

  std::vector<int> phi_vars = phi.variables();
  std::vector<int> domain;
  for (int v = m.exo_count(); v < m.var_count(); ++v)
    if (!std::binary_search(phi_vars.begin(), phi_vars.end(), v)) domain.push_back(v);

  CandidateSpace space = realized_candidates(m, phi_contexts, domain, max_size);
  std::vector<std::pair<Conjunction, ExplanationVerdict>> out;
  for (const Conjunction& cand : space.candidates) {
    bool admissible = true;
    for (const auto& [ord, val] : cand.events) {
      bool live = false;
      for (ContextCode u : phi_contexts) {
        const Assignment& a = cache.actual_of(u);
        if (!conjunction_holds(m, a, cand)) continue;
        const auto& vars = cause_vars[u];
        if (std::binary_search(vars.begin(), vars.end(), ord)) {
          live = true;
          break;
        }
      }
      if (!live) {
        admissible = false;
        break;
      }
    }
    if (!admissible) continue;
    ExplanationVerdict v = explanation_core(cache, contexts, cand);
    if (v.holds) out.emplace_back(cand, std::move(v));
  }
  return out;
}

std::vector<std::pair<Conjunction, ExplanationVerdict>> evaluate_partial_candidates(
    const CausalModel& m, const ContextDistribution& pr, const ContextSet& k,
    const Formula& phi, const GoodnessPair& goodness, const DefinitionVariant& variant,
    int max_size, const std::vector<int>& exclude_ordinals) {
  reject_causal(phi);
  pr.validate(m);
  if (max_size <= 0) max_size = m.var_count() - 1;
  std::vector<ContextCode> contexts = scope_adjusted(k, variant).materialize(m);

  std::vector<ContextCode> phi_contexts;
  for (ContextCode u : contexts)
    if (satisfies(m, u, phi)) phi_contexts.push_back(u);
  if (phi_contexts.empty()) return {};

  std::vector<int> excluded = phi.variables();
  excluded.insert(excluded.end(), exclude_ordinals.begin(), exclude_ordinals.end());
  std::sort(excluded.begin(), excluded.end());
  std::vector<int> domain;
  for (int v = m.exo_count(); v < m.var_count(); ++v)
    if (!std::binary_search(excluded.begin(), excluded.end(), v)) domain.push_back(v);

  CandidateSpace space = realized_candidates(m, phi_contexts, domain, max_size);
  EvalCache cache{m, phi, variant, {}, {}};
  NumbersMemo memo;
  std::vector<std::pair<Conjunction, ExplanationVerdict>> out;
  for (const Conjunction& cand : space.candidates) {
    PartialNumbers probe = memo_numbers(cache, pr, contexts, cand, &memo);
    if (probe.conditioning_mass == 0) continue;  // unconditionable candidate
    out.emplace_back(cand, partial_core(cache, pr, contexts, cand, goodness, &memo));
  }
  return out;
}

Theorem2Report verify_theorem2(const CausalModel& m, const ContextDistribution& pr,
                               const Conjunction& cand, int output_ordinal, int o_value,
                               const GoodnessPair& goodness) {
  std::vector<int> pixels;
  int output = -1;
  if (!is_depth2_lift(m, &pixels, &output) || output != output_ordinal)
    fail(ErrorCode::NotDepthTwo,
         "theorem 2 requires a depth-2 classifier lift with the given output variable");
  if (goodness.alpha <= 0 || goodness.beta <= 0)
    fail(ErrorCode::InvalidArgument, "theorem 2 requires alpha > 0 and beta > 0");
  pr.validate(m);

  Formula phi = Formula::prim(output_ordinal, o_value);
  Theorem2Report r;

  // cond1 and the beta side of cond2 are plain sufficiency masses.
  auto sufficiency_mass = [&](const std::vector<std::pair<int, int>>& events) {
    Intervention iv;
    iv.settings = events;
    Rat sum = 0;
    for (ContextCode u = 0; u < m.context_space(); ++u) {
      Assignment a = m.evaluate(u, iv);
      if (eval_formula(m, u, a, phi)) sum += pr.probability_of(u);
    }
    return sum;
  };

  r.beta_achieved = sufficiency_mass(cand.events);
  r.cond1 = goodness.beta <= r.beta_achieved;

  // cond2: no strict subset (including the empty conjunction) reaches beta.
  r.cond2 = true;
  for (int s = 0; s < cand.size() && r.cond2; ++s) {
    for_each_combination(cand.size(), s, [&](const std::vector<int>& idx) {
      std::vector<std::pair<int, int>> events;
      for (int i : idx) events.push_back(cand.events[static_cast<std::size_t>(i)]);
      if (goodness.beta <= sufficiency_mass(events)) {
        r.cond2 = false;
        return false;
      }
      return true;
    });
  }

  // cond3: flip probability conditioned on the candidate and output holding.
  {
    Rat denom = 0, flip = 0;
    std::vector<int> radixes;
    for (const auto& [ord, _] : cand.events) radixes.push_back(m.var(ord).range.size());
    for (ContextCode u = 0; u < m.context_space(); ++u) {
      Assignment a = m.evaluate(u);
      if (!(conjunction_holds(m, a, cand) && eval_formula(m, u, a, phi))) continue;
      Rat w = pr.probability_of(u);
      denom += w;
      bool can_flip = false;
      for_each_tuple(radixes, [&](const std::vector<int>& tuple) {
        Intervention iv;
        for (std::size_t i = 0; i < tuple.size(); ++i)
          iv.settings.emplace_back(cand.events[i].first, tuple[i]);
        std::sort(iv.settings.begin(), iv.settings.end());
        Assignment b = m.evaluate(u, iv);
        if (!eval_formula(m, u, b, phi)) {
          can_flip = true;
          return false;
        }
        return true;
      });
      if (can_flip) flip += w;
    }
    if (denom == 0)
      fail(ErrorCode::ZeroProbabilityCondition,
           "the candidate and output have probability zero; the conditional is undefined");
    r.alpha_flip = flip / denom;
    r.cond3 = goodness.alpha <= r.alpha_flip;
  }

  r.direct_verdict =
      is_partial_explanation(m, pr, ContextSet::everything(), cand, phi, goodness).holds;
  r.implication_holds = !(r.cond1 && r.cond2 && r.cond3) || r.direct_verdict;
  return r;
}

}  // namespace cex

#include "cex/core/causation.hpp"

#include <algorithm>

#include "cex/core/error.hpp"
#include "enumeration.hpp"

namespace cex {

using detail::for_each_combination;

namespace {

void reject_causal(const Formula& phi) {
  if (phi.has_causal())
    fail(ErrorCode::NestedIntervention,
         "cause and explanation queries require an intervention-free formula");
}

std::vector<int> endo_ordinals(const CausalModel& m) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(m.endo_count()));
  for (int v = m.exo_count(); v < m.var_count(); ++v) out.push_back(v);
  return out;
}

}  // namespace

// ---- Conjunction ------------------------------------------------------------

std::vector<int> Conjunction::ordinals() const {
  std::vector<int> out;
  out.reserve(events.size());
  for (const auto& [ord, _] : events) out.push_back(ord);
  return out;
}

bool Conjunction::contains(int ordinal) const {
  for (const auto& [ord, _] : events)
    if (ord == ordinal) return true;
  return false;
}

Conjunction Conjunction::restrict_to(const std::vector<int>& positions) const {
  std::vector<std::pair<int, int>> picked;
  picked.reserve(positions.size());
  for (int p : positions) picked.push_back(events[static_cast<std::size_t>(p)]);
  return make(std::move(picked));
}

Conjunction Conjunction::make(std::vector<std::pair<int, int>> events) {
  if (events.empty()) fail(ErrorCode::EmptyCandidate, "empty conjunction");
  std::sort(events.begin(), events.end());
  for (std::size_t i = 1; i < events.size(); ++i)
    if (events[i].first == events[i - 1].first)
      fail(ErrorCode::InvalidArgument, "conjunction mentions a variable twice");
  return Conjunction{std::move(events)};
}

std::string conjunction_str(const CausalModel& m, const Conjunction& c) {
  std::string s;
  for (std::size_t i = 0; i < c.events.size(); ++i) {
    if (i) s += " & ";
    const auto& [ord, val] = c.events[i];
    s += m.var(ord).name + "=" + value_str(m.var(ord).range.at(val));
  }
  return s;
}

Formula conjunction_formula(const Conjunction& c) {
  Formula f = Formula::prim(c.events[0].first, c.events[0].second);
  for (std::size_t i = 1; i < c.events.size(); ++i)
    f = Formula::conj(std::move(f), Formula::prim(c.events[i].first, c.events[i].second));
  return f;
}

bool conjunction_holds(const CausalModel& m, const Assignment& a, const Conjunction& c) {
  (void)m;
  for (const auto& [ord, val] : c.events)
    if (a[static_cast<std::size_t>(ord)] != val) return false;
  return true;
}

// ---- AC2 search -------------------------------------------------------------

std::optional<ActualCauseWitness> ac2_search(const CausalModel& m, ContextCode u,
                                             const Assignment& actual,
                                             const Conjunction& cand, const Formula& phi,
                                             WitnessMode mode) {
  std::vector<int> domain;
  if (mode == WitnessMode::ActualValues)
    for (int v = m.exo_count(); v < m.var_count(); ++v)
      if (!cand.contains(v)) domain.push_back(v);
  const int n = static_cast<int>(domain.size());
  const int k = cand.size();

  std::optional<ActualCauseWitness> found;
  for (int wsize = 0; wsize <= n && !found; ++wsize) {
    for_each_combination(n, wsize, [&](const std::vector<int>& picks) {
      std::vector<std::pair<int, int>> fixed;
      fixed.reserve(picks.size());
      for (int p : picks) {
        int ord = domain[static_cast<std::size_t>(p)];
        fixed.emplace_back(ord, actual[static_cast<std::size_t>(ord)]);
      }
      std::vector<int> tuple(static_cast<std::size_t>(k), 0);
      while (true) {
        Intervention iv;
        iv.settings.reserve(static_cast<std::size_t>(k) + fixed.size());
        for (int i = 0; i < k; ++i)
          iv.settings.emplace_back(cand.events[static_cast<std::size_t>(i)].first,
                                   tuple[static_cast<std::size_t>(i)]);
        for (const auto& f : fixed) iv.settings.push_back(f);
        std::sort(iv.settings.begin(), iv.settings.end());
        Assignment a = m.evaluate(u, iv);
        if (!eval_formula(m, u, a, phi)) {
          found = ActualCauseWitness{tuple, fixed};
          return false;
        }
        int pos = k - 1;
        while (pos >= 0) {
          auto& d = tuple[static_cast<std::size_t>(pos)];
          if (++d < m.var(cand.events[static_cast<std::size_t>(pos)].first).range.size()) break;
          d = 0;
          --pos;
        }
        if (pos < 0) return true;
      }
    });
    if (mode == WitnessMode::EmptyOnly) break;
  }
  return found;
}

CauseFamily minimal_ac2_family(const CausalModel& m, ContextCode u, const Formula& phi,
                               const std::vector<int>& domain, WitnessMode mode,
                               const std::vector<int>* stop_when_touching) {
  CauseFamily fam;
  Assignment actual = m.evaluate(u);
  std::vector<int> dom = domain;
  std::sort(dom.begin(), dom.end());
  dom.erase(std::unique(dom.begin(), dom.end()), dom.end());
  const int n = static_cast<int>(dom.size());

  std::vector<std::vector<int>> found_sets;
  bool stopped = false;
  for (int size = 1; size <= n && !stopped; ++size) {
    for_each_combination(n, size, [&](const std::vector<int>& idx) {
      std::vector<std::pair<int, int>> events;
      events.reserve(idx.size());
      std::vector<int> ords;
      ords.reserve(idx.size());
      for (int i : idx) {
        int ord = dom[static_cast<std::size_t>(i)];
        ords.push_back(ord);
        events.emplace_back(ord, actual[static_cast<std::size_t>(ord)]);
      }
      for (const auto& prior : found_sets)
        if (std::includes(ords.begin(), ords.end(), prior.begin(), prior.end())) return true;
      Conjunction cand{std::move(events)};
      auto w = ac2_search(m, u, actual, cand, phi, mode);
      if (!w) return true;
      found_sets.push_back(ords);
      fam.causes.emplace_back(std::move(cand), std::move(*w));
      if (stop_when_touching) {
        for (int t : *stop_when_touching)
          if (std::binary_search(ords.begin(), ords.end(), t)) {
            stopped = true;
            return false;
          }
      }
      return true;
    });
  }
  return fam;
}

// ---- actual causes ----------------------------------------------------------

CauseVerdict is_actual_cause(const CausalModel& m, ContextCode u,
                             const Conjunction& cand, const Formula& phi) {
  reject_causal(phi);
  CauseVerdict v;
  Assignment actual = m.evaluate(u);
  bool phi_actual = eval_formula(m, u, actual, phi);
  v.ac1 = conjunction_holds(m, actual, cand) && phi_actual;

  auto w = ac2_search(m, u, actual, cand, phi, WitnessMode::ActualValues);
  v.ac2 = w.has_value();
  if (w) v.witness = std::move(*w);

  v.ac3 = true;
  const int k = cand.size();
  for (int s = 1; s < k; ++s) {
    for_each_combination(k, s, [&](const std::vector<int>& idx) {
      Conjunction sub = cand.restrict_to(idx);
      bool sat = conjunction_holds(m, actual, sub) && phi_actual &&
                 ac2_search(m, u, actual, sub, phi, WitnessMode::ActualValues).has_value();
      if (sat) v.ac3 = false;
      v.minimality_trace.push_back({std::move(sub), sat});
      return true;
    });
  }

  v.holds = v.ac1 && v.ac2 && v.ac3;
  v.failed = v.holds ? nullptr : (!v.ac1 ? "AC1" : (!v.ac2 ? "AC2" : "AC3"));
  return v;
}

ButForVerdict is_but_for_cause(const CausalModel& m, ContextCode u,
                               const Conjunction& cand, const Formula& phi) {
  reject_causal(phi);
  ButForVerdict v;
  Assignment actual = m.evaluate(u);
  bool phi_actual = eval_formula(m, u, actual, phi);
  v.ac1 = conjunction_holds(m, actual, cand) && phi_actual;

  auto w = ac2_search(m, u, actual, cand, phi, WitnessMode::EmptyOnly);
  v.flip = w.has_value();
  if (w) v.alt_values = std::move(w->alt_values);

  // Minimality is inherited from the actual-cause definition: subsets may use
  // any witness set, not just the empty one.
  v.ac3 = true;
  const int k = cand.size();
  for (int s = 1; s < k; ++s) {
    for_each_combination(k, s, [&](const std::vector<int>& idx) {
      Conjunction sub = cand.restrict_to(idx);
      bool sat = conjunction_holds(m, actual, sub) && phi_actual &&
                 ac2_search(m, u, actual, sub, phi, WitnessMode::ActualValues).has_value();
      if (sat) v.ac3 = false;
      v.minimality_trace.push_back({std::move(sub), sat});
      return true;
    });
  }

  v.holds = v.ac1 && v.flip && v.ac3;
  v.failed = v.holds ? nullptr : (!v.ac1 ? "AC1" : (!v.flip ? "FLIP" : "AC3"));
  return v;
}

std::vector<std::pair<Conjunction, ActualCauseWitness>> find_actual_causes(
    const CausalModel& m, ContextCode u, const Formula& phi) {
  reject_causal(phi);
  Assignment actual = m.evaluate(u);
  if (!eval_formula(m, u, actual, phi)) return {};
  std::vector<int> phi_vars = phi.variables();
  std::vector<int> domain;
  for (int v = m.exo_count(); v < m.var_count(); ++v)
    if (!std::binary_search(phi_vars.begin(), phi_vars.end(), v)) domain.push_back(v);
  return minimal_ac2_family(m, u, phi, domain, WitnessMode::ActualValues).causes;
}

// ---- sufficient causes ------------------------------------------------------

namespace {

bool holds_everywhere_under(const CausalModel& m, const Conjunction& c, const Formula& phi,
                            std::optional<ContextCode>* failure) {
  Intervention iv;
  iv.settings = c.events;
  for (ContextCode u = 0; u < m.context_space(); ++u) {
    Assignment a = m.evaluate(u, iv);
    if (!eval_formula(m, u, a, phi)) {
      if (failure) *failure = u;
      return false;
    }
  }
  return true;
}

}  // namespace

SufficientVerdict is_sufficient_cause(const CausalModel& m, ContextCode u,
                                      const Conjunction& cand, const Formula& phi) {
  reject_causal(phi);
  SufficientVerdict v;
  Assignment actual = m.evaluate(u);
  bool phi_actual = eval_formula(m, u, actual, phi);
  v.sc1 = conjunction_holds(m, actual, cand) && phi_actual;

  // SC2: some conjunct, holding actually, extends by other variables at their
  // actual values to an actual cause of phi.
  std::vector<int> touch;
  for (const auto& [ord, val] : cand.events)
    if (actual[static_cast<std::size_t>(ord)] == val) touch.push_back(ord);
  if (phi_actual && !touch.empty()) {
    CauseFamily fam =
        minimal_ac2_family(m, u, phi, endo_ordinals(m), WitnessMode::ActualValues, &touch);
    for (auto& [c, w] : fam.causes) {
      int hit = -1;
      for (int t : touch)
        if (c.contains(t)) {
          hit = t;
          break;
        }
      if (hit < 0) continue;
      v.sc2 = true;
      v.witness = SufficientCauseWitness{
          {hit, actual[static_cast<std::size_t>(hit)]}, std::move(c), std::move(w)};
      break;
    }
  }

  {
    std::optional<ContextCode> fail_ctx;
    v.sc3 = holds_everywhere_under(m, cand, phi, &fail_ctx);
    v.sc3_failure_context = fail_ctx;
  }

  // SC4: no strict subset both keeps SC1 and SC3 and contains an actual cause.
  // A subset at actual values contains an actual cause exactly when it
  // satisfies the counterfactual clause itself (witness parts of the subset
  // can be absorbed at their actual values).
  v.sc4 = true;
  const int k = cand.size();
  for (int s = 1; s < k && v.sc4; ++s) {
    for_each_combination(k, s, [&](const std::vector<int>& idx) {
      Conjunction sub = cand.restrict_to(idx);
      if (!(conjunction_holds(m, actual, sub) && phi_actual)) return true;
      if (!holds_everywhere_under(m, sub, phi, nullptr)) return true;
      if (!ac2_search(m, u, actual, sub, phi, WitnessMode::ActualValues)) return true;
      v.sc4 = false;
      v.sc4_violating_subset = std::move(sub);
      return false;
    });
  }

  v.holds = v.sc1 && v.sc2 && v.sc3 && v.sc4;
  v.failed = v.holds ? nullptr
                     : (!v.sc1 ? "SC1" : (!v.sc2 ? "SC2" : (!v.sc3 ? "SC3" : "SC4")));
  return v;
}

// ---- structural predicates --------------------------------------------------

IndependenceVerdict is_causally_independent(const CausalModel& m,
                                            const std::vector<int>& ordinals) {
  std::vector<int> set = ordinals;
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  for (int ord : set)
    if (ord < 0 || ord >= m.var_count() || m.is_exogenous(ord))
      fail(ErrorCode::InvalidArgument, "causal independence is checked over endogenous variables");
  const int k = static_cast<int>(set.size());

  IndependenceVerdict verdict;

  // Influence can only travel along (semantic) graph edges, so when no member
  // reaches another through the graph the sweep below cannot find anything.
  {
    const CausalGraph& g = m.graph();
    bool linked = false;
    for (int src : set) {
      std::vector<char> seen(static_cast<std::size_t>(m.var_count()), 0);
      std::vector<int> stack{src};
      while (!stack.empty() && !linked) {
        int at = stack.back();
        stack.pop_back();
        for (int ch : g.children[static_cast<std::size_t>(at)]) {
          if (seen[static_cast<std::size_t>(ch)]) continue;
          seen[static_cast<std::size_t>(ch)] = 1;
          if (std::binary_search(set.begin(), set.end(), ch)) {
            linked = true;
            break;
          }
          stack.push_back(ch);
        }
      }
      if (linked) break;
    }
    if (!linked) {
      verdict.holds = true;
      return verdict;
    }
  }

  for (ContextCode u = 0; u < m.context_space(); ++u) {
    Assignment base = m.evaluate(u);
    for (int s = 1; s < k; ++s) {
      bool ok = for_each_combination(k, s, [&](const std::vector<int>& idx) {
        std::vector<int> tuple(static_cast<std::size_t>(s), 0);
        while (true) {
          Intervention iv;
          iv.settings.reserve(static_cast<std::size_t>(s));
          for (int i = 0; i < s; ++i)
            iv.settings.emplace_back(set[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])],
                                     tuple[static_cast<std::size_t>(i)]);
          Assignment a = m.evaluate(u, iv);
          for (int j = 0; j < k; ++j) {
            int ord = set[static_cast<std::size_t>(j)];
            if (iv.targets(ord)) continue;
            if (a[static_cast<std::size_t>(ord)] != base[static_cast<std::size_t>(ord)]) {
              IndependenceCounterexample ce;
              ce.u = u;
              for (const auto& [o, val] : iv.settings) {
                ce.subset.push_back(o);
                ce.subset_values.push_back(val);
              }
              ce.changed = ord;
              verdict.counterexample = std::move(ce);
              return false;
            }
          }
          int pos = s - 1;
          while (pos >= 0) {
            auto& d = tuple[static_cast<std::size_t>(pos)];
            int ord = set[static_cast<std::size_t>(idx[static_cast<std::size_t>(pos)])];
            if (++d < m.var(ord).range.size()) break;
            d = 0;
            --pos;
          }
          if (pos < 0) return true;
        }
      });
      if (!ok) return verdict;
    }
  }
  verdict.holds = true;
  return verdict;
}

DeterminedVerdict is_determined_by_context(const CausalModel& m,
                                           const std::vector<int>& ordinals) {
  std::vector<int> set = ordinals;
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  const int k = static_cast<int>(set.size());

  std::uint64_t total = 1;
  const std::uint64_t cap = default_context_cap();
  for (int ord : set) {
    std::uint64_t r = static_cast<std::uint64_t>(m.var(ord).range.size());
    if (total > cap / r) fail(ErrorCode::ScaleExceeded, "joint setting space exceeds the scale cap");
    total *= r;
  }
  std::vector<std::uint64_t> strides(static_cast<std::size_t>(k), 1);
  for (int i = k - 2; i >= 0; --i)
    strides[static_cast<std::size_t>(i)] =
        strides[static_cast<std::size_t>(i + 1)] *
        static_cast<std::uint64_t>(m.var(set[static_cast<std::size_t>(i + 1)]).range.size());

  std::vector<char> seen(static_cast<std::size_t>(total), 0);
  std::uint64_t distinct = 0;
  for (ContextCode u = 0; u < m.context_space() && distinct < total; ++u) {
    Assignment a = m.evaluate(u);
    std::uint64_t rank = 0;
    for (int i = 0; i < k; ++i)
      rank += static_cast<std::uint64_t>(a[static_cast<std::size_t>(set[static_cast<std::size_t>(i)])]) *
              strides[static_cast<std::size_t>(i)];
    if (!seen[static_cast<std::size_t>(rank)]) {
      seen[static_cast<std::size_t>(rank)] = 1;
      ++distinct;
    }
  }
  DeterminedVerdict v;
  v.holds = distinct == total;
  if (!v.holds) {
    for (std::uint64_t rank = 0; rank < total; ++rank) {
      if (seen[static_cast<std::size_t>(rank)]) continue;
      std::vector<int> values(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i)
        values[static_cast<std::size_t>(i)] = static_cast<int>(
            (rank / strides[static_cast<std::size_t>(i)]) %
            static_cast<std::uint64_t>(m.var(set[static_cast<std::size_t>(i)]).range.size()));
      v.missing_values = std::move(values);
      break;
    }
  }
  return v;
}

Theorem1Report verify_theorem1(const CausalModel& m, const std::vector<int>& superset,
                               const Conjunction& cand, const Formula& phi, ContextCode u) {
  reject_causal(phi);
  std::vector<int> sup = superset;
  std::sort(sup.begin(), sup.end());
  sup.erase(std::unique(sup.begin(), sup.end()), sup.end());

  Theorem1Report r;
  r.cond_a = is_causally_independent(m, sup).holds;
  r.cond_b = is_determined_by_context(m, sup).holds;

  r.cond_c = true;
  for (int pv : phi.variables())
    for (int par : m.graph().parents[static_cast<std::size_t>(pv)])
      if (m.is_exogenous(par) || !std::binary_search(sup.begin(), sup.end(), par))
        r.cond_c = false;

  r.cond_d = false;
  {
    const int k = static_cast<int>(sup.size());
    std::vector<int> tuple(static_cast<std::size_t>(k), 0);
    while (true) {
      Intervention iv;
      iv.settings.reserve(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i)
        iv.settings.emplace_back(sup[static_cast<std::size_t>(i)], tuple[static_cast<std::size_t>(i)]);
      Assignment a = m.evaluate(u, iv);
      if (!eval_formula(m, u, a, phi)) {
        r.cond_d = true;
        break;
      }
      int pos = k - 1;
      while (pos >= 0) {
        auto& d = tuple[static_cast<std::size_t>(pos)];
        if (++d < m.var(sup[static_cast<std::size_t>(pos)]).range.size()) break;
        d = 0;
        --pos;
      }
      if (pos < 0) break;
    }
  }

  r.cond_e = true;
  for (const auto& [ord, _] : cand.events)
    if (!std::binary_search(sup.begin(), sup.end(), ord)) r.cond_e = false;

  SufficientVerdict sv = is_sufficient_cause(m, u, cand, phi);
  r.sc134 = sv.sc1 && sv.sc3 && sv.sc4;
  r.sc2 = sv.sc2;
  r.sufficient = sv.holds;
  bool conds = r.cond_a && r.cond_b && r.cond_c && r.cond_d && r.cond_e;
  r.implication_holds = !conds || (r.sc134 == r.sufficient);
  return r;
}

}  // namespace cex

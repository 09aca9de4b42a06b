#pragma once

// Naive reference implementations for differential tests. Enumeration is
// written out longhand on purpose; nothing here shares code with the engine
// beyond model evaluation and formula parsing.

#include <algorithm>
#include <cassert>
#include <set>
#include <vector>

#include "cex/core/formula.hpp"
#include "cex/core/model.hpp"

namespace oracle {

using Events = std::vector<std::pair<int, int>>;

inline std::vector<std::vector<int>> subsets_of(const std::vector<int>& pool) {
  assert(pool.size() <= 20);
  std::vector<std::vector<int>> out;
  const unsigned n = static_cast<unsigned>(pool.size());
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    std::vector<int> s;
    for (unsigned i = 0; i < n; ++i)
      if (mask & (1u << i)) s.push_back(pool[i]);
    out.push_back(std::move(s));
  }
  return out;
}

inline bool formula_false_under(const cex::CausalModel& m, cex::ContextCode u,
                                const Events& settings, const cex::Formula& phi) {
  assert(!phi.has_causal());
  cex::Intervention iv;
  iv.settings = settings;
  std::sort(iv.settings.begin(), iv.settings.end());
  cex::Assignment out = m.evaluate(u, iv);
  return !cex::eval_formula(m, u, out, phi);
}

/// Exists W (subset of endogenous minus candidate, frozen at actual values)
/// and a value tuple for the candidate variables with [X<-x', W<-w] !phi.
inline bool ac2_brute(const cex::CausalModel& m, cex::ContextCode u,
                      const cex::Assignment& actual, const Events& cand,
                      const cex::Formula& phi, bool empty_witness_only) {
  std::vector<int> rest;
  for (int v = m.exo_count(); v < m.var_count(); ++v) {
    bool in_cand = false;
    for (const auto& [ord, _] : cand) in_cand |= (ord == v);
    if (!in_cand) rest.push_back(v);
  }
  std::vector<std::vector<int>> witness_sets =
      empty_witness_only ? std::vector<std::vector<int>>{{}} : subsets_of(rest);
  for (const auto& w : witness_sets) {
    std::vector<int> idx(cand.size(), 0);
    while (true) {
      Events settings;
      for (std::size_t i = 0; i < cand.size(); ++i) settings.emplace_back(cand[i].first, idx[i]);
      for (int ord : w) settings.emplace_back(ord, actual[static_cast<std::size_t>(ord)]);
      if (formula_false_under(m, u, settings, phi)) return true;
      std::size_t pos = 0;
      while (pos < cand.size()) {
        int span = m.var(cand[pos].first).range.size();
        if (++idx[pos] < span) break;
        idx[pos] = 0;
        ++pos;
      }
      if (pos == cand.size()) break;
    }
  }
  return false;
}

inline bool events_actual(const cex::Assignment& actual, const Events& cand) {
  for (const auto& [ord, val] : cand)
    if (actual[static_cast<std::size_t>(ord)] != val) return false;
  return true;
}

inline std::vector<Events> strict_nonempty_subevents(const Events& cand) {
  std::vector<Events> out;
  const unsigned n = static_cast<unsigned>(cand.size());
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
    Events s;
    for (unsigned i = 0; i < n; ++i)
      if (mask & (1u << i)) s.push_back(cand[i]);
    out.push_back(std::move(s));
  }
  return out;
}

inline bool is_actual_cause_brute(const cex::CausalModel& m, cex::ContextCode u,
                                  const Events& cand, const cex::Formula& phi) {
  cex::Assignment actual = m.evaluate(u);
  if (!events_actual(actual, cand)) return false;
  if (!cex::eval_formula(m, u, actual, phi)) return false;
  if (!ac2_brute(m, u, actual, cand, phi, false)) return false;
  for (const auto& s : strict_nonempty_subevents(cand))
    if (ac2_brute(m, u, actual, s, phi, false)) return false;
  return true;
}

inline bool is_but_for_brute(const cex::CausalModel& m, cex::ContextCode u,
                             const Events& cand, const cex::Formula& phi) {
  cex::Assignment actual = m.evaluate(u);
  if (!events_actual(actual, cand)) return false;
  if (!cex::eval_formula(m, u, actual, phi)) return false;
  if (!ac2_brute(m, u, actual, cand, phi, true)) return false;
  for (const auto& s : strict_nonempty_subevents(cand))
    if (ac2_brute(m, u, actual, s, phi, false)) return false;
  return true;
}

/// Every actual cause of phi in (M, u), candidates at actual values over
/// endogenous variables not mentioned in phi. Returned as comparable sets.
inline std::set<Events> all_actual_causes_brute(const cex::CausalModel& m, cex::ContextCode u,
                                                const cex::Formula& phi) {
  std::set<Events> out;
  cex::Assignment actual = m.evaluate(u);
  if (!cex::eval_formula(m, u, actual, phi)) return out;
  std::vector<int> phi_vars = phi.variables();
  std::vector<int> domain;
  for (int v = m.exo_count(); v < m.var_count(); ++v)
    if (!std::binary_search(phi_vars.begin(), phi_vars.end(), v)) domain.push_back(v);
  for (const auto& subset : subsets_of(domain)) {
    if (subset.empty()) continue;
    Events cand;
    for (int ord : subset) cand.emplace_back(ord, actual[static_cast<std::size_t>(ord)]);
    if (!ac2_brute(m, u, actual, cand, phi, false)) continue;
    bool minimal = true;
    for (const auto& s : strict_nonempty_subevents(cand))
      if (ac2_brute(m, u, actual, s, phi, false)) {
        minimal = false;
        break;
      }
    if (minimal) out.insert(cand);
  }
  return out;
}

/// Does the point set hit every axis-aligned s-by-s square inside the grid?
inline bool covers_all_squares(int width, int height, int s,
                               const std::vector<std::pair<int, int>>& points) {
  for (int top = 0; top + s <= height; ++top)
    for (int left = 0; left + s <= width; ++left) {
      bool hit = false;
      for (const auto& [r, c] : points)
        hit |= (r >= top && r < top + s && c >= left && c < left + s);
      if (!hit) return false;
    }
  return true;
}

}  // namespace oracle

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "cex/core/verify.hpp"
#include "enumeration.hpp"

namespace cex {

using detail::for_each_combination;
using detail::for_each_tuple;

std::uint64_t Rng::next() {
  state_ += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t Rng::below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

namespace {

std::string context_str(const CausalModel& m, ContextCode u) {
  std::vector<int> digits = m.decode_context(u);
  std::string out;
  for (int i = 0; i < m.exo_count(); ++i) {
    if (i) out += ", ";
    out += m.var(i).name + "=" + value_str(m.var(i).range.at(digits[static_cast<std::size_t>(i)]));
  }
  return out;
}

/// Random binary labeler table over 2^n images, forced non-constant.
Labeler random_labeler(Rng& rng, int pixel_count) {
  Labeler labeler;
  labeler.kind = Labeler::Kind::Table;
  std::size_t images = std::size_t{1} << pixel_count;
  labeler.table.reserve(images);
  bool saw[2] = {false, false};
  for (std::size_t i = 0; i < images; ++i) {
    auto bit = static_cast<std::int64_t>(rng.below(2));
    saw[bit] = true;
    labeler.table.emplace_back(bit);
  }
  if (!saw[0] || !saw[1]) {
    auto flip = static_cast<std::size_t>(rng.below(images));
    labeler.table[flip] = Value(std::int64_t{saw[0] ? 1 : 0});
  }
  return labeler;
}

/// Random positive-integer weights over all images, normalized exactly.
ImageDistribution random_distribution(Rng& rng, const GridSpec& grid) {
  std::size_t images = std::size_t{1} << grid.pixel_count();
  std::vector<std::uint64_t> raw(images);
  std::uint64_t total = 0;
  for (auto& w : raw) {
    w = 1 + rng.below(8);
    total += w;
  }
  ImageDistribution dist;
  dist.entries.reserve(images);
  std::vector<int> radixes(static_cast<std::size_t>(grid.pixel_count()), 2);
  std::size_t i = 0;
  for_each_tuple(radixes, [&](const std::vector<int>& image) {
    dist.entries.emplace_back(image, Rat(raw[i], total));
    ++i;
    return true;
  });
  return dist;
}

std::vector<int> random_pixel_subset(Rng& rng, const std::vector<int>& pixels, int size) {
  std::vector<int> pool = pixels;
  for (std::size_t i = pool.size(); i > 1; --i)
    std::swap(pool[i - 1], pool[static_cast<std::size_t>(rng.below(i))]);
  pool.resize(static_cast<std::size_t>(size));
  std::sort(pool.begin(), pool.end());
  return pool;
}

Conjunction actual_value_candidate(const Assignment& actual, const std::vector<int>& ordinals) {
  std::vector<std::pair<int, int>> events;
  events.reserve(ordinals.size());
  for (int ordinal : ordinals)
    events.emplace_back(ordinal, actual[static_cast<std::size_t>(ordinal)]);
  return Conjunction::make(std::move(events));
}

}  // namespace

TrialSummary run_theorem1_trials(int trials, std::uint64_t seed) {
  Rng rng(seed);
  TrialSummary summary;
  for (int t = 0; t < trials; ++t) {
    int n = 2 + static_cast<int>(rng.below(9));  // 2..10 pixels, <= 10-bit models
    GridSpec grid{n, 1, ValueRange::boolean()};
    Labeler labeler = random_labeler(rng, n);
    ProbabilisticModel pm = lift_classifier(grid, labeler, ImageDistribution::uniform(grid));
    const CausalModel& m = pm.model;

    auto u = static_cast<ContextCode>(rng.below(m.context_space()));
    Assignment actual = m.evaluate(u);
    int o = static_cast<int>(rng.below(2));
    Formula phi = Formula::prim(pm.output_ordinal, o);
    int cand_size = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    Conjunction cand =
        actual_value_candidate(actual, random_pixel_subset(rng, pm.pixel_ordinals, cand_size));

    Theorem1Report report = verify_theorem1(m, pm.pixel_ordinals, cand, phi, u);
    ++summary.trials;
    bool conds = report.cond_a && report.cond_b && report.cond_c && report.cond_d &&
                 report.cond_e;
    if (conds) ++summary.conditions_met;
    if (!report.implication_holds) {
      ++summary.implication_failures;
      if (summary.first_failure.empty())
        summary.first_failure = "trial " + std::to_string(t) + ": context {" +
                                context_str(m, u) + "}, candidate " + conjunction_str(m, cand) +
                                ", phi O=" + std::to_string(o);
    }
  }
  return summary;
}

TrialSummary run_theorem2_trials(int trials, std::uint64_t seed) {
  Rng rng(seed);
  TrialSummary summary;
  for (int t = 0; t < trials; ++t) {
    int n = 2 + static_cast<int>(rng.below(7));  // 2..8 pixels
    GridSpec grid{n, 1, ValueRange::boolean()};
    Labeler labeler = random_labeler(rng, n);
    ProbabilisticModel pm = lift_classifier(grid, labeler, random_distribution(rng, grid));
    const CausalModel& m = pm.model;

    // Anchor at a positive-weight context so the conditioning masses are
    // positive by construction.
    const auto& weights = pm.dist.weights;
    ContextCode u = weights[static_cast<std::size_t>(rng.below(weights.size()))].first;
    Assignment actual = m.evaluate(u);
    int o = actual[static_cast<std::size_t>(pm.output_ordinal)];
    int max_cand = std::min(3, n);
    int cand_size = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_cand)));
    Conjunction cand =
        actual_value_candidate(actual, random_pixel_subset(rng, pm.pixel_ordinals, cand_size));

    // Random thresholds in (0, 1]; on even trials retarget them at the
    // achieved bounds so the antecedent is exercised, not just vacuous.
    std::uint64_t aq = 1 + rng.below(16), bq = 1 + rng.below(16);
    GoodnessPair goodness{Rat(1 + rng.below(aq), aq), Rat(1 + rng.below(bq), bq)};
    if (t % 2 == 0) {
      Theorem2Report probe = verify_theorem2(m, pm.dist, cand, pm.output_ordinal, o, goodness);
      if (probe.alpha_flip > 0) goodness.alpha = probe.alpha_flip;
      if (probe.beta_achieved > 0) goodness.beta = probe.beta_achieved;
    }

    Theorem2Report report = verify_theorem2(m, pm.dist, cand, pm.output_ordinal, o, goodness);
    ++summary.trials;
    if (report.cond1 && report.cond2 && report.cond3) ++summary.conditions_met;
    if (!report.implication_holds) {
      ++summary.implication_failures;
      if (summary.first_failure.empty())
        summary.first_failure = "trial " + std::to_string(t) + ": context {" +
                                context_str(m, u) + "}, candidate " + conjunction_str(m, cand) +
                                ", O=" + std::to_string(o) + ", alpha " +
                                rational_str(goodness.alpha) + ", beta " +
                                rational_str(goodness.beta);
    }
  }
  return summary;
}

TrialSummary run_theorem1_on_model(const ModelBundle& bundle,
                                   const std::optional<std::string>& phi_text,
                                   const std::optional<std::vector<std::string>>& superset_names) {
  const CausalModel& m = bundle.model;

  std::vector<Formula> phis;
  std::vector<std::string> phi_labels;
  if (phi_text) {
    phis.push_back(parse_formula(*phi_text, m));
    phi_labels.push_back(*phi_text);
  } else {
    // Primitive events over sink variables.
    for (int e = m.exo_count(); e < m.var_count(); ++e) {
      if (!m.graph().children[static_cast<std::size_t>(e)].empty()) continue;
      for (int v = 0; v < m.var(e).range.size(); ++v) {
        phis.push_back(Formula::prim(e, v));
        phi_labels.push_back(m.var(e).name + "=" + value_str(m.var(e).range.at(v)));
      }
    }
  }

  TrialSummary summary;
  for (std::size_t pi = 0; pi < phis.size(); ++pi) {
    const Formula& phi = phis[pi];
    std::vector<int> superset;
    if (superset_names) {
      for (const std::string& name : *superset_names) superset.push_back(m.require_endogenous(name));
      std::sort(superset.begin(), superset.end());
      superset.erase(std::unique(superset.begin(), superset.end()), superset.end());
    } else {
      std::vector<int> phi_vars = phi.variables();
      for (int e = m.exo_count(); e < m.var_count(); ++e)
        if (!std::binary_search(phi_vars.begin(), phi_vars.end(), e)) superset.push_back(e);
    }
    if (superset.empty()) continue;

    for (ContextCode u = 0; u < m.context_space(); ++u) {
      Assignment actual = m.evaluate(u);
      int s = static_cast<int>(superset.size());
      for (int k = 1; k <= s; ++k) {
        for_each_combination(s, k, [&](const std::vector<int>& positions) {
          std::vector<int> ordinals;
          ordinals.reserve(positions.size());
          for (int p : positions) ordinals.push_back(superset[static_cast<std::size_t>(p)]);
          Conjunction cand = actual_value_candidate(actual, ordinals);
          Theorem1Report report = verify_theorem1(m, superset, cand, phi, u);
          ++summary.trials;
          if (report.cond_a && report.cond_b && report.cond_c && report.cond_d &&
              report.cond_e)
            ++summary.conditions_met;
          if (!report.implication_holds) {
            ++summary.implication_failures;
            if (summary.first_failure.empty())
              summary.first_failure = "context {" + context_str(m, u) + "}, candidate " +
                                      conjunction_str(m, cand) + ", phi " + phi_labels[pi];
          }
          return true;
        });
      }
    }
  }
  return summary;
}

TrialSummary run_theorem2_on_model(const ModelBundle& bundle, const GoodnessPair& goodness,
                                   int max_cand_size) {
  const CausalModel& m = bundle.model;
  if (!bundle.distribution)
    fail(ErrorCode::InvalidArgument, "theorem 2 sweeps need a prob block in the model file");
  const ContextDistribution& dist = *bundle.distribution;
  dist.validate(m);

  std::vector<int> pixels;
  int output = -1;
  if (!is_depth2_lift(m, &pixels, &output))
    fail(ErrorCode::NotDepthTwo, "theorem 2 sweeps need a depth-2 lifted model");

  // Positive-probability assignments, for realized values and mass checks.
  std::vector<Assignment> support;
  for (const auto& [code, weight] : dist.weights)
    if (weight > 0) support.push_back(m.evaluate(code));

  TrialSummary summary;
  int p = static_cast<int>(pixels.size());
  int max_size = std::min(max_cand_size <= 0 ? p : max_cand_size, p);
  for (int k = 1; k <= max_size; ++k) {
    for_each_combination(p, k, [&](const std::vector<int>& positions) {
      std::vector<int> ordinals;
      ordinals.reserve(positions.size());
      for (int pos : positions) ordinals.push_back(pixels[static_cast<std::size_t>(pos)]);

      // Realized value tuples over the chosen pixels, in support order.
      std::set<std::vector<int>> tuples;
      for (const Assignment& a : support) {
        std::vector<int> tuple;
        tuple.reserve(ordinals.size());
        for (int ordinal : ordinals) tuple.push_back(a[static_cast<std::size_t>(ordinal)]);
        tuples.insert(std::move(tuple));
      }

      for (const std::vector<int>& tuple : tuples) {
        std::vector<std::pair<int, int>> events;
        for (std::size_t i = 0; i < ordinals.size(); ++i)
          events.emplace_back(ordinals[i], tuple[i]);
        Conjunction cand = Conjunction::make(std::move(events));

        for (int o = 0; o < m.var(output).range.size(); ++o) {
          bool positive_mass = false;
          for (const Assignment& a : support) {
            if (a[static_cast<std::size_t>(output)] != o) continue;
            if (conjunction_holds(m, a, cand)) {
              positive_mass = true;
              break;
            }
          }
          if (!positive_mass) continue;  // conditioning undefined; skip

          Theorem2Report report = verify_theorem2(m, dist, cand, output, o, goodness);
          ++summary.trials;
          if (report.cond1 && report.cond2 && report.cond3) ++summary.conditions_met;
          if (!report.implication_holds) {
            ++summary.implication_failures;
            if (summary.first_failure.empty())
              summary.first_failure = "candidate " + conjunction_str(m, cand) + ", " +
                                      m.var(output).name + "=" +
                                      value_str(m.var(output).range.at(o));
          }
        }
      }
      return true;
    });
  }
  return summary;
}

}  // namespace cex

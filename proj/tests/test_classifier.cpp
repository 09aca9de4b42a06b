#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <set>

#include "cex/core/classifier.hpp"
#include "cex/core/dsl.hpp"
#include "helpers.hpp"
#include "oracle.hpp"

using namespace cex;
using testutil::conj;
using testutil::load_fixture;
using testutil::phi;

TEST_CASE("pixel naming follows the grid shape") {
  GridSpec row{4, 1, ValueRange::boolean()};
  CHECK(pixel_name(row, 0) == "X1");
  CHECK(pixel_name(row, 3) == "X4");
  GridSpec square{3, 3, ValueRange::boolean()};
  CHECK(pixel_name(square, 0, 0) == "P0_0");
  CHECK(pixel_name(square, 2, 1) == "P2_1");
  CHECK(pixel_name(square, 4) == "P1_1");  // row-major
}

TEST_CASE("lifting builds a depth-2 model that mirrors the labeler") {
  GridSpec grid{3, 1, ValueRange::boolean()};
  Labeler any_on;
  ProbabilisticModel pm = lift_classifier(grid, any_on, ImageDistribution::uniform(grid));
  const CausalModel& m = pm.model;

  CHECK(m.exo_count() == 3);
  CHECK(m.endo_count() == 4);
  CHECK(m.context_space() == 8);
  CHECK(pm.pixel_ordinals.size() == 3);
  CHECK(pm.output_ordinal == m.ordinal_of("O"));
  CHECK(is_depth2_lift(m));

  // output equals the labeler on every image
  for (ContextCode u = 0; u < m.context_space(); ++u) {
    Assignment a = m.evaluate(u);
    std::vector<int> img;
    for (int p : pm.pixel_ordinals) img.push_back(a[static_cast<std::size_t>(p)]);
    Value want = any_on.label_of(grid, img);
    CHECK(m.var(pm.output_ordinal).range.index_of(want) ==
          a[static_cast<std::size_t>(pm.output_ordinal)]);
  }

  // uniform distribution: every context carries 1/8
  pm.dist.validate(m);
  for (ContextCode u = 0; u < 8; ++u) CHECK(pm.dist.probability_of(u) == Rat(1, 8));

  // a coupled model is not a lift
  CHECK(!is_depth2_lift(load_fixture("coupled_pixels.cm").model));
  CHECK(!is_depth2_lift(load_fixture("suzy.cm").model));
  CHECK(is_depth2_lift(load_fixture("parity5.cm").model));
  CHECK(is_depth2_lift(load_fixture("tumor9.cm").model));
}

TEST_CASE("builtin labelers") {
  GridSpec grid{5, 1, ValueRange::boolean()};
  Labeler threshold;
  threshold.kind = Labeler::Kind::Threshold;
  threshold.threshold = 3;
  CHECK(threshold.label_of(grid, {1, 1, 1, 0, 0}) == Value{std::int64_t{1}});
  CHECK(threshold.label_of(grid, {1, 1, 0, 0, 0}) == Value{std::int64_t{0}});

  Labeler parity;
  parity.kind = Labeler::Kind::ParityFirstPixel;
  // even count of zeros in the tail, first pixel off: label 0
  CHECK(parity.label_of(grid, {0, 1, 1, 1, 1}) == Value{std::int64_t{0}});
  CHECK(parity.label_of(grid, {1, 1, 1, 1, 1}) == Value{std::int64_t{1}});
  CHECK(parity.label_of(grid, {1, 0, 0, 1, 1}) == Value{std::int64_t{0}});
  CHECK(parity.label_of(grid, {0, 0, 1, 1, 1}) == Value{std::int64_t{1}});
}

TEST_CASE("the lifted any-on grid is the voting model in disguise") {
  ModelBundle voting = load_fixture("voting.cm");
  GridSpec grid{3, 1, ValueRange::boolean()};
  ProbabilisticModel pm = lift_classifier(grid, Labeler{}, ImageDistribution::uniform(grid));
  const CausalModel& vm = voting.model;
  const CausalModel& lm = pm.model;

  // context codes line up: UA UB UC and U_X1 U_X2 U_X3 in the same order
  const char* vnames[] = {"A", "B", "C", "WIN"};
  const char* lnames[] = {"X1", "X2", "X3", "O"};
  for (ContextCode u = 0; u < 8; ++u) {
    Assignment va = vm.evaluate(u);
    Assignment la = lm.evaluate(u);
    for (int i = 0; i < 4; ++i)
      CHECK(va[static_cast<std::size_t>(vm.ordinal_of(vnames[i]))] ==
            la[static_cast<std::size_t>(lm.ordinal_of(lnames[i]))]);
  }

  // causal verdicts transfer across the renaming
  for (ContextCode u = 0; u < 8; ++u) {
    Assignment va = vm.evaluate(u);
    for (int i = 0; i < 3; ++i) {
      Conjunction vc = Conjunction::make(
          {{vm.ordinal_of(vnames[i]), va[static_cast<std::size_t>(vm.ordinal_of(vnames[i]))]}});
      Conjunction lc = Conjunction::make(
          {{lm.ordinal_of(lnames[i]), va[static_cast<std::size_t>(vm.ordinal_of(vnames[i]))]}});
      CHECK(is_actual_cause(vm, u, vc, phi(vm, "WIN=1")).holds ==
            is_actual_cause(lm, u, lc, phi(lm, "O=1")).holds);
      CHECK(is_but_for_cause(vm, u, vc, phi(vm, "WIN=1")).holds ==
            is_but_for_cause(lm, u, lc, phi(lm, "O=1")).holds);
      CHECK(is_sufficient_cause(vm, u, vc, phi(vm, "WIN=1")).holds ==
            is_sufficient_cause(lm, u, lc, phi(lm, "O=1")).holds);
    }
  }

  // explanation sets transfer too
  auto ventries = find_explanations(vm, ContextSet::everything(), phi(vm, "WIN=1"),
                                    DefinitionVariant::halpern(), 3);
  auto lentries = find_explanations(lm, ContextSet::everything(), phi(lm, "O=1"),
                                    DefinitionVariant::halpern(), 3);
  CHECK(testutil::holder_names(vm, ventries) == std::set<std::string>{"A=1", "B=1", "C=1"});
  CHECK(testutil::holder_names(lm, lentries) == std::set<std::string>{"X1=1", "X2=1", "X3=1"});
}

TEST_CASE("parity distribution weights the even-tail class at 9/10") {
  ImageDistribution d = parity_distribution(2);
  CHECK(d.entries.size() == 32);
  Rat total(0);
  for (const auto& [img, w] : d.entries) {
    REQUIRE(img.size() == 5);
    int zeros = 0;
    for (std::size_t i = 1; i < img.size(); ++i) zeros += (img[i] == 0);
    CHECK(w == (zeros % 2 == 0 ? Rat(9, 160) : Rat(1, 160)));
    total += w;
  }
  CHECK(total == Rat(1));
}

TEST_CASE("region masks select the matching contexts") {
  ModelBundle b = load_fixture("tumor9.cm");
  ProbabilisticModel pm = testutil::as_lift(b);
  RegionMask mask;
  mask.fill = Value{std::int64_t{0}};
  for (const char* p : {"P0_0", "P0_1", "P0_2", "P1_0", "P2_0"}) mask.pixels.push_back(p);
  ContextSet sel = restrict_contexts(pm, mask);
  REQUIRE(b.k_by_name("suspicious").has_value());
  CHECK(sel.materialize(pm.model) == b.k_by_name("suspicious")->materialize(pm.model));
  CHECK(sel.size(pm.model) == 16);

  RegionMask unknown;
  unknown.fill = Value{std::int64_t{0}};
  unknown.pixels = {"nope"};
  CHECK_THROWS_AS(restrict_contexts(pm, unknown), CexError);
}

TEST_CASE("absence of a tumor is explained by the free light pixels") {
  ModelBundle b = load_fixture("tumor9.cm");
  ProbabilisticModel pm = testutil::as_lift(b);
  REQUIRE(b.distribution.has_value());
  pm.dist = *b.distribution;
  ContextSet k = *b.k_by_name("suspicious");

  auto hits = explain_absence(pm, k, Value{std::int64_t{0}},
                              GoodnessPair{Rat(9, 10), Rat(9, 10)}, 4);
  std::set<std::string> names;
  for (const auto& [c, achieved] : hits) {
    names.insert(conjunction_str(pm.model, c));
    CHECK(achieved.alpha == Rat(1));
    CHECK(achieved.beta == Rat(1));
  }
  CHECK(names == std::set<std::string>{"P1_1=0", "P1_2=0", "P2_1=0", "P2_2=0"});

  // each result re-verifies as a partial explanation in its own right
  for (const auto& [c, achieved] : hits) {
    ExplanationVerdict v =
        is_partial_explanation(pm.model, pm.dist, k, c, Formula::prim(pm.output_ordinal, 0),
                               GoodnessPair{Rat(9, 10), Rat(9, 10)});
    CHECK(v.holds);
    CHECK(v.achieved->alpha == achieved.alpha);
    CHECK(v.achieved->beta == achieved.beta);
  }

  // excluded pixels drop out of the enumeration
  auto fewer = explain_absence(pm, k, Value{std::int64_t{0}},
                               GoodnessPair{Rat(9, 10), Rat(9, 10)}, 4,
                               {pm.model.ordinal_of("P1_1")});
  CHECK(fewer.size() == 3);

  // thresholds outside (0, 1] are rejected
  CHECK_THROWS_AS(explain_absence(pm, k, Value{std::int64_t{0}},
                                  GoodnessPair{Rat(0), Rat(1, 2)}, 4),
                  CexError);
}

TEST_CASE("rare-event reweighting is exact conditioning") {
  ModelBundle b = load_fixture("tumor9.cm");
  ProbabilisticModel pm = testutil::as_lift(b);
  pm.dist = *b.distribution;
  GridSpec grid{3, 3, ValueRange::boolean()};

  ImageDistribution before = parse_image_corpus(
      format_image_corpus(ImageDistribution{}, grid), grid);  // empty round-trip
  CHECK(before.entries.empty());

  ImageDistribution base;
  for (const auto& [u, w] : pm.dist.weights)
    base.entries.emplace_back(pm.model.decode_context(u), w);

  ImageDistribution cond = rare_event_reweight(base, grid, phi(pm.model, "O=1"), pm);
  REQUIRE(cond.entries.size() == 1);
  CHECK(cond.entries[0].first == std::vector<int>{0, 0, 0, 0, 1, 1, 0, 1, 1});
  CHECK(cond.entries[0].second == Rat(1));

  // conditioning on a pixel keeps relative weights
  ImageDistribution half = rare_event_reweight(base, grid, phi(pm.model, "P1_1=0"), pm);
  Rat total(0);
  for (const auto& [img, w] : half.entries) {
    CHECK(img[4] == 0);
    total += w;
  }
  CHECK(total == Rat(1));
  CHECK(half.entries.size() == 8);

  // impossible conditions are an explicit error
  CHECK_THROWS_AS(rare_event_reweight(base, grid, phi(pm.model, "P0_0=1"), pm), CexError);
}

TEST_CASE("pixel nets cover every square that could hold a tumor") {
  auto net = pixel_net(4, 4, 2);
  std::set<std::pair<int, int>> got(net.begin(), net.end());
  CHECK(got == std::set<std::pair<int, int>>{{1, 1}, {1, 3}, {3, 1}, {3, 3}});
  CHECK(oracle::covers_all_squares(4, 4, 2, net));

  for (int w = 2; w <= 7; ++w)
    for (int h = 2; h <= 7; ++h)
      for (int s = 2; s <= std::min(w, h); ++s) {
        auto pts = pixel_net(w, h, s);
        CAPTURE(w);
        CAPTURE(h);
        CAPTURE(s);
        CHECK(oracle::covers_all_squares(w, h, s, pts));
        for (const auto& [r, c] : pts) {
          CHECK(r >= 0);
          CHECK(r < h);
          CHECK(c >= 0);
          CHECK(c < w);
        }
      }

  CHECK_THROWS_AS(pixel_net(4, 4, 1), CexError);
}

TEST_CASE("image corpus text round-trips") {
  GridSpec grid{3, 3, ValueRange::boolean()};
  ModelBundle b = load_fixture("tumor9.cm");
  ImageDistribution base;
  for (const auto& [u, w] : b.distribution->weights)
    base.entries.emplace_back(b.model.decode_context(u), w);

  std::string text = format_image_corpus(base, grid);
  ImageDistribution back = parse_image_corpus(text, grid);
  CHECK(back.entries == base.entries);

  // comments and blank lines are tolerated; weights may be decimals
  ImageDistribution tiny = parse_image_corpus(
      "# header\n\n0 0 0 0 0 0 0 0 0 0.25\n0 0 0 0 1 1 0 1 1 3/4\n", grid);
  REQUIRE(tiny.entries.size() == 2);
  CHECK(tiny.entries[0].second == Rat(1, 4));
  CHECK(tiny.entries[1].second == Rat(3, 4));

  CHECK_THROWS_AS(parse_image_corpus("0 0 1\n", grid), CexError);
}

TEST_CASE("the shipped tumor corpus matches the model distribution") {
  ModelBundle b = load_fixture("tumor9.cm");
  GridSpec grid{3, 3, ValueRange::boolean()};
  std::string path = testutil::corpus_path("tumor9_corpus.txt");
  std::string text;
  {
    FILE* f = fopen(path.c_str(), "rb");
    REQUIRE(f != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, n);
    fclose(f);
  }
  ImageDistribution from_file = parse_image_corpus(text, grid);
  CHECK(from_file.entries.size() == 16);
  Rat total(0);
  for (const auto& [img, w] : from_file.entries) {
    ContextCode u = b.model.encode_context(img);
    CHECK(b.distribution->probability_of(u) == w);
    total += w;
  }
  CHECK(total == Rat(1));
}

#include "doctest.h"

#include <algorithm>

#include "test_util.hpp"

using namespace gtd;
using namespace gtd::testutil;

namespace {

// the worked example: petals a (length 1), b (length 2) mapping to the
// geometric paths a and a*c in a range rose with unit petals; on letters
// the petal b goes to t_c t_a, which fixes the range marking
Morphism worked_example() {
  GraphOfGroups domain = make_rose({Rational(1), Rational(2)});
  domain.marking = std::map<std::string, std::string>{{"p", "x"}, {"q", "y"}};
  GraphOfGroups range = make_rose({Rational(1), Rational(1)});
  range.marking = std::map<std::string, std::string>{{"p", "x"}, {"q", "y x"}};
  std::map<std::string, std::vector<std::string>> images;
  images["x"] = {"x"};
  images["y"] = {"x", "y"};
  return make_morphism(domain, range, images);
}

std::vector<Rational> sorted_lengths(const GraphOfGroups& g) {
  std::vector<Rational> lens;
  for (const auto& e : g.edges) lens.push_back(e.length);
  std::sort(lens.begin(), lens.end(),
            [](const Rational& a, const Rational& b) { return a < b; });
  return lens;
}

std::vector<std::string> word_sample(const GraphOfGroups& g) {
  std::vector<std::string> gens;
  for (const auto& [k, v] : *g.marking) gens.push_back(k);
  std::vector<std::string> out = gens;
  for (size_t i = 0; i < gens.size(); ++i)
    for (size_t j = 0; j < gens.size(); ++j) {
      if (i == j) continue;
      out.push_back(gens[i] + " " + gens[j]);
      out.push_back(gens[i] + " " + gens[j] + "^-1");
      out.push_back(gens[i] + " " + gens[i] + " " + gens[j]);
    }
  return out;
}

std::vector<Rational> lengths_of(const GraphOfGroups& g,
                                 const std::vector<std::string>& words) {
  std::vector<Rational> out;
  for (const auto& w : words)
    out.push_back(translation_length(g, marked_word(g, w, false)));
  return out;
}

}  // namespace

TEST_CASE("identity morphism has fold depth zero") {
  GraphOfGroups rose = rose2(Rational(1), Rational(1));
  std::map<std::string, std::vector<std::string>> images;
  images["x"] = {"x"};
  images["y"] = {"y"};
  Morphism m = make_morphism(rose, rose, images);
  CHECK(m.fold_depth == Rational(0));
  FoldResult half = fold_at_time(m, Rational(1, 2));
  CHECK(sorted_lengths(half.tree) == sorted_lengths(rose));
}

TEST_CASE("worked example: fold depth 1 and T_1/2 lengths {1/2, 1/2, 3/2}") {
  Morphism m = worked_example();
  CHECK(m.fold_depth == Rational(1));

  FoldResult half = fold_at_time(m, Rational(1, 2));
  std::vector<Rational> expect = {Rational(1, 2), Rational(1, 2),
                                  Rational(3, 2)};
  CHECK(sorted_lengths(half.tree) == expect);
  CHECK(half.tree.volume() == Rational(5, 2));

  auto words = word_sample(m.domain);
  FoldResult t0 = fold_at_time(m, Rational(0));
  FoldResult t1 = fold_at_time(m, Rational(1));
  CHECK(lengths_of(t0.tree, words) == lengths_of(m.domain, words));
  CHECK(lengths_of(t1.tree, words) == lengths_of(m.range, words));
  CHECK(sorted_lengths(t0.tree) == sorted_lengths(m.domain));
  CHECK(sorted_lengths(t1.tree) == sorted_lengths(m.range));
}

TEST_CASE("morphism validation errors") {
  GraphOfGroups domain = make_rose({Rational(1), Rational(3)});
  domain.marking = std::map<std::string, std::string>{{"p", "x"}, {"q", "y"}};
  GraphOfGroups range = make_rose({Rational(1), Rational(1)});
  range.marking = std::map<std::string, std::string>{{"p", "x"}, {"q", "x y"}};
  std::map<std::string, std::vector<std::string>> images;
  images["x"] = {"x"};
  images["y"] = {"x", "y"};  // length 2 != 3
  try {
    make_morphism(domain, range, images);
    FAIL("expected LengthMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == "LengthMismatch");
  }

  GraphOfGroups bs = bs23();
  std::map<std::string, std::vector<std::string>> triv;
  triv["t"] = {"t"};
  try {
    make_morphism(bs, bs, triv);
    FAIL("expected NontrivialStabilizer");
  } catch (const Error& e) {
    CHECK(e.code() == "NontrivialStabilizer");
  }

  // a map that would have to stretch a marked word
  GraphOfGroups d2 = make_rose({Rational(1), Rational(1)});
  d2.marking = std::map<std::string, std::string>{{"p", "x"}, {"q", "y"}};
  GraphOfGroups r2 = make_rose({Rational(1), Rational(5)});
  r2.marking = std::map<std::string, std::string>{{"p", "x"}, {"q", "y"}};
  std::map<std::string, std::vector<std::string>> collapse_images;
  collapse_images["x"] = {"x"};
  collapse_images["y"] = {"x"};
  try {
    make_morphism(d2, r2, collapse_images);
    FAIL("expected MarkingIncompatible");
  } catch (const Error& e) {
    CHECK(e.code() == "MarkingIncompatible");
  }
}

TEST_CASE("random morphisms: endpoints, monotonicity, scaling, confluence") {
  Rng rng(2024);
  std::vector<Rational> grid;
  for (int k = 0; k <= 8; ++k) grid.push_back(Rational(k, 8));

  for (int trial = 0; trial < 8; ++trial) {
    Morphism m = random_rose_morphism(rng, 2 + trial % 2, 3);
    auto words = word_sample(m.domain);
    auto dom_lens = lengths_of(m.domain, words);
    auto ran_lens = lengths_of(m.range, words);

    std::vector<std::vector<Rational>> profile;
    for (const auto& t : grid) {
      FoldResult fr = fold_at_time(m, t);
      profile.push_back(lengths_of(fr.tree, words));
    }
    CHECK(profile.front() == dom_lens);
    CHECK(profile.back() == ran_lens);
    for (size_t k = 0; k + 1 < profile.size(); ++k)
      for (size_t w = 0; w < words.size(); ++w)
        CHECK(profile[k][w] >= profile[k + 1][w]);

    // scaling equivariance at a generic time
    for (const Rational& k : {Rational(2), Rational(1, 3)}) {
      Morphism mk = scale_morphism(m, k);
      CHECK(mk.fold_depth == m.fold_depth * k);
      FoldResult a = fold_at_time(m, Rational(3, 8));
      FoldResult b = fold_at_time(mk, Rational(3, 8));
      auto la = lengths_of(a.tree, words);
      auto lb = lengths_of(b.tree, words);
      for (size_t w = 0; w < words.size(); ++w) CHECK(lb[w] == k * la[w]);
    }

    // confluence: the reversed fold order yields the same tree metrically
    FoldResult fwd = fold_at_time(m, Rational(5, 8), false);
    FoldResult rev = fold_at_time(m, Rational(5, 8), true);
    CHECK(lengths_of(fwd.tree, words) == lengths_of(rev.tree, words));
    CHECK(fwd.tree.volume() == rev.tree.volume());
  }
}

TEST_CASE("fold steps stay in the deformation space and stay irreducible") {
  Morphism m = worked_example();
  std::vector<std::string> words = {"p", "q", "p q", "p q^-1", "p p^-1"};
  for (const Rational& t : {Rational(0), Rational(3, 8), Rational(1)}) {
    FoldResult fr = fold_at_time(m, t);
    ProfileResult pr = same_deformation_space(m.domain, fr.tree, words);
    CHECK(pr.agree);
    IrreducibilityResult irr = is_irreducible(fr.tree, 2);
    CHECK(irr.kind == IrreducibilityKind::Irreducible);
  }
}

TEST_CASE("connecting morphisms compose coherently on length vectors") {
  Morphism m = worked_example();
  auto words = word_sample(m.domain);
  for (const Rational& s : {Rational(1, 4), Rational(1, 2)}) {
    FoldResult fs = fold_at_time(m, s);
    // m(phi_s1) should be the remaining depth
    CHECK(fs.phi_t1.fold_depth == m.fold_depth * (Rational(1) - s));
    for (const Rational& t : {Rational(1, 2), Rational(3, 4), Rational(1)}) {
      if (t < s) continue;
      Rational rescaled = fs.phi_t1.fold_depth.is_zero()
                              ? Rational(0)
                              : (m.fold_depth * t - m.fold_depth * s) /
                                    fs.phi_t1.fold_depth;
      FoldResult via = fold_at_time(fs.phi_t1, rescaled);
      FoldResult direct = fold_at_time(m, t);
      CHECK(lengths_of(via.tree, words) == lengths_of(direct.tree, words));
    }
  }
}

TEST_CASE("length profile rows: zeros for trivial words, monotone otherwise") {
  Morphism m = worked_example();
  std::vector<Rational> times = {Rational(0), Rational(1, 4), Rational(1, 2),
                                 Rational(3, 4), Rational(1)};
  auto rows = length_profile(m, {"p p^-1", "q", "p q"}, times);
  for (const auto& v : rows[0]) CHECK(v.is_zero());
  for (size_t k = 0; k + 1 < times.size(); ++k) {
    CHECK(rows[1][k] >= rows[1][k + 1]);
    CHECK(rows[2][k] >= rows[2][k + 1]);
  }
  CHECK(rows[1][0] == Rational(2));
  CHECK(rows[1][4] == Rational(2));  // q maps to a path of equal length
}

TEST_CASE("fold path bundles the evaluated times") {
  Morphism m = worked_example();
  FoldPath fp = fold_path(m, {Rational(0), Rational(1, 2), Rational(1)});
  REQUIRE(fp.steps.size() == 3);
  CHECK(fp.steps[1].second.tree.volume() == Rational(5, 2));
  CHECK_THROWS_AS(fold_at_time(m, Rational(3, 2)), Error);
  CHECK_THROWS_AS(fold_at_time(m, Rational(-1, 2)), Error);
}

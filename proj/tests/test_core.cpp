#include "doctest.h"

#include "gtd/json_io.hpp"
#include "test_util.hpp"

using namespace gtd;
using namespace gtd::testutil;

TEST_CASE("validate_graph accepts BS(2,3) and reports violations") {
  GraphOfGroups g = bs23();
  CHECK(validate_graph(g).empty());

  GraphOfGroups zero = g;
  zero.edges[0].index_from = BigInt(0);
  auto issues = validate_graph(zero);
  REQUIRE(!issues.empty());
  CHECK(issues[0].code == "ZeroIndex");
  CHECK(issues[0].element == "t");

  GraphOfGroups disc;
  disc.vertices = {{"u", GroupKind::Trivial}, {"v", GroupKind::Trivial}};
  bool found = false;
  for (const auto& is : validate_graph(disc))
    if (is.code == "Disconnected") found = true;
  CHECK(found);

  GraphOfGroups badtree = theta_graph();
  badtree.spanning_tree = {"e1", "e2"};
  found = false;
  for (const auto& is : validate_graph(badtree))
    if (is.code == "BadSpanningTree") found = true;
  CHECK(found);

  GraphOfGroups neg = bs23();
  neg.edges[0].length = Rational(-1);
  found = false;
  for (const auto& is : validate_graph(neg))
    if (is.code == "NonpositiveLength") found = true;
  CHECK(found);

  GraphOfGroups mixed;
  mixed.vertices = {{"u", GroupKind::Trivial}, {"v", GroupKind::InfiniteCyclic}};
  mixed.edges = {{"e", "u", "v", BigInt(1), BigInt(2), Rational(1)}};
  mixed.spanning_tree = {"e"};
  found = false;
  for (const auto& is : validate_graph(mixed))
    if (is.code == "TrivialVertexWithIndex") found = true;
  CHECK(found);
}

TEST_CASE("BS(2,3) Britton reduction: defining relation and cyclic reduction") {
  GraphOfGroups g = bs23();

  // t a^2 t^-1 = a^3
  ReducedWord r1 = reduce_word(g, parse_word("t a_v^2 t^-1"));
  CHECK(!r1.hyperbolic);
  CHECK(r1.length == Rational(0));
  REQUIRE(r1.britton.syls.size() == 1);
  CHECK(!r1.britton.syls[0].is_edge);
  CHECK(r1.britton.syls[0].power == BigInt(3));

  // t a t^-1 does not pinch, but cyclically reduces to a
  ReducedWord r2 = reduce_word(g, parse_word("t a_v t^-1"));
  CHECK(!r2.hyperbolic);
  CHECK(r2.length == Rational(0));
  REQUIRE(r2.cyclic.syls.size() == 1);
  CHECK(r2.cyclic.syls[0].power == BigInt(1));

  // t a t a^-1 is hyperbolic of length 2
  ReducedWord r3 = reduce_word(g, parse_word("t a_v t a_v^-1"));
  CHECK(r3.hyperbolic);
  CHECK(r3.length == Rational(2));
  // ball oracle for the same value
  auto oracle = ball_min_displacement(g, parse_word("t a_v t a_v^-1"), Rational(3));
  REQUIRE(oracle.has_value());
  CHECK(*oracle == Rational(2));

  // identity words
  ReducedWord rid = reduce_word(g, parse_word("t t^-1"));
  CHECK(rid.is_identity());
  CHECK(reduce_word(g, parse_word("a_v a_v^-1")).is_identity());
}

TEST_CASE("translation lengths: BS(2,3) and the F2 rose") {
  GraphOfGroups g = bs23();
  CHECK(translation_length(g, parse_word("a_v")) == Rational(0));
  CHECK(translation_length(g, parse_word("t")) == Rational(1));
  auto oracle_t = ball_min_displacement(g, parse_word("t"), Rational(3));
  REQUIRE(oracle_t.has_value());
  CHECK(*oracle_t == Rational(1));

  GraphOfGroups rose = rose2(Rational(1, 2), Rational(1, 2));
  CHECK(translation_length(rose, parse_word("x y")) == Rational(1));
  auto oracle_xy =
      ball_min_displacement(rose, parse_word("x y"), Rational(2));
  REQUIRE(oracle_xy.has_value());
  CHECK(*oracle_xy == Rational(1));
}

TEST_CASE("reduction errors") {
  GraphOfGroups g = bs23();
  try {
    reduce_word(g, parse_word("q"));
    FAIL("expected UnknownGenerator");
  } catch (const Error& e) {
    CHECK(e.code() == "UnknownGenerator");
  }
  GraphOfGroups theta = theta_graph();
  try {
    reduce_word(theta, parse_word("e1"));  // open path, not a loop
    FAIL("expected NotALoop");
  } catch (const Error& e) {
    CHECK(e.code() == "NotALoop");
  }
}

TEST_CASE("conjugation invariance and the power law") {
  Rng rng(101);
  for (int trial = 0; trial < 40; ++trial) {
    GraphOfGroups g = random_graph(rng, trial % 2 == 0);
    Word w = random_loop_word(g, rng, 4);
    Word u = random_loop_word(g, rng, 3);
    Word conj = u;
    conj.insert(conj.end(), w.begin(), w.end());
    Word ui = invert_word(u);
    conj.insert(conj.end(), ui.begin(), ui.end());
    CHECK(translation_length(g, conj) == translation_length(g, w));

    ReducedWord rw = reduce_word(g, w);
    if (rw.hyperbolic) {
      Word w3;
      for (int k = 0; k < 3; ++k) w3.insert(w3.end(), w.begin(), w.end());
      CHECK(translation_length(g, w3) == Rational(3) * rw.length);
    }
  }
}

TEST_CASE("reduce_word is idempotent on Britton forms") {
  Rng rng(55);
  for (int trial = 0; trial < 40; ++trial) {
    GraphOfGroups g = random_graph(rng, trial % 2 == 1);
    Word w = random_loop_word(g, rng, 5);
    ReducedWord r = reduce_word(g, w);
    Word again = path_to_word(g, r.britton);
    ReducedWord r2 = reduce_word(g, again);
    CHECK(serialize_path(r2.britton) == serialize_path(r.britton));
    CHECK(r2.length == r.length);
    CHECK(r2.hyperbolic == r.hyperbolic);
  }
}

TEST_CASE("confluence: shuffled insertions of trivial pinches reduce equally") {
  GraphOfGroups g = bs23();
  Word w = parse_word("t a_v t a_v^-1 t^-1 a_v^3");
  ReducedWord base = reduce_word(g, w);
  // insert the defining relator at every position; the canonical Britton
  // form must not notice
  for (size_t pos = 0; pos <= w.size(); ++pos) {
    Word padded = w;
    Word noise = parse_word("t a_v^2 t^-1 a_v^-3");
    padded.insert(padded.begin() + pos, noise.begin(), noise.end());
    ReducedWord r = reduce_word(g, padded);
    CHECK(serialize_path(r.britton) == serialize_path(base.britton));
    CHECK(r.length == base.length);
  }
  CHECK(base.hyperbolic);
}

TEST_CASE("elliptic classification agrees with the ball oracle") {
  std::vector<GraphOfGroups> corpus = {bs23(), rose2(Rational(1, 2), Rational(1, 2)),
                                       theta_graph(), make_bs(1, 2)};
  for (const auto& g : corpus) {
    auto words = enumerate_loop_words(g, 4, 400);
    for (const auto& w : words) {
      ReducedWord r = reduce_word(g, w);
      auto oracle = ball_min_displacement(g, w, Rational(4));
      if (!oracle) continue;
      CHECK(r.length == *oracle);
      CHECK(r.hyperbolic == (oracle->sign() > 0));
    }
  }
}

TEST_CASE("all length-6 words classify elliptic iff a ball vertex is fixed") {
  // a word with a conjugator of at most three letters fixes a point within
  // the radius-3 ball, and hyperbolic words displace every point
  bool cyclic_case = true;
  for (const auto& g : {bs23(), theta_graph()}) {
    TreeBall b = build_ball(g, Rational(3), 30000);
    auto words = enumerate_loop_words(g, 6, 40000);
    int elliptics = 0;
    for (const auto& w : words) {
      PathWord p = to_path(g, w, g.base_vertex());
      bool fixes = false;
      for (size_t v = 0; v < b.vertices.size() && !fixes; ++v)
        if (displacement(b, p, BallPoint::at_vertex(int(v))).is_zero())
          fixes = true;
      bool elliptic = !reduce_loop(g, p).hyperbolic;
      CHECK(elliptic == fixes);
      if (elliptic) ++elliptics;
    }
    // the free action of the theta graph has no elliptic elements at all
    CHECK((cyclic_case ? elliptics > 0 : elliptics == 0));
    CHECK(words.size() > 100);
    cyclic_case = false;
  }
}

TEST_CASE("graph JSON round trips exactly") {
  Rng rng(2112);
  for (int trial = 0; trial < 20; ++trial) {
    GraphOfGroups g = random_graph(rng, trial % 2 == 0);
    GraphOfGroups back = graph_from_json(graph_to_json(g));
    CHECK(back.vertices.size() == g.vertices.size());
    REQUIRE(back.edges.size() == g.edges.size());
    for (size_t e = 0; e < g.edges.size(); ++e) {
      CHECK(back.edges[e].id == g.edges[e].id);
      CHECK(back.edges[e].from == g.edges[e].from);
      CHECK(back.edges[e].to == g.edges[e].to);
      CHECK(back.edges[e].index_from == g.edges[e].index_from);
      CHECK(back.edges[e].index_to == g.edges[e].index_to);
      CHECK(back.edges[e].length == g.edges[e].length);
    }
    CHECK(back.spanning_tree == g.spanning_tree);
    CHECK(back.marking == g.marking);
    // identical inputs serialize byte-identically
    CHECK(graph_to_json(g).dump() == graph_to_json(back).dump());
  }
}

TEST_CASE("coset keys match the membership test") {
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    GraphOfGroups g = random_graph(rng, trial % 2 == 0);
    Word w1 = random_loop_word(g, rng, 4);
    Word w2 = random_loop_word(g, rng, 4);
    PathWord p1 = to_path(g, w1, g.base_vertex());
    PathWord p2 = to_path(g, w2, g.base_vertex());
    bool same_key = coset_key(g, p1) == coset_key(g, p2);
    PathWord rel = multiply(g, inverse(g, p1), p2);
    CHECK(same_key == in_vertex_group(g, rel));
  }
}

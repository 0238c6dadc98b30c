#include "doctest.h"

#include "test_util.hpp"

using namespace gtd;
using namespace gtd::testutil;

TEST_CASE("ball construction: degenerate, BS(2,3) and the rose") {
  // radius 0: a single vertex
  TreeBall b0 = build_ball(bs23(), Rational(0));
  CHECK(b0.vertices.size() == 1);
  CHECK(b0.edges.empty());

  // BS(2,3) at radius 1: the base has degree index_from + index_to = 5
  TreeBall b1 = build_ball(bs23(), Rational(1));
  CHECK(b1.vertices.size() == 6);
  CHECK(b1.edges.size() == 5);
  int base_degree = 0;
  for (const auto& e : b1.edges)
    if (e.a == 0 || e.b == 0) ++base_degree;
  CHECK(base_degree == 5);

  // the rose cover is 4-regular
  TreeBall br = build_ball(rose2(Rational(1, 2), Rational(1, 2)), Rational(1, 2));
  CHECK(br.vertices.size() == 5);

  // vertex cap
  CHECK_THROWS_AS(build_ball(bs23(), Rational(5), 20), Error);
}

TEST_CASE("tree distances") {
  GraphOfGroups g = bs23();
  TreeBall b = build_ball(g, Rational(2));
  BallPoint base = BallPoint::at_vertex(0);
  CHECK(tree_distance(b, base, base) == Rational(0));

  PathWord t = to_path(g, parse_word("t"), 0);
  auto tv = act_vertex(b, t, 0);
  REQUIRE(tv.has_value());
  CHECK(tree_distance(b, base, BallPoint::at_vertex(*tv)) == Rational(1));

  GraphOfGroups rose = rose2(Rational(1, 2), Rational(1, 2));
  TreeBall rb = build_ball(rose, Rational(3, 2));
  PathWord xy = to_path(rose, parse_word("x y"), 0);
  auto xyv = act_vertex(rb, xy, 0);
  REQUIRE(xyv.has_value());
  CHECK(tree_distance(rb, BallPoint::at_vertex(0), BallPoint::at_vertex(*xyv)) ==
        Rational(1));

  // interior points of a length-1/2 edge
  BallPoint p = BallPoint::on_edge(0, Rational(1, 8));
  BallPoint q = BallPoint::on_edge(0, Rational(3, 8));
  CHECK(tree_distance(rb, p, q) == Rational(1, 4));
  CHECK_THROWS_AS(tree_distance(rb, p, BallPoint::on_edge(999, Rational(0))),
                  Error);
}

TEST_CASE("characteristic sets: elliptic, hyperbolic and the identity") {
  GraphOfGroups g = bs23();
  TreeBall b = build_ball(g, Rational(2));

  CharacteristicSet ca = characteristic_set(b, parse_word("a_v"));
  CHECK(ca.min_value == Rational(0));
  bool base_in = false;
  for (int v : ca.vertices)
    if (v == 0) base_in = true;
  CHECK(base_in);

  CharacteristicSet ct = characteristic_set(b, parse_word("t"));
  CHECK(ct.min_value == Rational(1));
  base_in = false;
  for (int v : ct.vertices)
    if (v == 0) base_in = true;
  CHECK(base_in);
  CHECK(locus_length(ct) > Rational(0));  // an axis segment, not a point

  // the identity fixes everything; the locus fills the ball and meets the
  // frontier
  CharacteristicSet cid = characteristic_set(b, parse_word("t t^-1"));
  CHECK(cid.min_value == Rational(0));
  CHECK(cid.vertices.size() == b.vertices.size());
  CHECK(cid.truncated);
}

TEST_CASE("displacement identity d(x,gx) = 2 d(x,T_g) + l(g)") {
  Rng rng(404);
  int checked = 0;
  for (int trial = 0; trial < 12; ++trial) {
    GraphOfGroups g = random_graph(rng, trial % 2 == 0);
    Rational minlen = g.edges[0].length;
    for (const auto& e : g.edges) minlen = min(minlen, e.length);
    TreeBall b;
    try {
      b = build_ball(g, Rational(2) * minlen, 20000);
    } catch (const Error&) {
      continue;
    }
    for (int k = 0; k < 12; ++k) {
      Word w = random_loop_word(g, rng, 3);
      ReducedWord rw = reduce_word(g, w);
      PathWord p = to_path(g, w, 0);
      CharacteristicSet cs = characteristic_set(b, p);
      if (cs.empty()) continue;
      std::uniform_int_distribution<size_t> pickv(0, b.vertices.size() - 1);
      std::uniform_int_distribution<size_t> picke(0, b.edges.size() - 1);
      for (int s = 0; s < 6; ++s) {
        BallPoint x;
        if (s % 2 == 0) {
          x = BallPoint::at_vertex(int(pickv(rng)));
        } else {
          int ei = int(picke(rng));
          x = BallPoint::on_edge(ei, b.edges[ei].length / Rational(3));
        }
        bool certified = false;
        Rational dist = distance_to_locus(b, cs, x, &certified);
        if (!certified) continue;
        CHECK(displacement(b, p, x) == Rational(2) * dist + rw.length);
        ++checked;
      }
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("displacement along an edge follows the valley envelope") {
  Rng rng(505);
  for (int trial = 0; trial < 8; ++trial) {
    GraphOfGroups g = random_graph(rng, trial % 2 == 1);
    Rational minlen = g.edges[0].length;
    for (const auto& e : g.edges) minlen = min(minlen, e.length);
    TreeBall b;
    try {
      b = build_ball(g, Rational(2) * minlen, 20000);
    } catch (const Error&) {
      continue;
    }
    Word w = random_loop_word(g, rng, 3);
    PathWord p = to_path(g, w, 0);
    Rational l = reduce_word(g, w).length;
    std::uniform_int_distribution<size_t> picke(0, b.edges.size() - 1);
    for (int k = 0; k < 10; ++k) {
      int ei = int(picke(rng));
      const BallEdge& e = b.edges[ei];
      Rational fa = displacement(b, p, BallPoint::at_vertex(e.a));
      Rational fb = displacement(b, p, BallPoint::at_vertex(e.b));
      // slopes stay within +-2
      CHECK((fa - fb).abs() <= Rational(2) * e.length);
      Rational x = e.length / Rational(3);
      Rational valley = max(l, (fa + fb).half() - e.length);
      Rational expect =
          max(max(fa - Rational(2) * x, fb - Rational(2) * (e.length - x)),
              valley);
      CHECK(displacement(b, p, BallPoint::on_edge(ei, x)) == expect);
    }
  }
}

TEST_CASE("basepoint of the rose: l_T(S) = 1/2 at the vertex") {
  GraphOfGroups rose = rose2(Rational(1, 2), Rational(1, 2));
  TreeBall b = build_ball(rose, Rational(2));
  BasepointResult r =
      basepoint(b, std::vector<Word>{parse_word("x"), parse_word("y")});
  CHECK(r.l_S == Rational(1, 2));
  CHECK(locus_length(r.locus).is_zero());
  REQUIRE(r.basepoint.is_vertex());
  CHECK(r.basepoint.vertex == 0);
}

TEST_CASE("basepoint of BS(2,3) with S = {a,t}: a segment of length 1") {
  GraphOfGroups g = bs23();
  TreeBall b = build_ball(g, Rational(3));
  BasepointResult r =
      basepoint(b, std::vector<Word>{parse_word("a_v"), parse_word("t")});
  CHECK(r.l_S == Rational(1));
  CHECK(locus_length(r.locus) == Rational(1));
  REQUIRE(r.basepoint.is_vertex());
  CHECK(r.basepoint.vertex == 0);
}

TEST_CASE("basepoint failure modes") {
  GraphOfGroups rose = rose2(Rational(1, 2), Rational(1, 2));
  TreeBall b = build_ball(rose, Rational(2));
  try {
    basepoint(b, std::vector<Word>{parse_word("x")});
    FAIL("expected LocusTruncated: Z_S is the axis of x");
  } catch (const Error& e) {
    CHECK(e.code() == "LocusTruncated");
  }
  CHECK_THROWS_AS(basepoint(b, std::vector<Word>{}), Error);
}

TEST_CASE("projections onto the min-max locus leave along a maximal direction") {
  GraphOfGroups g = bs23();
  TreeBall b = build_ball(g, Rational(3));
  std::vector<Word> S = {parse_word("a_v"), parse_word("t")};
  BasepointResult r = basepoint(b, S);

  Rng rng(606);
  std::uniform_int_distribution<size_t> pickv(0, b.vertices.size() - 1);
  int checked = 0;
  for (int k = 0; k < 30; ++k) {
    BallPoint z = BallPoint::at_vertex(int(pickv(rng)));
    if (distance_to_locus(b, r.locus, z).is_zero()) continue;
    BallPoint proj = project_to_locus(b, r.locus, z);
    bool witnessed = false;
    for (const auto& w : S) {
      PathWord p = to_path(g, w, 0);
      if (displacement(b, p, proj) != r.l_S) continue;
      CharacteristicSet tg = characteristic_set(b, p);
      if (tg.empty()) continue;
      bool cert = false;
      distance_to_locus(b, tg, z, &cert);
      if (!cert) continue;
      BallPoint qg = project_to_locus(b, tg, z);
      if (tree_distance(b, z, proj) + tree_distance(b, proj, qg) ==
          tree_distance(b, z, qg))
        witnessed = true;
    }
    CHECK(witnessed);
    ++checked;
  }
  CHECK(checked > 5);
}

TEST_CASE("irreducibility detection") {
  // a single free loop acts on a line
  GraphOfGroups line = make_rose({Rational(1)});
  IrreducibilityResult r1 = is_irreducible(line, 3);
  CHECK(r1.kind == IrreducibilityKind::Reducible);

  // the rose is irreducible with a witness pair
  IrreducibilityResult r2 =
      is_irreducible(rose2(Rational(1, 2), Rational(1, 2)), 2);
  CHECK(r2.kind == IrreducibilityKind::Irreducible);
  CHECK(!r2.witness_g.empty());

  // BS(1,2) is an ascending HNN extension: a fixed end
  IrreducibilityResult r3 = is_irreducible(make_bs(1, 2), 3);
  CHECK(r3.kind == IrreducibilityKind::Reducible);

  // BS(2,3) is irreducible
  IrreducibilityResult r4 = is_irreducible(bs23(), 3);
  CHECK(r4.kind == IrreducibilityKind::Irreducible);

  // no hyperbolic elements at all: a point action
  GraphOfGroups point;
  point.vertices = {{"v", GroupKind::InfiniteCyclic}};
  point.marking = std::map<std::string, std::string>{{"a", "a_v"}};
  IrreducibilityResult r5 = is_irreducible(point, 2);
  CHECK(r5.kind == IrreducibilityKind::Reducible);
}

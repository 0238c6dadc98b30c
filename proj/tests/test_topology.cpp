#include "doctest.h"

#include "gtd/topology.hpp"
#include "test_util.hpp"

using namespace gtd;
using namespace gtd::testutil;

TEST_CASE("length vectors: rose coordinates and homothety") {
  GraphOfGroups rose = rose2(Rational(1, 2), Rational(1, 2));
  LengthVector lv = length_vector(rose, {"x", "y", "x y", "x y^-1"});
  CHECK(lv.values[0] == Rational(1, 2));
  CHECK(lv.values[1] == Rational(1, 2));
  CHECK(lv.values[2] == Rational(1));
  CHECK(lv.values[3] == Rational(1));

  LengthVector doubled =
      length_vector(rose.scaled(Rational(2)), {"x", "y", "x y", "x y^-1"});
  for (size_t i = 0; i < lv.values.size(); ++i)
    CHECK(doubled.values[i] == Rational(2) * lv.values[i]);

  LengthVector ell = length_vector(bs23(), {"a", "a a"});
  CHECK(ell.values[0].is_zero());
  CHECK(ell.values[1].is_zero());
}

TEST_CASE("length vector separates trees of the test corpus") {
  // short conjugacy classes separate non-equal trees of the corpus
  GraphOfGroups a = rose2(Rational(1, 2), Rational(1, 2));
  GraphOfGroups b = rose2(Rational(1), Rational(1, 2));
  std::vector<std::string> classes = {"x", "y", "x y", "x y^-1", "x x y",
                                      "x y x y^-1"};
  LengthVector la = length_vector(a, classes);
  LengthVector lb = length_vector(b, classes);
  CHECK(la.values != lb.values);

  GraphOfGroups c = make_bs(2, 3);
  GraphOfGroups d = make_bs(2, 5);
  // t^-1 a^3 t pinches in BS(2,3) only, so appending a letter leaves an
  // elliptic element there and a hyperbolic one in BS(2,5)
  std::vector<std::string> gbs_classes = {"t", "a t", "t^-1 a^3 t a",
                                          "t^-1 a^5 t a"};
  LengthVector lc = length_vector(c, gbs_classes);
  LengthVector ld = length_vector(d, gbs_classes);
  CHECK(lc.values != ld.values);
  CHECK(lc.values[2].is_zero());
  CHECK(ld.values[2] == Rational(2));
  CHECK(ld.values[3].is_zero());
  CHECK(lc.values[3] == Rational(2));
}

TEST_CASE("simplex coordinates and the inverse tree") {
  GraphOfGroups g = theta_graph();
  g.edges[2].length = Rational(2);
  SimplexCoords c = simplex_coords(g);
  CHECK(c.volume == Rational(4));
  CHECK(c.barycentric[0] == Rational(1, 4));
  CHECK(c.barycentric[1] == Rational(1, 4));
  CHECK(c.barycentric[2] == Rational(1, 2));

  GraphOfGroups back = simplex_tree(c, g);
  for (size_t e = 0; e < g.edges.size(); ++e)
    CHECK(back.edges[e].length == g.edges[e].length);

  // volume-1 tree: barycentric = lengths
  GraphOfGroups unit = rose2(Rational(1, 2), Rational(1, 2));
  SimplexCoords cu = simplex_coords(unit);
  CHECK(cu.volume == Rational(1));
  CHECK(cu.barycentric[0] == Rational(1, 2));

  Rng rng(31);
  for (int k = 0; k < 30; ++k) {
    GraphOfGroups r = random_graph(rng, k % 2 == 0);
    SimplexCoords cr = simplex_coords(r);
    Rational sum(0);
    for (const auto& v : cr.barycentric) sum += v;
    CHECK(sum == Rational(1));
    GraphOfGroups rb = simplex_tree(cr, r);
    for (size_t e = 0; e < r.edges.size(); ++e)
      CHECK(rb.edges[e].length == r.edges[e].length);
  }

  SimplexCoords bad = c;
  bad.edge_order.pop_back();
  bad.barycentric.pop_back();
  CHECK_THROWS_AS(simplex_tree(bad, g), Error);
}

namespace {

// identity-style approximation between a tree and a perturbed copy: pairs
// match ball vertices by coset key
Approximation matched_approximation(const GraphOfGroups& g1,
                                    const GraphOfGroups& g2,
                                    const Rational& radius,
                                    const std::vector<std::string>& P) {
  Approximation a;
  a.left = build_ball(g1, radius, 20000);
  a.right = build_ball(g2, radius, 20000);
  for (size_t v = 0; v < a.left.vertices.size(); ++v) {
    auto it = a.right.coset_index.find(
        coset_key(a.right.graph, a.left.vertices[v].rep));
    if (it == a.right.coset_index.end())
      throw Error("InternalError", "balls do not match combinatorially");
    a.pairs.push_back(
        {BallPoint::at_vertex(int(v)), BallPoint::at_vertex(it->second)});
  }
  if (a.pairs.size() != a.right.vertices.size())
    throw Error("InternalError", "right ball has extra vertices");
  // exact distortion, plus a margin wide enough that the vertex relation is
  // genuinely full: segment samples sit within half an edge of a vertex
  Rational dist(0), maxlen(0);
  for (const auto& e : g1.edges) maxlen = max(maxlen, e.length);
  for (size_t i = 0; i < a.pairs.size(); ++i)
    for (size_t j = i + 1; j < a.pairs.size(); ++j) {
      Rational dl = tree_distance(a.left, a.pairs[i].first, a.pairs[j].first);
      Rational dr = tree_distance(a.right, a.pairs[i].second, a.pairs[j].second);
      dist = max(dist, (dl - dr).abs());
    }
  a.epsilon = dist + maxlen / Rational(3);
  a.full = true;
  for (const auto& w : P) {
    a.P.push_back(marked_word(g1, w));
    a.P_right.push_back(marked_word(g2, w));
  }
  return a;
}

}  // namespace

TEST_CASE("approximation checking: identity, distortion, surjectivity") {
  GraphOfGroups rose = rose2(Rational(1, 2), Rational(1, 2));
  Approximation id = matched_approximation(rose, rose, Rational(1), {"x", "y"});
  CHECK(id.epsilon == Rational(1, 6));  // zero distortion plus the margin
  CHECK(check_approximation(id).ok);

  // relate two points at distance 0 with two at distance ~1
  Approximation bad = id;
  bad.epsilon = Rational(1, 2);
  bad.pairs.push_back({bad.pairs[0].first, bad.pairs[1].second});
  ApproximationReport rep = check_approximation(bad);
  CHECK(!rep.ok);
  CHECK(rep.violation == "DistortionViolation");

  // a relation that misses a vertex is not surjective
  Approximation missing = id;
  missing.pairs.pop_back();
  CHECK(check_approximation(missing).violation == "NotSurjective");
}

TEST_CASE("thickening: epsilon + 2 delta re-verification and equivariance") {
  Rng rng(47);
  int done = 0;
  for (int trial = 0; trial < 12 && done < 6; ++trial) {
    GraphOfGroups g = random_graph(rng, trial % 2 == 0, 3);
    Rational minlen = g.edges[0].length;
    for (const auto& e : g.edges) minlen = min(minlen, e.length);
    GraphOfGroups moved = g;
    // perturb lengths slightly, keeping combinatorics
    for (size_t e = 0; e < moved.edges.size(); ++e)
      moved.edges[e].length =
          moved.edges[e].length + minlen / Rational(20 + int(e));
    std::vector<std::string> P;
    int count = 0;
    for (const auto& [k, v] : *g.marking) {
      if (count++ >= 2) break;
      P.push_back(k);
    }
    Approximation a;
    try {
      a = matched_approximation(g, moved, minlen * Rational(2), P);
    } catch (const Error&) {
      continue;
    }
    REQUIRE(check_approximation(a).ok);

    Rational delta = minlen / Rational(10);
    Approximation thick = thicken(a, delta);
    CHECK(thick.epsilon == a.epsilon + Rational(2) * delta);
    ApproximationReport rep = check_approximation(thick);
    CHECK(rep.ok);
    ++done;
  }
  CHECK(done >= 6);

  // delta = 0 keeps the relation
  GraphOfGroups rose = rose2(Rational(1, 2), Rational(1, 2));
  Approximation id = matched_approximation(rose, rose, Rational(1), {"x"});
  Approximation same = thicken(id, Rational(0));
  CHECK(same.pairs.size() == id.pairs.size());
  CHECK(same.epsilon == id.epsilon);
}

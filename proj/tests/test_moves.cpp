#include "doctest.h"

#include <set>

#include "test_util.hpp"

using namespace gtd;
using namespace gtd::testutil;

namespace {

bool graphs_equal(const GraphOfGroups& a, const GraphOfGroups& b) {
  if (a.vertices.size() != b.vertices.size() ||
      a.edges.size() != b.edges.size())
    return false;
  for (const auto& v : a.vertices) {
    int i = b.vertex_index_quiet(v.id);
    if (i < 0 || b.vertices[i].kind != v.kind) return false;
  }
  for (const auto& e : a.edges) {
    int i = b.edge_index_quiet(e.id);
    if (i < 0) return false;
    const EdgeSpec& f = b.edges[i];
    if (e.from != f.from || e.to != f.to || e.index_from != f.index_from ||
        e.index_to != f.index_to || e.length != f.length)
      return false;
  }
  std::set<std::string> ta(a.spanning_tree.begin(), a.spanning_tree.end());
  std::set<std::string> tb(b.spanning_tree.begin(), b.spanning_tree.end());
  return ta == tb;
}

}  // namespace

TEST_CASE("is_reduced: loops are vacuous, separating full edges are not") {
  CHECK(is_reduced(rose2(Rational(1), Rational(1))).reduced);
  CHECK(is_reduced(bs23()).reduced);
  ReducedCheck rc = is_reduced(theta_graph());
  CHECK(!rc.reduced);
  CHECK(!rc.witness.empty());
}

TEST_CASE("collapse of a two-vertex GBS graph: Tietze oracle (6,5)") {
  GraphOfGroups g;
  g.vertices = {{"u", GroupKind::InfiniteCyclic}, {"v", GroupKind::InfiniteCyclic}};
  g.edges = {{"e1", "u", "v", BigInt(1), BigInt(2), Rational(1)},
             {"e2", "u", "v", BigInt(3), BigInt(5), Rational(1)}};
  g.spanning_tree = {"e1"};
  // loops at the base u: a_v conjugated through the tree edge, s = stable
  // letter closed up through the tree
  g.marking = std::map<std::string, std::string>{
      {"au", "a_u"}, {"av", "e1^-1 a_v e1"}, {"s", "e2^-1 e1"}};
  require_valid(g);

  auto [after, rec] = collapse_edge(g, "e1");
  CHECK(after.vertices.size() == 1);
  CHECK(after.vertices[0].id == "v");
  REQUIRE(after.edges.size() == 1);
  CHECK(after.edges[0].from == "v");
  CHECK(after.edges[0].to == "v");
  CHECK(after.edges[0].index_from == BigInt(6));
  CHECK(after.edges[0].index_to == BigInt(5));
  CHECK(after.volume() == Rational(1));
  CHECK(rec.before_volume == Rational(2));
  CHECK(rec.after_volume == Rational(1));
  CHECK(rec.marking_update.at("a_u") == "a_v^2");

  // elliptic profiles agree through the rewritten markings
  ProfileResult pr = same_deformation_space(
      g, after, {"au", "av", "s", "s au", "s av s^-1", "au av"});
  CHECK(pr.agree);

  // round trip: the recorded inverse expansion restores the graph exactly
  auto [back, rec2] = expand_vertex(after, "v", rec.inverse_expansion);
  CHECK(graphs_equal(back, g));
  ProfileResult pr2 = same_deformation_space(g, back, {"au", "av", "s"});
  CHECK(pr2.agree);
}

TEST_CASE("theta collapse gives the rose") {
  GraphOfGroups theta = theta_graph();
  auto [after, rec] = collapse_edge(theta, "e1");
  CHECK(after.vertices.size() == 1);
  CHECK(after.edges.size() == 2);
  for (const auto& e : after.edges) CHECK(e.from == e.to);
  CHECK(after.volume() == Rational(2));
  ProfileResult pr = same_deformation_space(theta, after, {"x", "y", "x y"});
  CHECK(pr.agree);

  auto [back, rec2] = expand_vertex(after, rec.inverse_expansion.exact_edge->from ==
                                               rec.inverse_expansion.new_vertex
                                           ? rec.inverse_expansion.exact_edge->to
                                           : rec.inverse_expansion.exact_edge->from,
                                    rec.inverse_expansion);
  CHECK(graphs_equal(back, theta));
}

TEST_CASE("collapse preconditions") {
  GraphOfGroups g = bs23();
  try {
    collapse_edge(g, "t");
    FAIL("expected LoopCollapse");
  } catch (const Error& e) {
    CHECK(e.code() == "LoopCollapse");
  }

  GraphOfGroups notfull;
  notfull.vertices = {{"u", GroupKind::InfiniteCyclic},
                      {"v", GroupKind::InfiniteCyclic}};
  notfull.edges = {{"e1", "u", "v", BigInt(2), BigInt(3), Rational(1)},
                   {"e2", "u", "v", BigInt(2), BigInt(2), Rational(1)}};
  notfull.spanning_tree = {"e1"};
  try {
    collapse_edge(notfull, "e1");
    FAIL("expected EdgeGroupNotFull");
  } catch (const Error& e) {
    CHECK(e.code() == "EdgeGroupNotFull");
  }

  GraphOfGroups last;
  last.vertices = {{"u", GroupKind::Trivial}, {"v", GroupKind::Trivial}};
  last.edges = {{"e", "u", "v", BigInt(1), BigInt(1), Rational(1)}};
  last.spanning_tree = {"e"};
  try {
    collapse_edge(last, "e");
    FAIL("expected LastEdgeOfMinimalAction");
  } catch (const Error& e) {
    CHECK(e.code() == "LastEdgeOfMinimalAction");
  }
}

TEST_CASE("rose expansion: splitting petal ends 2/2 with a new length") {
  GraphOfGroups rose = rose2(Rational(1), Rational(1));
  ExpansionSpec spec;
  spec.new_vertex = "w";
  spec.new_edge = "f";
  spec.index = BigInt(1);
  spec.length = Rational(1, 4);
  spec.migrate = {{"x", true}, {"y", true}};  // one end of each loop moves

  auto [after, rec] = expand_vertex(rose, "v", spec);
  CHECK(after.vertices.size() == 2);
  CHECK(after.edges.size() == 3);
  CHECK(after.volume() == rose.volume() + Rational(1, 4));
  ProfileResult pr =
      same_deformation_space(rose, after, {"x", "y", "x y", "x y^-1"});
  CHECK(pr.agree);
  // the moved end makes x cross the new edge once: 1 + 1/4
  CHECK(translation_length(after, marked_word(after, "x", false)) ==
        Rational(5, 4));

  auto [back, rec2] = collapse_edge(after, "f");
  CHECK(graphs_equal(back, rose));
}

TEST_CASE("expansion divisibility failure") {
  GraphOfGroups g = bs23();
  ExpansionSpec spec;
  spec.new_vertex = "w";
  spec.new_edge = "f";
  spec.index = BigInt(2);
  spec.length = Rational(1);
  spec.migrate = {{"t", true}};  // index_from(t) = 2 is divisible
  auto [ok_graph, ok_rec] = expand_vertex(g, "v", spec);
  CHECK(ok_graph.edges.size() == 2);

  ExpansionSpec bad = spec;
  bad.migrate = {{"t", false}};  // index_to(t) = 3 is not divisible by 2
  try {
    expand_vertex(g, "v", bad);
    FAIL("expected DivisibilityFailure");
  } catch (const Error& e) {
    CHECK(e.code() == "DivisibilityFailure");
  }

  try {
    expand_vertex(g, "nope", spec);
    FAIL("expected UnknownVertex");
  } catch (const Error& e) {
    CHECK(e.code() == "UnknownVertex");
  }
}

TEST_CASE("profile comparison across distinct deformation spaces") {
  GraphOfGroups bs = bs23();
  GraphOfGroups rose = rose2(Rational(1), Rational(1));
  // force a common generator naming
  rose.marking = std::map<std::string, std::string>{{"a", "x"}, {"t", "y"}};
  ProfileResult pr = same_deformation_space(bs, rose, {"a", "t"});
  CHECK(!pr.agree);
  CHECK(pr.witness == "a");

  // homothety preserves ellipticity
  ProfileResult pr2 =
      same_deformation_space(bs, bs.scaled(Rational(2)), {"a", "t", "t a"});
  CHECK(pr2.agree);

  GraphOfGroups unmarked = bs;
  unmarked.marking.reset();
  CHECK_THROWS_AS(same_deformation_space(bs, unmarked, {"a"}), Error);
}

TEST_CASE("random move sequences preserve elliptic profiles and volumes") {
  Rng rng(909);
  int sequences_done = 0;
  for (int trial = 0; trial < 25; ++trial) {
    GraphOfGroups g = random_graph(rng, trial % 2 == 0, 3);
    GraphOfGroups original = g;
    std::vector<std::string> words;
    for (int k = 0; k < 12; ++k) {
      Word w = random_loop_word(original, rng, 3);
      words.push_back(word_to_string(path_to_word(
          original, to_path(original, w, original.base_vertex()))));
    }
    // base words must be expressed through marking generators only: rebuild
    // from the marking keys instead
    words.clear();
    std::vector<std::string> keys;
    for (const auto& [k2, v2] : *original.marking) keys.push_back(k2);
    std::uniform_int_distribution<size_t> pick(0, keys.size() - 1);
    for (int k = 0; k < 10; ++k) {
      std::string w = keys[pick(rng)];
      int extra = int(pick(rng) % 3);
      for (int i = 0; i < extra; ++i) {
        w += " " + keys[pick(rng)];
        if (pick(rng) % 2) w += "^-1";
      }
      words.push_back(w);
    }

    int fresh = 0;
    std::uniform_int_distribution<int> coin(0, 1);
    for (int mv = 0; mv < 6; ++mv) {
      Rational vol_before = g.volume();
      bool did = false;
      if (coin(rng) == 0) {
        // try a collapse
        for (const auto& e : g.edges) {
          if (e.from == e.to || g.edges.size() == 1) continue;
          try {
            auto [after, rec] = collapse_edge(g, e.id);
            CHECK(vol_before - after.volume() == e.length);
            g = after;
            did = true;
            break;
          } catch (const Error&) {
          }
        }
      }
      if (!did) {
        // expansion splitting nothing (a hanging new vertex is forbidden:
        // it would not be minimal, but the data model allows it; migrate a
        // random end when one exists)
        std::uniform_int_distribution<size_t> pv(0, g.vertices.size() - 1);
        std::string v = g.vertices[pv(rng)].id;
        ExpansionSpec spec;
        spec.new_vertex = "nw" + std::to_string(fresh);
        spec.new_edge = "ne" + std::to_string(fresh);
        ++fresh;
        spec.index = BigInt(1);
        spec.length = random_length(rng);
        for (const auto& e : g.edges) {
          if (e.from == v && coin(rng)) spec.migrate.push_back({e.id, true});
          if (e.to == v && coin(rng)) spec.migrate.push_back({e.id, false});
        }
        auto [after, rec] = expand_vertex(g, v, spec);
        CHECK(after.volume() - vol_before == spec.length);
        g = after;
      }
      ProfileResult pr = same_deformation_space(original, g, words);
      CHECK(pr.agree);
      if (!pr.agree) break;
    }
    ++sequences_done;
  }
  CHECK(sequences_done == 25);
}

TEST_CASE("irreducibility witnesses survive a collapse") {
  GraphOfGroups theta = theta_graph();
  IrreducibilityResult before = is_irreducible(theta, 3);
  REQUIRE(before.kind == IrreducibilityKind::Irreducible);

  auto [after, rec] = collapse_edge(theta, "e1");
  Word wg = rewrite_through_collapse(theta, after, rec, before.witness_g);
  Word wh = rewrite_through_collapse(theta, after, rec, before.witness_h);
  // translated witnesses stay hyperbolic; certify the pair on the collapsed
  // graph directly
  CHECK(reduce_word(after, wg).hyperbolic);
  CHECK(reduce_word(after, wh).hyperbolic);
  IrreducibilityResult again = is_irreducible(after, 3);
  CHECK(again.kind == IrreducibilityKind::Irreducible);
}

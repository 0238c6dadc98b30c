#include "gtd/section.hpp"

#include <algorithm>
#include <set>

#include "gtd/moves.hpp"

namespace gtd {

QPoint ball_point_to_qpoint(const TreeBall& b, const BallPoint& p0) {
  BallPoint p = normalize_point(b, p0);
  if (p.is_vertex())
    return QPoint::at_vertex(b.vertices[p.vertex].graph_vertex);
  const BallEdge& e = b.edges[p.edge];
  // the a side of a ball edge sits at the traversal start: for dir +1 that
  // is the quotient edge's `to` endpoint, for dir -1 its `from` endpoint
  Rational off = e.dir > 0 ? e.length - p.offset : p.offset;
  return QPoint::on_edge(e.graph_edge, off);
}

namespace {

std::vector<RangeStep> ball_path_to_steps(const TreeBall& b,
                                          const std::vector<PathSeg>& segs) {
  std::vector<RangeStep> steps;
  for (const auto& s : segs) {
    const BallEdge& e = b.edges[s.edge];
    Rational f = s.from, t = s.to;
    if (e.dir > 0) {
      f = e.length - f;
      t = e.length - t;
    }
    steps.push_back(RangeStep{e.graph_edge, f, t});
  }
  return steps;
}

// reverse lookup of an identity-lettered marking: graph letter -> generator
std::map<std::string, std::string> identity_marking_names(
    const GraphOfGroups& g) {
  if (!g.marking)
    throw Error("MissingMarking", "the base tree needs a marking");
  std::map<std::string, std::string> names;
  for (const auto& [gen, text] : *g.marking) {
    Word w = parse_word(text);
    if (w.size() != 1 || w[0].exponent != BigInt(1))
      throw Error("BadMarking",
                  "section requires an identity-lettered base marking; "
                  "generator '" + gen + "' maps to '" + text + "'");
    if (!names.emplace(w[0].id, gen).second)
      throw Error("BadMarking", "base marking repeats letter '" + w[0].id + "'");
  }
  for (const auto& v : g.vertices)
    if (v.kind == GroupKind::InfiniteCyclic &&
        !names.count(vertex_generator_name(v.id)))
      throw Error("BadMarking", "base marking misses the vertex generator of '" +
                                    v.id + "'");
  for (const auto& e : g.edges)
    if (!g.in_spanning_tree(e.id) && !names.count(e.id))
      throw Error("BadMarking",
                  "base marking misses the non-tree edge '" + e.id + "'");
  return names;
}

struct SectionAttempt {
  SectionMap sm;
  bool need_larger = false;
};

SectionAttempt try_section(const GraphOfGroups& base,
                           const GraphOfGroups& target, const Rational& radius,
                           size_t cap) {
  SectionAttempt at;
  SectionMap& sm = at.sm;
  sm.base = base;
  sm.target = target;

  auto letter_names = identity_marking_names(base);
  if (!target.marking)
    throw Error("MissingMarking", "the target tree needs a marking");
  for (const auto& [gen, text] : *base.marking)
    if (!target.marking->count(gen))
      throw Error("MissingMarking",
                  "target marking misses generator '" + gen + "'");

  // generating set S: all base-group generators, as target words
  std::vector<Word> S;
  std::vector<PathWord> S_paths;
  for (const auto& [gen, text] : *target.marking) {
    S.push_back(parse_word(text));
    S_paths.push_back(to_path(target, S.back(), target.base_vertex()));
  }

  sm.ball = build_displacement_ball(target, S_paths, radius, cap);
  try {
    sm.y_star = basepoint(sm.ball, S);
  } catch (const Error& e) {
    if (e.code() == "LocusTruncated") {
      at.need_larger = true;
      return at;
    }
    throw;
  }

  // per vertex orbit: the projected basepoint p_{Y_i}(y_*)
  std::vector<BallPoint> proj(base.vertices.size());
  for (size_t v = 0; v < base.vertices.size(); ++v) {
    if (base.vertices[v].kind == GroupKind::Trivial) {
      proj[v] = sm.y_star.basepoint;
      continue;
    }
    std::string gen = letter_names.at(vertex_generator_name(base.vertices[v].id));
    Word stab = parse_word(target.marking->at(gen));
    ReducedWord red = reduce_word(target, stab);
    if (red.hyperbolic)
      throw Error("MarkingIncompatible",
                  "vertex stabilizer '" + gen + "' acts hyperbolically on the "
                  "target; the trees are not in one deformation space");
    CharacteristicSet fix = characteristic_set(sm.ball, stab);
    if (fix.empty()) {
      at.need_larger = true;
      return at;
    }
    bool certified = false;
    distance_to_locus(sm.ball, fix, sm.y_star.basepoint, &certified);
    if (!certified) {
      at.need_larger = true;
      return at;
    }
    proj[v] = project_to_locus(sm.ball, fix, sm.y_star.basepoint);
  }
  sm.vertex_images = proj;

  // primary lifts are wired along the spanning tree, so a tree edge lifts
  // to [primary(u), primary(v)]; a non-tree edge e lifts to the segment
  // from the extra vertex g_e * primary(from e) to primary(to e)
  std::vector<std::optional<BallPoint>> lift_from(base.edges.size()),
      lift_to(base.edges.size());
  for (size_t e = 0; e < base.edges.size(); ++e) {
    const EdgeSpec& es = base.edges[e];
    int u = base.vertex_index(es.from), v = base.vertex_index(es.to);
    if (base.in_spanning_tree(es.id)) {
      lift_from[e] = proj[u];
      lift_to[e] = proj[v];
      continue;
    }
    std::string gen = letter_names.at(es.id);
    Word gword = parse_word(target.marking->at(gen));
    PathWord gpath = to_path(target, gword, target.base_vertex());
    auto moved = act_point(sm.ball, gpath, proj[u]);
    if (!moved) {
      at.need_larger = true;
      return at;
    }
    lift_from[e] = *moved;
    lift_to[e] = proj[v];
  }

  sm.remetrized = base;
  for (size_t e = 0; e < base.edges.size(); ++e) {
    Rational len = tree_distance(sm.ball, *lift_from[e], *lift_to[e]);
    if (len.is_zero())
      throw Error("DegenerateEdge",
                  "the section collapses edge '" + base.edges[e].id +
                      "'; the base tree is not reduced or the data is "
                      "inconsistent",
                  {{"edge", base.edges[e].id}});
    sm.remetrized.edges[e].length = len;
  }

  if (base.all_vertices_trivial() && target.all_vertices_trivial()) {
    Morphism beta;
    beta.domain = sm.remetrized;
    beta.range = target;
    beta.vertex_images.resize(base.vertices.size());
    for (size_t v = 0; v < base.vertices.size(); ++v)
      beta.vertex_images[v] = ball_point_to_qpoint(sm.ball, proj[v]);
    beta.edge_images.resize(base.edges.size());
    for (size_t e = 0; e < base.edges.size(); ++e) {
      auto segs = tree_path(sm.ball, *lift_from[e], *lift_to[e]);
      beta.edge_images[e] = ball_path_to_steps(sm.ball, segs);
    }
    finalize_morphism(beta);
    sm.beta = beta;
    sm.beta_valid = true;
  }
  return at;
}

}  // namespace

SectionMap section_map(const GraphOfGroups& base, const GraphOfGroups& target,
                       Rational radius, size_t cap) {
  require_valid(base);
  require_valid(target);
  ReducedCheck rc = is_reduced(base);
  if (!rc.reduced)
    throw Error("BaseNotReduced",
                "the base tree admits a collapse at edge '" + rc.witness + "'",
                {{"edge", rc.witness}});
  for (int round = 0;; ++round) {
    if (round > 24)
      throw Error("LocusTruncated",
                  "section data kept leaving the displacement ball");
    SectionAttempt at = try_section(base, target, radius, cap);
    if (!at.need_larger) return std::move(at.sm);
    radius = max(radius, at.sm.ball.radius) * Rational(2);
  }
}

ContractionPath contraction_path(const GraphOfGroups& base,
                                 const GraphOfGroups& target,
                                 const std::vector<Rational>& times,
                                 Rational radius, size_t cap) {
  if (!base.all_vertices_trivial() || !target.all_vertices_trivial())
    throw Error("NontrivialStabilizer",
                "contraction paths require free actions");
  SectionMap sm = section_map(base, target, radius, cap);
  ContractionPath cp;
  cp.beta = sm.beta;
  for (const auto& t : times)
    cp.steps.push_back({t, fold_at_time(sm.beta, t).tree});
  cp.terminal = simplex_coords(sm.remetrized);
  return cp;
}

StabilityReport basepoint_stability(const GraphOfGroups& target,
                                    const Rational& perturbation,
                                    Rational radius, size_t cap) {
  require_valid(target);
  if (perturbation.sign() < 0)
    throw Error("BadPerturbation", "perturbation must be >= 0");
  if (!target.marking)
    throw Error("MissingMarking", "basepoint stability needs a marking");

  IrreducibilityResult irr = is_irreducible(target, 3);
  if (irr.kind == IrreducibilityKind::Reducible)
    throw Error("NotIrreducible",
                "basepoints require an irreducible action: " + irr.reason);

  // perturb edge lengths with alternating signs, keeping them positive
  Rational eps = perturbation;
  for (const auto& e : target.edges)
    eps = min(eps, e.length / Rational(2));
  GraphOfGroups moved = target;
  for (size_t e = 0; e < moved.edges.size(); ++e)
    moved.edges[e].length =
        moved.edges[e].length + (e % 2 == 0 ? eps : -eps);

  std::vector<Word> S;
  std::vector<PathWord> S1, S2;
  for (const auto& [gen, text] : *target.marking) {
    S.push_back(parse_word(text));
    S1.push_back(to_path(target, S.back(), target.base_vertex()));
    S2.push_back(to_path(moved, S.back(), moved.base_vertex()));
  }

  TreeBall b1, b2;
  BasepointResult r1, r2;
  {
    // a shared bound keeps the two complexes combinatorially comparable
    auto base_f = [&](const GraphOfGroups& g, const std::vector<PathWord>& sp) {
      PathWord b0;
      b0.start = g.base_vertex();
      Rational m(0);
      for (const auto& s : sp)
        m = max(m, coset_distance(g, b0, multiply(g, s, b0)));
      return m;
    };
    Rational bound =
        max(radius, Rational(2) * max(base_f(target, S1), base_f(moved, S2)));
    for (;;) {
      b1 = build_displacement_ball(target, S1, bound, cap);
      b2 = build_displacement_ball(moved, S2, bound, cap);
      try {
        r1 = basepoint(b1, S);
        r2 = basepoint(b2, S);
        break;
      } catch (const Error& e) {
        if (e.code() != "LocusTruncated") throw;
        bound = bound * Rational(2);
      }
    }
  }

  // match ball vertices across the two metrics by coset key
  std::vector<std::pair<int, int>> matched;
  for (size_t v = 0; v < b1.vertices.size(); ++v) {
    auto it = b2.coset_index.find(coset_key(b2.graph, b1.vertices[v].rep));
    if (it != b2.coset_index.end()) matched.push_back({int(v), it->second});
  }

  Rational distortion(0);
  for (size_t i = 0; i < matched.size(); ++i)
    for (size_t j = i + 1; j < matched.size(); ++j) {
      Rational d1 = vertex_distance(b1, matched[i].first, matched[j].first);
      Rational d2 = vertex_distance(b2, matched[i].second, matched[j].second);
      distortion = max(distortion, (d1 - d2).abs());
    }

  // transport the first basepoint into the perturbed ball
  BallPoint y1 = r1.basepoint;
  BallPoint y1_moved;
  if (y1.is_vertex()) {
    auto it = b2.coset_index.find(
        coset_key(b2.graph, b1.vertices[y1.vertex].rep));
    if (it == b2.coset_index.end())
      throw Error("InternalError", "basepoint vertex unmatched across balls");
    y1_moved = BallPoint::at_vertex(it->second);
  } else {
    const BallEdge& e1 = b1.edges[y1.edge];
    auto ia = b2.coset_index.find(coset_key(b2.graph, b1.vertices[e1.a].rep));
    auto ib = b2.coset_index.find(coset_key(b2.graph, b1.vertices[e1.b].rep));
    if (ia == b2.coset_index.end() || ib == b2.coset_index.end())
      throw Error("InternalError", "basepoint edge unmatched across balls");
    int child = -1;
    if (b2.vertices[ib->second].parent == ia->second) child = ib->second;
    else if (b2.vertices[ia->second].parent == ib->second) child = ia->second;
    else throw Error("InternalError", "matched edge is not a ball edge");
    int edge2 = b2.vertices[child].parent_edge;
    Rational scale = b2.edges[edge2].length / e1.length;
    Rational off = y1.offset * scale;
    if (b2.edges[edge2].a != ia->second)
      off = b2.edges[edge2].length - off;
    y1_moved = BallPoint::on_edge(edge2, off);
  }

  StabilityReport rep;
  rep.perturbation = eps;
  rep.distortion = distortion;
  rep.displacement = tree_distance(b2, y1_moved, r2.basepoint);
  rep.within_bound = rep.displacement <= Rational(4) * distortion ||
                     rep.displacement.is_zero();
  return rep;
}

}  // namespace gtd

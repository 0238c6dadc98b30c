#include "gtd/treegeom.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace gtd {

namespace {

// Displacement of one loop word along an edge, as the upper envelope of
// three affine pieces: descend at slope -2, run flat at the valley, ascend
// at slope 2. Exactness relies on d(x,gx) = 2 d(x,T_g) + l(g).
struct EdgeValley {
  Rational fa, fb, valley, len;

  Rational eval(const Rational& x) const {
    Rational v = max(fa - Rational(2) * x, fb - Rational(2) * (len - x));
    return max(v, valley);
  }
};

EdgeValley edge_valley(const Rational& fa, const Rational& fb,
                       const Rational& len, const Rational& global_min) {
  Rational mid = (fa + fb).half() - len;
  return EdgeValley{fa, fb, max(global_min, mid), len};
}

struct LocusBuild {
  Rational min_value;
  std::vector<int> vertices;
  std::vector<SubSegment> segments;
};

}  // namespace

CharacteristicSet characteristic_set(const TreeBall& b, const Word& w) {
  PathWord p = to_path(b.graph, w, b.graph.base_vertex());
  return characteristic_set(b, p);
}

CharacteristicSet characteristic_set(const TreeBall& b, const PathWord& loop) {
  const GraphOfGroups& g = b.graph;
  ReducedWord rw = reduce_loop(g, loop);
  Rational l = rw.length;

  std::vector<Rational> f(b.vertices.size());
  for (size_t v = 0; v < b.vertices.size(); ++v) {
    f[v] = displacement(b, loop, BallPoint::at_vertex(int(v)));
    if (f[v] < l)
      throw Error("InternalError",
                  "displacement below the translation length; reduction and "
                  "ball conventions disagree");
  }

  CharacteristicSet cs;
  cs.min_value = l;
  for (size_t v = 0; v < b.vertices.size(); ++v)
    if (f[v] == l) cs.vertices.push_back(int(v));

  for (size_t e = 0; e < b.edges.size(); ++e) {
    const BallEdge& be = b.edges[e];
    const Rational& fa = f[be.a];
    const Rational& fb = f[be.b];
    // f(x) = l on [p, q] when the valley reaches l
    Rational p = (fa - l).half();
    Rational q = be.length - (fb - l).half();
    Rational lo = max(p, Rational(0));
    Rational hi = min(q, be.length);
    if (lo > hi) continue;
    if (lo.is_zero() && hi == be.length && fa == l && fb == l) {
      cs.segments.push_back(SubSegment{int(e), lo, hi});
      continue;
    }
    if (lo == hi && (lo.is_zero() || hi == be.length)) continue;  // a vertex
    cs.segments.push_back(SubSegment{int(e), lo, hi});
  }

  cs.truncated = locus_touches_frontier(b, cs) || cs.empty();
  return cs;
}

Rational locus_length(const CharacteristicSet& cs) {
  Rational total(0);
  for (const auto& s : cs.segments) total += s.to - s.from;
  return total;
}

bool locus_touches_frontier(const TreeBall& b, const CharacteristicSet& cs) {
  for (int v : cs.vertices)
    if (b.frontier(v)) return true;
  for (const auto& s : cs.segments) {
    const BallEdge& e = b.edges[s.edge];
    if (s.from.is_zero() && b.frontier(e.a)) return true;
    if (s.to == e.length && b.frontier(e.b)) return true;
  }
  return false;
}

namespace {

std::vector<BallPoint> locus_nodes(const TreeBall& b, const CharacteristicSet& cs) {
  std::vector<BallPoint> nodes;
  for (int v : cs.vertices) nodes.push_back(BallPoint::at_vertex(v));
  for (const auto& s : cs.segments) {
    nodes.push_back(normalize_point(b, BallPoint::on_edge(s.edge, s.from)));
    nodes.push_back(normalize_point(b, BallPoint::on_edge(s.edge, s.to)));
  }
  return nodes;
}

// distance from x to the segment [q1,q2] through the tree metric
Rational point_to_segment(const TreeBall& b, const BallPoint& x,
                          const BallPoint& q1, const BallPoint& q2) {
  Rational d1 = tree_distance(b, x, q1);
  Rational d2 = tree_distance(b, x, q2);
  Rational dq = tree_distance(b, q1, q2);
  return (d1 + d2 - dq).half();
}

}  // namespace

Rational distance_to_locus(const TreeBall& b, const CharacteristicSet& cs,
                           const BallPoint& p, bool* certified) {
  if (cs.empty()) throw Error("InternalError", "distance to an empty locus");
  std::optional<Rational> best;
  for (int v : cs.vertices) {
    Rational d = tree_distance(b, p, BallPoint::at_vertex(v));
    if (!best || d < *best) best = d;
  }
  for (const auto& s : cs.segments) {
    BallPoint q1 = normalize_point(b, BallPoint::on_edge(s.edge, s.from));
    BallPoint q2 = normalize_point(b, BallPoint::on_edge(s.edge, s.to));
    Rational d = point_to_segment(b, p, q1, q2);
    if (!best || d < *best) best = d;
  }
  if (certified) {
    // convexity along the locus: the observed minimum is global as soon as
    // some non-frontier locus point attains it
    *certified = false;
    for (int v : cs.vertices)
      if (!b.frontier(v) &&
          tree_distance(b, p, BallPoint::at_vertex(v)) == *best)
        *certified = true;
    if (!*certified)
      for (const auto& s : cs.segments) {
        BallPoint q1 = normalize_point(b, BallPoint::on_edge(s.edge, s.from));
        BallPoint q2 = normalize_point(b, BallPoint::on_edge(s.edge, s.to));
        if (point_to_segment(b, p, q1, q2) != *best) continue;
        // the nearest segment point is a frontier vertex only if it is an
        // endpoint sitting at one
        Rational d1 = tree_distance(b, p, q1);
        BallPoint hit = point_along(b, q1, q2, d1 - *best);
        if (!(hit.is_vertex() && b.frontier(hit.vertex))) *certified = true;
      }
  }
  return *best;
}

BallPoint project_to_locus(const TreeBall& b, const CharacteristicSet& cs,
                           const BallPoint& p) {
  Rational dmin = distance_to_locus(b, cs, p);
  for (int v : cs.vertices)
    if (tree_distance(b, p, BallPoint::at_vertex(v)) == dmin)
      return BallPoint::at_vertex(v);
  for (const auto& s : cs.segments) {
    BallPoint q1 = normalize_point(b, BallPoint::on_edge(s.edge, s.from));
    BallPoint q2 = normalize_point(b, BallPoint::on_edge(s.edge, s.to));
    if (point_to_segment(b, p, q1, q2) == dmin) {
      // the nearest point sits at distance (d1 - dmin) from q1 along [q1,q2]
      Rational d1 = tree_distance(b, p, q1);
      return point_along(b, q1, q2, d1 - dmin);
    }
  }
  throw Error("InternalError", "projection did not land on the locus");
}

BasepointResult basepoint(const TreeBall& b, const std::vector<Word>& S) {
  std::vector<PathWord> loops;
  for (const auto& w : S)
    loops.push_back(to_path(b.graph, w, b.graph.base_vertex()));
  return basepoint(b, loops);
}

BasepointResult basepoint(const TreeBall& b, const std::vector<PathWord>& S) {
  if (S.empty()) throw Error("EmptyS", "basepoint needs a nonempty family");
  const GraphOfGroups& g = b.graph;

  std::vector<ReducedWord> reds;
  for (const auto& s : S) reds.push_back(reduce_loop(g, s));

  // vertex values of every displacement function
  std::vector<std::vector<Rational>> f(S.size());
  for (size_t i = 0; i < S.size(); ++i) {
    f[i].resize(b.vertices.size());
    for (size_t v = 0; v < b.vertices.size(); ++v)
      f[i][v] = displacement(b, S[i], BallPoint::at_vertex(int(v)));
  }
  auto F_vertex = [&](size_t v) {
    Rational m = f[0][v];
    for (size_t i = 1; i < S.size(); ++i) m = max(m, f[i][v]);
    return m;
  };

  // per-edge exact minimum of F = max_i of affine-triple envelopes
  struct Affine {
    Rational slope, icept;
  };
  std::vector<std::vector<Affine>> edge_affines(b.edges.size());
  for (size_t e = 0; e < b.edges.size(); ++e) {
    const BallEdge& be = b.edges[e];
    for (size_t i = 0; i < S.size(); ++i) {
      EdgeValley ev =
          edge_valley(f[i][be.a], f[i][be.b], be.length, reds[i].length);
      edge_affines[e].push_back(Affine{Rational(-2), ev.fa});
      edge_affines[e].push_back(
          Affine{Rational(2), ev.fb - Rational(2) * be.length});
      edge_affines[e].push_back(Affine{Rational(0), ev.valley});
    }
  }
  auto F_on_edge = [&](size_t e, const Rational& x) {
    std::optional<Rational> m;
    for (const auto& a : edge_affines[e]) {
      Rational v = a.slope * x + a.icept;
      if (!m || v > *m) m = v;
    }
    return *m;
  };

  Rational lS = F_vertex(0);
  for (size_t v = 1; v < b.vertices.size(); ++v) lS = min(lS, F_vertex(v));
  for (size_t e = 0; e < b.edges.size(); ++e) {
    const BallEdge& be = b.edges[e];
    std::vector<Rational> candidates = {Rational(0), be.length};
    const auto& affs = edge_affines[e];
    for (size_t i = 0; i < affs.size(); ++i)
      for (size_t j = i + 1; j < affs.size(); ++j) {
        if (affs[i].slope == affs[j].slope) continue;
        Rational x =
            (affs[j].icept - affs[i].icept) / (affs[i].slope - affs[j].slope);
        if (x.sign() >= 0 && x <= be.length) candidates.push_back(x);
      }
    for (const auto& x : candidates) lS = min(lS, F_on_edge(e, x));
  }

  // locus of F == lS
  CharacteristicSet locus;
  locus.min_value = lS;
  for (size_t v = 0; v < b.vertices.size(); ++v)
    if (F_vertex(v) == lS) locus.vertices.push_back(int(v));
  for (size_t e = 0; e < b.edges.size(); ++e) {
    const BallEdge& be = b.edges[e];
    Rational lo(0), hi = be.length;
    bool empty = false;
    for (const auto& a : edge_affines[e]) {
      if (a.slope.sign() > 0) {
        hi = min(hi, (lS - a.icept) / a.slope);
      } else if (a.slope.sign() < 0) {
        lo = max(lo, (lS - a.icept) / a.slope);
      } else if (a.icept > lS) {
        empty = true;
      }
    }
    if (empty || lo > hi) continue;
    if (lo == hi && (lo.is_zero() || hi == be.length)) continue;
    if (lo.is_zero() && !locus.vertices.empty() &&
        std::find(locus.vertices.begin(), locus.vertices.end(), be.a) ==
            locus.vertices.end())
      throw Error("InternalError", "locus endpoint mismatch at a vertex");
    locus.segments.push_back(SubSegment{int(e), lo, hi});
  }

  // certification: every frontier vertex must sit strictly above lS
  for (size_t v = 0; v < b.vertices.size(); ++v)
    if (b.frontier(int(v)) && !(F_vertex(v) > lS))
      throw Error("LocusTruncated",
                  "the min-max locus touches the ball frontier; enlarge the "
                  "radius");
  if (locus.empty())
    throw Error("InternalError", "empty min-max locus in a certified ball");

  // the min-max locus must be a point or a segment; verify via pairwise
  // distances: it is a path iff every node lies between the extremal pair
  auto nodes = locus_nodes(b, locus);
  BallPoint pmin = nodes[0], pmax = nodes[0];
  Rational diam(0);
  for (const auto& x : nodes)
    for (const auto& y : nodes) {
      Rational d = tree_distance(b, x, y);
      if (d > diam) {
        diam = d;
        pmin = x;
        pmax = y;
      }
    }
  for (const auto& x : nodes) {
    Rational dx = tree_distance(b, pmin, x) + tree_distance(b, x, pmax);
    if (dx != diam)
      throw Error("InternalError",
                  "min-max locus is not a point or a segment");
  }
  if (diam.sign() > 0) {
    bool witness = false;
    for (const auto& r : reds)
      if (r.length == lS) witness = true;
    if (!witness)
      throw Error("InternalError",
                  "segment locus without a generator realizing l_T(S)");
  }

  BasepointResult res;
  res.l_S = lS;
  res.locus = locus;
  res.basepoint = diam.is_zero() ? normalize_point(b, pmin)
                                 : point_along(b, pmin, pmax, diam.half());
  res.extremes = {pmin, pmax};
  return res;
}

BasepointResult basepoint_auto(const GraphOfGroups& g, const std::vector<Word>& S,
                               Rational radius, size_t cap, TreeBall* ball_out) {
  std::vector<PathWord> paths;
  for (const auto& w : S) paths.push_back(to_path(g, w, g.base_vertex()));
  for (;;) {
    TreeBall b = build_displacement_ball(g, paths, radius, cap);
    try {
      BasepointResult r = basepoint(b, S);
      if (ball_out) *ball_out = std::move(b);
      return r;
    } catch (const Error& e) {
      if (e.code() != "LocusTruncated") throw;
      radius = b.radius * Rational(2);
    }
  }
}

CharacteristicSet intersect_loci(const TreeBall& b, const CharacteristicSet& x,
                                 const CharacteristicSet& y) {
  CharacteristicSet out;
  out.min_value = Rational(0);
  std::set<int> xv(x.vertices.begin(), x.vertices.end());
  for (int v : y.vertices)
    if (xv.count(v)) out.vertices.push_back(v);
  for (const auto& sx : x.segments)
    for (const auto& sy : y.segments) {
      if (sx.edge != sy.edge) continue;
      Rational lo = max(sx.from, sy.from);
      Rational hi = min(sx.to, sy.to);
      if (lo < hi) out.segments.push_back(SubSegment{sx.edge, lo, hi});
      else if (lo == hi) {
        BallPoint p = normalize_point(b, BallPoint::on_edge(sx.edge, lo));
        if (p.is_vertex()) out.vertices.push_back(p.vertex);
        else out.segments.push_back(SubSegment{sx.edge, lo, hi});
      }
    }
  // segment endpoints landing on vertices of the other locus
  auto absorb = [&](const CharacteristicSet& segs, const CharacteristicSet& verts) {
    std::set<int> vs(verts.vertices.begin(), verts.vertices.end());
    for (const auto& s : segs.segments) {
      const BallEdge& e = b.edges[s.edge];
      if (s.from.is_zero() && vs.count(e.a)) out.vertices.push_back(e.a);
      if (s.to == e.length && vs.count(e.b)) out.vertices.push_back(e.b);
    }
  };
  absorb(x, y);
  absorb(y, x);
  std::sort(out.vertices.begin(), out.vertices.end());
  out.vertices.erase(std::unique(out.vertices.begin(), out.vertices.end()),
                     out.vertices.end());
  out.truncated = locus_touches_frontier(b, out);
  return out;
}

IrreducibilityResult is_irreducible(const GraphOfGroups& g, int search_depth) {
  require_valid(g);
  IrreducibilityResult res;

  std::vector<Word> words = enumerate_loop_words(g, search_depth, 4000);
  std::vector<Word> hyper;
  for (const auto& w : words)
    if (reduce_word(g, w).hyperbolic) hyper.push_back(w);

  if (hyper.empty()) {
    res.kind = IrreducibilityKind::Reducible;
    res.reason = "no hyperbolic element up to depth " +
                 std::to_string(search_depth) + "; the action is elliptic";
    return res;
  }

  Rational maxlen(0);
  for (const auto& e : g.edges) maxlen = max(maxlen, e.length);
  Rational radius = Rational(2) * maxlen;
  TreeBall ball;
  for (;;) {
    try {
      ball = build_ball(g, radius, 60000);
      break;
    } catch (const Error& e) {
      if (e.code() != "BallTooLarge") throw;
      radius = radius.half();
      if (radius < maxlen.half())
        throw Error("BallTooLarge",
                    "irreducibility probe cannot fit a usable ball");
    }
  }

  size_t probe = std::min(hyper.size(), size_t(24));
  std::vector<CharacteristicSet> loci;
  for (size_t i = 0; i < probe; ++i)
    loci.push_back(characteristic_set(ball, hyper[i]));
  std::vector<Rational> lens;
  for (size_t i = 0; i < probe; ++i)
    lens.push_back(translation_length(g, hyper[i]));

  for (size_t i = 0; i < probe && res.kind == IrreducibilityKind::Unknown; ++i)
    for (size_t j = i + 1; j < probe; ++j) {
      CharacteristicSet overlap = intersect_loci(ball, loci[i], loci[j]);
      if (!overlap.empty()) {
        if (overlap.truncated) continue;
        if (locus_length(overlap) < lens[i] + lens[j]) {
          res.kind = IrreducibilityKind::Irreducible;
          res.witness_g = hyper[i];
          res.witness_h = hyper[j];
          res.reason = "axes overlap compactly";
          return res;
        }
        continue;
      }
      // disjoint inside the ball: certify through convexity of the distance
      // to the other axis restricted to this axis
      auto nodes = locus_nodes(ball, loci[i]);
      std::optional<Rational> inner_min;
      Rational frontier_min;
      bool have_frontier = false;
      for (const auto& n : nodes) {
        Rational d = distance_to_locus(ball, loci[j], n);
        bool on_frontier =
            n.is_vertex() ? ball.frontier(n.vertex) : false;
        if (on_frontier) {
          if (!have_frontier || d < frontier_min) frontier_min = d;
          have_frontier = true;
        } else if (!inner_min || d < *inner_min) {
          inner_min = d;
        }
      }
      if (inner_min && inner_min->sign() > 0 &&
          (!have_frontier || frontier_min > *inner_min)) {
        res.kind = IrreducibilityKind::Irreducible;
        res.witness_g = hyper[i];
        res.witness_h = hyper[j];
        res.reason = "axes are disjoint";
        return res;
      }
    }

  // no certificate: look for an invariant line or a common end up to depth
  bool all_equal = true;
  for (size_t i = 1; i < probe; ++i) {
    CharacteristicSet overlap = intersect_loci(ball, loci[0], loci[i]);
    if (locus_length(overlap) != locus_length(loci[0]) ||
        locus_length(overlap) != locus_length(loci[i]))
      all_equal = false;
  }
  if (all_equal) {
    res.kind = IrreducibilityKind::Reducible;
    res.reason = "all hyperbolic axes agree up to depth " +
                 std::to_string(search_depth) + "; invariant line";
    return res;
  }

  CharacteristicSet common = loci[0];
  for (size_t i = 1; i < probe && !common.empty(); ++i)
    common = intersect_loci(ball, common, loci[i]);
  if (!common.empty() && locus_touches_frontier(ball, common)) {
    res.kind = IrreducibilityKind::Reducible;
    res.reason = "all hyperbolic axes share a ray up to depth " +
                 std::to_string(search_depth) + "; fixed end";
    return res;
  }

  res.kind = IrreducibilityKind::Unknown;
  res.reason = "no certificate up to depth " + std::to_string(search_depth);
  return res;
}

}  // namespace gtd

#include "gtd/ball.hpp"

#include <algorithm>
#include <deque>

namespace gtd {

bool same_point(const BallPoint& p, const BallPoint& q) {
  if (p.is_vertex() != q.is_vertex()) return false;
  if (p.is_vertex()) return p.vertex == q.vertex;
  return p.edge == q.edge && p.offset == q.offset;
}

TreeBall build_ball(const GraphOfGroups& g, const Rational& radius, size_t cap) {
  require_valid(g);
  if (radius.sign() < 0) throw Error("BadRadius", "radius must be >= 0");
  TreeBall ball;
  ball.graph = g;
  ball.radius = radius;
  ball.cap = cap;

  PathWord base;
  base.start = g.base_vertex();
  ball.vertices.push_back(
      BallVertex{base, g.base_vertex(), Rational(0), -1, -1, false});
  ball.coset_index[coset_key(g, base)] = 0;

  std::deque<int> queue = {0};
  while (!queue.empty()) {
    int vi = queue.front();
    queue.pop_front();
    if (!(ball.vertices[vi].depth < radius)) continue;
    ball.vertices[vi].expanded = true;
    int gv = ball.vertices[vi].graph_vertex;
    PathWord rep = ball.vertices[vi].rep;

    for (size_t e = 0; e < g.edges.size(); ++e) {
      for (int dir : {1, -1}) {
        if (traversal_start(g, int(e), dir) != gv) continue;
        int64_t fan = 1;
        if (g.vertices[gv].kind == GroupKind::InfiniteCyclic) {
          if (g.edge_group_trivial(int(e)))
            throw Error("BallTooLarge",
                        "vertex '" + g.vertices[gv].id +
                            "' has infinite valence (trivial edge group at a "
                            "cyclic vertex)",
                        {{"vertex", g.vertices[gv].id}});
          const BigInt& idx = traversal_start_index(g, int(e), dir);
          BigInt a = idx.abs();
          if (!a.fits_int64() || a.to_int64() > int64_t(cap))
            throw Error("BallTooLarge", "edge index exceeds the vertex cap",
                        {{"edge", g.edges[e].id}});
          fan = a.to_int64();
        }
        for (int64_t j = 0; j < fan; ++j) {
          PathWord step = rep;
          if (j > 0) step.syls.push_back(Syl::vertex(gv, BigInt(j)));
          step.syls.push_back(Syl::edge(int(e), dir));
          PathWord canon = canonical_form(g, step);
          std::string key = coset_key(g, canon);
          auto it = ball.coset_index.find(key);
          if (it != ball.coset_index.end()) {
            if (it->second != ball.vertices[vi].parent)
              throw Error("InternalError",
                          "coset enumeration revisited a non-parent vertex");
            continue;
          }
          if (ball.vertices.size() >= cap)
            throw Error("BallTooLarge",
                        "ball exceeds the vertex cap of " + std::to_string(cap));
          // store the representative with the trailing vertex power stripped
          if (!canon.syls.empty() && !canon.syls.back().is_edge)
            canon.syls.pop_back();
          int ni = int(ball.vertices.size());
          Rational depth = ball.vertices[vi].depth + g.edges[e].length;
          ball.vertices.push_back(BallVertex{
              canon, traversal_end(g, int(e), dir), depth, vi, -1, false});
          ball.edges.push_back(
              BallEdge{vi, ni, int(e), dir, g.edges[e].length});
          ball.vertices[ni].parent_edge = int(ball.edges.size()) - 1;
          ball.coset_index[key] = ni;
          queue.push_back(ni);
        }
      }
    }
  }
  return ball;
}

TreeBall build_displacement_ball(const GraphOfGroups& g,
                                 const std::vector<PathWord>& S,
                                 Rational bound, size_t cap) {
  require_valid(g);
  if (S.empty()) throw Error("EmptyS", "displacement ball needs a family");
  auto F = [&](const PathWord& rep) {
    Rational m(0);
    for (const auto& s : S)
      m = max(m, coset_distance(g, rep, multiply(g, s, rep)));
    return m;
  };

  TreeBall ball;
  ball.graph = g;
  ball.cap = cap;

  // descend from the base to a vertex where F is locally minimal; rooting
  // the sublevel complex there keeps its collar width independent of how
  // far the base sits from the min-max locus
  PathWord root;
  root.start = g.base_vertex();
  int root_gv = g.base_vertex();
  Rational root_f = F(root);
  for (int guard = 0; guard < 100000; ++guard) {
    std::optional<std::pair<PathWord, int>> better;
    Rational best = root_f;
    for (size_t e = 0; e < g.edges.size(); ++e) {
      for (int dir : {1, -1}) {
        if (traversal_start(g, int(e), dir) != root_gv) continue;
        int64_t fan = 1;
        if (g.vertices[root_gv].kind == GroupKind::InfiniteCyclic) {
          if (g.edge_group_trivial(int(e)))
            throw Error("BallTooLarge", "infinite valence vertex");
          BigInt a = traversal_start_index(g, int(e), dir).abs();
          if (!a.fits_int64() || a.to_int64() > 1024) continue;
          fan = a.to_int64();
        }
        for (int64_t j = 0; j < fan; ++j) {
          PathWord step = root;
          if (j > 0) step.syls.push_back(Syl::vertex(root_gv, BigInt(j)));
          step.syls.push_back(Syl::edge(int(e), dir));
          PathWord canon = canonical_form(g, step);
          if (!canon.syls.empty() && !canon.syls.back().is_edge)
            canon.syls.pop_back();
          Rational fv = F(canon);
          if (fv < best) {
            best = fv;
            better = {canon, traversal_end(g, int(e), dir)};
          }
        }
      }
    }
    if (!better) break;
    root = better->first;
    root_gv = better->second;
    root_f = best;
  }

  bound = max(bound, root_f);
  ball.radius = bound;
  ball.vertices.push_back(BallVertex{root, root_gv, Rational(0), -1, -1, false});
  ball.coset_index[coset_key(g, root)] = 0;

  std::deque<int> queue = {0};
  while (!queue.empty()) {
    int vi = queue.front();
    queue.pop_front();
    if (F(ball.vertices[vi].rep) > bound) continue;
    ball.vertices[vi].expanded = true;
    int gv = ball.vertices[vi].graph_vertex;
    PathWord rep = ball.vertices[vi].rep;

    for (size_t e = 0; e < g.edges.size(); ++e) {
      for (int dir : {1, -1}) {
        if (traversal_start(g, int(e), dir) != gv) continue;
        int64_t fan = 1;
        if (g.vertices[gv].kind == GroupKind::InfiniteCyclic) {
          if (g.edge_group_trivial(int(e)))
            throw Error("BallTooLarge",
                        "vertex '" + g.vertices[gv].id +
                            "' has infinite valence",
                        {{"vertex", g.vertices[gv].id}});
          BigInt a = traversal_start_index(g, int(e), dir).abs();
          if (!a.fits_int64() || a.to_int64() > int64_t(cap))
            throw Error("BallTooLarge", "edge index exceeds the vertex cap",
                        {{"edge", g.edges[e].id}});
          fan = a.to_int64();
        }
        for (int64_t j = 0; j < fan; ++j) {
          PathWord step = rep;
          if (j > 0) step.syls.push_back(Syl::vertex(gv, BigInt(j)));
          step.syls.push_back(Syl::edge(int(e), dir));
          PathWord canon = canonical_form(g, step);
          std::string key = coset_key(g, canon);
          auto it = ball.coset_index.find(key);
          if (it != ball.coset_index.end()) {
            if (it->second != ball.vertices[vi].parent)
              throw Error("InternalError",
                          "coset enumeration revisited a non-parent vertex");
            continue;
          }
          if (ball.vertices.size() >= cap)
            throw Error("BallTooLarge",
                        "displacement ball exceeds the vertex cap of " +
                            std::to_string(cap));
          if (!canon.syls.empty() && !canon.syls.back().is_edge)
            canon.syls.pop_back();
          int ni = int(ball.vertices.size());
          Rational depth = ball.vertices[vi].depth + g.edges[e].length;
          ball.vertices.push_back(BallVertex{
              canon, traversal_end(g, int(e), dir), depth, vi, -1, false});
          ball.edges.push_back(
              BallEdge{vi, ni, int(e), dir, g.edges[e].length});
          ball.vertices[ni].parent_edge = int(ball.edges.size()) - 1;
          ball.coset_index[key] = ni;
          queue.push_back(ni);
        }
      }
    }
  }
  return ball;
}

void check_point(const TreeBall& b, const BallPoint& p) {
  if (p.is_vertex()) {
    if (p.vertex < 0 || p.vertex >= int(b.vertices.size()))
      throw Error("PointOutsideBall", "vertex index out of range");
    return;
  }
  if (p.edge < 0 || p.edge >= int(b.edges.size()))
    throw Error("PointOutsideBall", "edge index out of range");
  if (p.offset.sign() < 0 || p.offset > b.edges[p.edge].length)
    throw Error("PointOutsideBall", "offset outside the edge");
}

BallPoint normalize_point(const TreeBall& b, BallPoint p) {
  check_point(b, p);
  if (!p.is_vertex()) {
    if (p.offset.is_zero()) return BallPoint::at_vertex(b.edges[p.edge].a);
    if (p.offset == b.edges[p.edge].length)
      return BallPoint::at_vertex(b.edges[p.edge].b);
  }
  return p;
}

Rational vertex_distance(const TreeBall& b, int u, int v) {
  Rational d(0);
  int x = u, y = v;
  while (x != y) {
    // walk the deeper one up; ties broken by index to guarantee progress
    const Rational& dx = b.vertices[x].depth;
    const Rational& dy = b.vertices[y].depth;
    bool move_x = dx > dy || (dx == dy && x > y);
    int& m = move_x ? x : y;
    d += b.edges[b.vertices[m].parent_edge].length;
    m = b.vertices[m].parent;
  }
  return d;
}

Rational tree_distance(const TreeBall& b, const BallPoint& p0,
                       const BallPoint& q0) {
  BallPoint p = normalize_point(b, p0), q = normalize_point(b, q0);
  if (p.is_vertex() && q.is_vertex()) return vertex_distance(b, p.vertex, q.vertex);
  if (!p.is_vertex() && !q.is_vertex() && p.edge == q.edge)
    return (p.offset - q.offset).abs();
  auto exits = [&](const BallPoint& x) {
    std::vector<std::pair<int, Rational>> out;
    if (x.is_vertex()) {
      out.push_back({x.vertex, Rational(0)});
    } else {
      out.push_back({b.edges[x.edge].a, x.offset});
      out.push_back({b.edges[x.edge].b, b.edges[x.edge].length - x.offset});
    }
    return out;
  };
  std::optional<Rational> best;
  for (const auto& [xv, xd] : exits(p))
    for (const auto& [yv, yd] : exits(q)) {
      Rational d = xd + vertex_distance(b, xv, yv) + yd;
      if (!best || d < *best) best = d;
    }
  return *best;
}

std::vector<PathSeg> tree_path(const TreeBall& b, const BallPoint& p0,
                               const BallPoint& q0) {
  BallPoint p = normalize_point(b, p0), q = normalize_point(b, q0);
  if (same_point(p, q)) return {};
  if (!p.is_vertex() && !q.is_vertex() && p.edge == q.edge)
    return {PathSeg{p.edge, p.offset, q.offset}};

  // pick exit endpoints minimizing total distance
  auto exits = [&](const BallPoint& x) {
    std::vector<std::pair<int, Rational>> out;
    if (x.is_vertex()) {
      out.push_back({x.vertex, Rational(0)});
    } else {
      out.push_back({b.edges[x.edge].a, x.offset});
      out.push_back({b.edges[x.edge].b, b.edges[x.edge].length - x.offset});
    }
    return out;
  };
  int bx = -1, by = -1;
  std::optional<Rational> best;
  for (const auto& [xv, xd] : exits(p))
    for (const auto& [yv, yd] : exits(q)) {
      Rational d = xd + vertex_distance(b, xv, yv) + yd;
      if (!best || d < *best) {
        best = d;
        bx = xv;
        by = yv;
      }
    }

  std::vector<PathSeg> segs;
  if (!p.is_vertex()) {
    const BallEdge& e = b.edges[p.edge];
    segs.push_back(PathSeg{p.edge, p.offset,
                           bx == e.a ? Rational(0) : e.length});
  }
  // vertex-to-vertex chain bx -> by
  std::vector<int> up_x, up_y;
  int x = bx, y = by;
  while (x != y) {
    const Rational& dx = b.vertices[x].depth;
    const Rational& dy = b.vertices[y].depth;
    bool move_x = dx > dy || (dx == dy && x > y);
    if (move_x) {
      up_x.push_back(x);
      x = b.vertices[x].parent;
    } else {
      up_y.push_back(y);
      y = b.vertices[y].parent;
    }
  }
  for (int v : up_x) {
    const BallEdge& e = b.edges[b.vertices[v].parent_edge];
    segs.push_back(PathSeg{b.vertices[v].parent_edge, e.length, Rational(0)});
  }
  for (auto it = up_y.rbegin(); it != up_y.rend(); ++it) {
    const BallEdge& e = b.edges[b.vertices[*it].parent_edge];
    segs.push_back(PathSeg{b.vertices[*it].parent_edge, Rational(0), e.length});
  }
  if (!q.is_vertex()) {
    const BallEdge& e = b.edges[q.edge];
    segs.push_back(PathSeg{q.edge, by == e.a ? Rational(0) : e.length,
                           q.offset});
  }
  // drop degenerate pieces
  std::vector<PathSeg> out;
  for (auto& s : segs)
    if (s.from != s.to) out.push_back(s);
  return out;
}

BallPoint point_along(const TreeBall& b, const BallPoint& p, const BallPoint& q,
                      const Rational& dist) {
  if (dist.is_zero()) return normalize_point(b, p);
  auto segs = tree_path(b, p, q);
  Rational acc(0);
  for (const auto& s : segs) {
    Rational len = (s.to - s.from).abs();
    if (acc + len >= dist) {
      Rational rem = dist - acc;
      Rational off = s.from + (s.to > s.from ? rem : -rem);
      return normalize_point(b, BallPoint::on_edge(s.edge, off));
    }
    acc += len;
  }
  throw Error("InternalError", "point_along distance exceeds the path");
}

std::optional<int> act_vertex(const TreeBall& b, const PathWord& g, int v) {
  PathWord moved = multiply(b.graph, g, b.vertices[v].rep);
  auto it = b.coset_index.find(coset_key(b.graph, moved));
  if (it == b.coset_index.end()) return std::nullopt;
  return it->second;
}

std::optional<BallPoint> act_point(const TreeBall& b, const PathWord& g,
                                   const BallPoint& p0) {
  BallPoint p = normalize_point(b, p0);
  if (p.is_vertex()) {
    auto v = act_vertex(b, g, p.vertex);
    if (!v) return std::nullopt;
    return BallPoint::at_vertex(*v);
  }
  const BallEdge& e = b.edges[p.edge];
  auto ia = act_vertex(b, g, e.a);
  auto ib = act_vertex(b, g, e.b);
  if (!ia || !ib) return std::nullopt;
  // the image edge joins *ia and *ib; find it through parent pointers
  int child = -1;
  if (b.vertices[*ib].parent == *ia) child = *ib;
  else if (b.vertices[*ia].parent == *ib) child = *ia;
  else throw Error("InternalError", "image of an edge is not a ball edge");
  int edge = b.vertices[child].parent_edge;
  Rational off = p.offset;
  if (b.edges[edge].a != *ia) off = e.length - off;
  return BallPoint::on_edge(edge, off);
}

Rational coset_distance(const GraphOfGroups& g, const PathWord& a,
                        const PathWord& bw) {
  PathWord rel = multiply(g, inverse(g, a), bw);
  Rational d(0);
  for (const auto& s : rel.syls)
    if (s.is_edge) d += g.edges[s.index].length;
  return d;
}

Rational displacement(const TreeBall& b, const PathWord& g, const BallPoint& p0) {
  BallPoint p = normalize_point(b, p0);
  const GraphOfGroups& gg = b.graph;
  if (p.is_vertex()) {
    const PathWord& rep = b.vertices[p.vertex].rep;
    return coset_distance(gg, rep, multiply(gg, g, rep));
  }
  const BallEdge& e = b.edges[p.edge];
  const PathWord& ra = b.vertices[e.a].rep;
  const PathWord& rb = b.vertices[e.b].rep;
  PathWord ga = multiply(gg, g, ra);
  PathWord gb = multiply(gg, g, rb);
  std::string ka = coset_key(gg, ra), kb = coset_key(gg, rb);
  std::string kga = coset_key(gg, ga), kgb = coset_key(gg, gb);
  if (ka == kga && kb == kgb) return Rational(0);  // g fixes the edge

  struct Exit {
    const PathWord* rep;
    Rational d;
  };
  Exit pe[2] = {{&ra, p.offset}, {&rb, e.length - p.offset}};
  // by equivariance d(gp, g·endpoint) equals the matching offset
  Exit qe[2] = {{&ga, p.offset}, {&gb, e.length - p.offset}};
  std::optional<Rational> best;
  for (const auto& x : pe)
    for (const auto& y : qe) {
      Rational d = x.d + coset_distance(gg, *x.rep, *y.rep) + y.d;
      if (!best || d < *best) best = d;
    }
  return *best;
}

std::string ball_to_dot(const TreeBall& b) {
  std::string out = "graph ball {\n  node [shape=circle fontsize=10];\n";
  for (size_t i = 0; i < b.vertices.size(); ++i) {
    Word w = path_to_word(b.graph, b.vertices[i].rep);
    std::string label = w.empty() ? "1" : word_to_string(w);
    out += "  n" + std::to_string(i) + " [label=\"" + label + "\"";
    if (b.frontier(int(i))) out += " style=dashed";
    out += "];\n";
  }
  for (const auto& e : b.edges) {
    out += "  n" + std::to_string(e.a) + " -- n" + std::to_string(e.b) +
           " [label=\"" + b.graph.edges[e.graph_edge].id + ":" +
           e.length.to_string() + "\"];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace gtd

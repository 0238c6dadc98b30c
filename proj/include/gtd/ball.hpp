#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "gtd/word.hpp"

namespace gtd {

struct BallVertex {
  PathWord rep;      // canonical coset representative path from the base
  int graph_vertex;  // quotient vertex index
  Rational depth;    // metric distance from the base vertex
  int parent = -1;   // ball vertex index
  int parent_edge = -1;
  bool expanded = false;  // full link present
};

struct BallEdge {
  int a = 0, b = 0;    // a is the parent side
  int graph_edge = 0;  // quotient edge index
  int dir = 0;         // traversal direction used from a to b
  Rational length;
};

// A point of the ball: either a vertex or an interior point of an edge,
// with the offset measured from the parent-side endpoint.
struct BallPoint {
  int vertex = -1;
  int edge = -1;
  Rational offset;

  static BallPoint at_vertex(int v) { return BallPoint{v, -1, Rational(0)}; }
  static BallPoint on_edge(int e, Rational off) {
    return BallPoint{-1, e, std::move(off)};
  }
  bool is_vertex() const { return vertex >= 0; }
};

bool same_point(const BallPoint& p, const BallPoint& q);

// Explicit finite ball of the Bass-Serre tree around the base vertex coset.
struct TreeBall {
  GraphOfGroups graph;
  Rational radius;
  size_t cap = 100000;
  std::vector<BallVertex> vertices;
  std::vector<BallEdge> edges;
  std::unordered_map<std::string, int> coset_index;

  bool frontier(int v) const { return !vertices[v].expanded; }
};

TreeBall build_ball(const GraphOfGroups& g, const Rational& radius,
                    size_t cap = 100000);

// Sublevel complex of the displacement functional: a vertex is expanded iff
// max over S of d(v, s v) stays within the bound. The bound is raised to
// max_s d(base, s base) so the complex is nonempty; by convexity it is
// connected and every frontier vertex exceeds the bound, which certifies
// min-max computations on it. Exponentially smaller than metric balls.
TreeBall build_displacement_ball(const GraphOfGroups& g,
                                 const std::vector<PathWord>& S,
                                 Rational bound, size_t cap = 100000);

void check_point(const TreeBall& b, const BallPoint& p);
BallPoint normalize_point(const TreeBall& b, BallPoint p);

Rational vertex_distance(const TreeBall& b, int u, int v);
Rational tree_distance(const TreeBall& b, const BallPoint& p, const BallPoint& q);

// Geodesic from p to q as oriented subsegments (offsets from each edge's
// parent side; traversed from `from` to `to` which may decrease).
struct PathSeg {
  int edge;
  Rational from, to;
};
std::vector<PathSeg> tree_path(const TreeBall& b, const BallPoint& p,
                               const BallPoint& q);
BallPoint point_along(const TreeBall& b, const BallPoint& p, const BallPoint& q,
                      const Rational& dist);

// Action of a loop word (at the base) on ball vertices and points; nullopt
// when the image leaves the ball.
std::optional<int> act_vertex(const TreeBall& b, const PathWord& g, int v);
std::optional<BallPoint> act_point(const TreeBall& b, const PathWord& g,
                                   const BallPoint& p);

// Exact displacement d(x, g x), independent of whether g x lies in the ball:
// evaluated through word reduction.
Rational displacement(const TreeBall& b, const PathWord& g, const BallPoint& p);

// Edge-length sum of the reduced relative word between two cosets.
Rational coset_distance(const GraphOfGroups& g, const PathWord& a,
                        const PathWord& b);

std::string ball_to_dot(const TreeBall& b);

}  // namespace gtd

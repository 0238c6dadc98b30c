#include "gtd/topology.hpp"

#include <algorithm>
#include <set>

namespace gtd {

LengthVector length_vector(const GraphOfGroups& g,
                           const std::vector<std::string>& classes) {
  require_valid(g);
  LengthVector lv;
  for (const auto& text : classes) {
    lv.classes.push_back(text);
    lv.values.push_back(translation_length(g, marked_word(g, text)));
  }
  return lv;
}

SimplexCoords simplex_coords(const GraphOfGroups& g) {
  require_valid(g);
  if (g.edges.empty())
    throw Error("EdgeOrderMismatch", "tree without edges has no simplex point");
  SimplexCoords c;
  c.volume = g.volume();
  for (const auto& e : g.edges) {
    c.edge_order.push_back(e.id);
    c.barycentric.push_back(e.length / c.volume);
  }
  return c;
}

GraphOfGroups simplex_tree(const SimplexCoords& c, const GraphOfGroups& tmpl) {
  if (c.edge_order.size() != tmpl.edges.size())
    throw Error("EdgeOrderMismatch", "edge count differs from the template");
  Rational sum(0);
  for (const auto& b : c.barycentric) {
    if (b.sign() <= 0)
      throw Error("EdgeOrderMismatch", "barycentric entries must be positive");
    sum += b;
  }
  if (sum != Rational(1))
    throw Error("EdgeOrderMismatch", "barycentric coordinates must sum to 1");
  if (c.volume.sign() <= 0)
    throw Error("EdgeOrderMismatch", "volume must be positive");
  GraphOfGroups out = tmpl;
  for (size_t i = 0; i < c.edge_order.size(); ++i) {
    int e = out.edge_index_quiet(c.edge_order[i]);
    if (e < 0)
      throw Error("EdgeOrderMismatch",
                  "template lacks edge '" + c.edge_order[i] + "'");
    out.edges[e].length = c.barycentric[i] * c.volume;
  }
  return out;
}

namespace {

bool point_between(const TreeBall& b, const BallPoint& x, const BallPoint& u,
                   const BallPoint& y) {
  return tree_distance(b, x, u) + tree_distance(b, u, y) ==
         tree_distance(b, x, y);
}

}  // namespace

ApproximationReport check_approximation(const Approximation& a) {
  ApproximationReport rep;
  if (a.epsilon.sign() <= 0)
    return {false, "BadEpsilon", "epsilon must be positive"};

  // surjectivity onto the declared point sets (the ball vertices)
  std::set<int> left_hit, right_hit;
  for (const auto& [x, y] : a.pairs) {
    BallPoint px = normalize_point(a.left, x);
    BallPoint py = normalize_point(a.right, y);
    if (px.is_vertex()) left_hit.insert(px.vertex);
    if (py.is_vertex()) right_hit.insert(py.vertex);
  }
  if (left_hit.size() != a.left.vertices.size())
    return {false, "NotSurjective", "left vertices missed by the relation"};
  if (right_hit.size() != a.right.vertices.size())
    return {false, "NotSurjective", "right vertices missed by the relation"};

  // distortion: |d(x,x') - d(y,y')| < epsilon, strict
  for (size_t i = 0; i < a.pairs.size(); ++i)
    for (size_t j = i; j < a.pairs.size(); ++j) {
      Rational dx = tree_distance(a.left, a.pairs[i].first, a.pairs[j].first);
      Rational dy = tree_distance(a.right, a.pairs[i].second, a.pairs[j].second);
      if (!((dx - dy).abs() < a.epsilon))
        return {false, "DistortionViolation",
                "pairs " + std::to_string(i) + "," + std::to_string(j) +
                    " distort by " + (dx - dy).abs().to_string()};
    }

  // P-equivariance: x R y and gx in the left ball force gy in the right
  // ball with gx R gy
  for (size_t pi = 0; pi < a.P.size(); ++pi) {
    PathWord gl = to_path(a.left.graph, a.P[pi], a.left.graph.base_vertex());
    PathWord gr =
        to_path(a.right.graph, a.P_right[pi], a.right.graph.base_vertex());
    for (const auto& [x, y] : a.pairs) {
      auto gx = act_point(a.left, gl, x);
      if (!gx) continue;
      auto gy = act_point(a.right, gr, y);
      if (!gy)
        return {false, "EquivarianceViolation",
                "translate of a related right point leaves the ball (P index " +
                    std::to_string(pi) + ")"};
      bool found = false;
      for (const auto& [u, w] : a.pairs)
        if (same_point(normalize_point(a.left, u),
                       normalize_point(a.left, *gx)) &&
            same_point(normalize_point(a.right, w),
                       normalize_point(a.right, *gy))) {
          found = true;
          break;
        }
      if (!found)
        return {false, "EquivarianceViolation",
                "gx R gy missing for P index " + std::to_string(pi)};
    }
  }

  // fullness: sampled interior points of related segments have partners
  // within 2 epsilon
  if (a.full) {
    Rational two_eps = Rational(2) * a.epsilon;
    for (size_t i = 0; i < a.pairs.size(); ++i)
      for (size_t j = i + 1; j < a.pairs.size(); ++j) {
        const auto& [x1, y1] = a.pairs[i];
        const auto& [x2, y2] = a.pairs[j];
        Rational dy = tree_distance(a.right, y1, y2);
        if (dy.is_zero()) continue;
        for (int k = 1; k <= 3; ++k) {
          BallPoint z0 = point_along(a.right, y1, y2,
                                     dy * Rational(k, 4));
          bool ok = false;
          for (const auto& [u, w] : a.pairs) {
            if (!point_between(a.left, x1, u, x2)) continue;
            if (tree_distance(a.right, z0, w) < two_eps) {
              ok = true;
              break;
            }
          }
          if (!ok)
            return {false, "DensityViolation",
                    "segment sample without a close partner (pairs " +
                        std::to_string(i) + "," + std::to_string(j) + ")"};
        }
      }
  }
  return rep;
}

Approximation thicken(const Approximation& a, const Rational& delta) {
  if (delta.sign() < 0) throw Error("BadDelta", "delta must be >= 0");
  Approximation out = a;
  out.epsilon = a.epsilon + Rational(2) * delta;
  if (delta.is_zero()) return out;

  // candidate points: all vertices plus points already in the relation
  std::vector<BallPoint> lefts, rights;
  for (size_t v = 0; v < a.left.vertices.size(); ++v)
    lefts.push_back(BallPoint::at_vertex(int(v)));
  for (size_t v = 0; v < a.right.vertices.size(); ++v)
    rights.push_back(BallPoint::at_vertex(int(v)));
  auto add_unique = [&](std::vector<BallPoint>& vec, const TreeBall& b,
                        const BallPoint& p) {
    BallPoint n = normalize_point(b, p);
    for (const auto& q : vec)
      if (same_point(q, n)) return;
    vec.push_back(n);
  };
  for (const auto& [x, y] : a.pairs) {
    add_unique(lefts, a.left, x);
    add_unique(rights, a.right, y);
  }

  std::vector<std::pair<BallPoint, BallPoint>> pairs;
  for (const auto& x : lefts)
    for (const auto& y : rights) {
      for (const auto& [x0, y0] : a.pairs) {
        if (tree_distance(a.left, x, x0) + tree_distance(a.right, y, y0) <=
            delta) {
          pairs.push_back({x, y});
          break;
        }
      }
    }
  out.pairs = pairs;
  return out;
}

}  // namespace gtd

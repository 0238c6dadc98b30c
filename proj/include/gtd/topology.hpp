#pragma once

#include "gtd/treegeom.hpp"

namespace gtd {

struct LengthVector {
  std::vector<std::string> classes;  // word texts, resolved through markings
  std::vector<Rational> values;
};

LengthVector length_vector(const GraphOfGroups& g,
                           const std::vector<std::string>& classes);

struct SimplexCoords {
  std::vector<std::string> edge_order;
  std::vector<Rational> barycentric;  // positive, sums to exactly 1
  Rational volume;
};

SimplexCoords simplex_coords(const GraphOfGroups& g);
GraphOfGroups simplex_tree(const SimplexCoords& c, const GraphOfGroups& tmpl);

// A finite relation between points of two balls with an exact distortion
// bound and equivariance data.
struct Approximation {
  TreeBall left, right;
  std::vector<std::pair<BallPoint, BallPoint>> pairs;
  Rational epsilon;
  std::vector<Word> P;  // equivariance sample, words over the left graph;
                        // translated through markings for the right side
  std::vector<Word> P_right;
  bool full = false;
};

struct ApproximationReport {
  bool ok = true;
  std::string violation;  // NotSurjective, DistortionViolation, ...
  std::string detail;
};

ApproximationReport check_approximation(const Approximation& a);

Approximation thicken(const Approximation& a, const Rational& delta);

}  // namespace gtd

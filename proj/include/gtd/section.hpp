#pragma once

#include "gtd/folding.hpp"
#include "gtd/topology.hpp"

namespace gtd {

// The transverse section: images of a fundamental domain of the base tree
// inside a ball of the target, the pullback metric T_Y, and the induced
// morphism beta(Y): T_Y -> Y when both actions are free.
struct SectionMap {
  GraphOfGroups base, target;
  GraphOfGroups remetrized;  // T_Y: the base graph carrying pulled-back lengths
  TreeBall ball;             // target ball everything was computed in
  BasepointResult y_star;
  std::vector<BallPoint> vertex_images;  // per base vertex (primary lifts)
  bool beta_valid = false;
  Morphism beta;
};

SectionMap section_map(const GraphOfGroups& base, const GraphOfGroups& target,
                       Rational radius, size_t cap = 100000);

struct ContractionPath {
  Morphism beta;
  // steps indexed by fold time: t = 0 is T_Y (inside L(T)), t = 1 is the
  // target; the homotopy runs H_(1-t)
  std::vector<std::pair<Rational, GraphOfGroups>> steps;
  SimplexCoords terminal;  // simplex point of T_Y
};

ContractionPath contraction_path(const GraphOfGroups& base,
                                 const GraphOfGroups& target,
                                 const std::vector<Rational>& times,
                                 Rational radius = Rational(4),
                                 size_t cap = 100000);

struct StabilityReport {
  Rational perturbation;
  Rational distortion;    // of the coset-matched identity relation
  Rational displacement;  // between matched basepoints
  bool within_bound = false;  // displacement <= 4 * distortion
};

StabilityReport basepoint_stability(const GraphOfGroups& target,
                                    const Rational& perturbation,
                                    Rational radius = Rational(4),
                                    size_t cap = 100000);

QPoint ball_point_to_qpoint(const TreeBall& b, const BallPoint& p);

}  // namespace gtd

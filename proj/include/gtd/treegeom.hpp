#pragma once

#include "gtd/ball.hpp"

namespace gtd {

struct SubSegment {
  int edge;
  Rational from, to;  // offsets from the edge's parent side, from <= to
};

// Exact sublevel locus of a displacement functional over a ball.
struct CharacteristicSet {
  Rational min_value;
  std::vector<int> vertices;
  std::vector<SubSegment> segments;
  bool truncated = false;

  bool empty() const { return vertices.empty() && segments.empty(); }
};

// T_w = { x : d(x, wx) = l(w) }, computed exactly inside the ball.
CharacteristicSet characteristic_set(const TreeBall& b, const Word& w);
CharacteristicSet characteristic_set(const TreeBall& b, const PathWord& loop);

// Distance from a point to the locus; `certified` is set when the nearest
// locus point is witnessed away from the ball frontier.
Rational distance_to_locus(const TreeBall& b, const CharacteristicSet& cs,
                           const BallPoint& p, bool* certified = nullptr);

BallPoint project_to_locus(const TreeBall& b, const CharacteristicSet& cs,
                           const BallPoint& p);

struct BasepointResult {
  Rational l_S;             // min-max displacement value
  CharacteristicSet locus;  // T_S, a point or a segment
  BallPoint basepoint;      // midpoint x_*
  std::vector<BallPoint> extremes;
};

// l_T(S) = min_x max_{g in S} d(x, gx) with the exact min-max locus and its
// midpoint. Throws LocusTruncated when the locus cannot be certified inside
// the ball, EmptyS for an empty family.
BasepointResult basepoint(const TreeBall& b, const std::vector<Word>& S);
BasepointResult basepoint(const TreeBall& b, const std::vector<PathWord>& S);

// Convenience wrapper: doubles the radius until basepoint succeeds or the
// vertex cap is reached.
BasepointResult basepoint_auto(const GraphOfGroups& g, const std::vector<Word>& S,
                               Rational initial_radius, size_t cap,
                               TreeBall* ball_out = nullptr);

enum class IrreducibilityKind { Irreducible, Reducible, Unknown };

struct IrreducibilityResult {
  IrreducibilityKind kind = IrreducibilityKind::Unknown;
  std::string reason;
  Word witness_g, witness_h;  // set when Irreducible
};

IrreducibilityResult is_irreducible(const GraphOfGroups& g, int search_depth);

// Locus intersection helper shared with the irreducibility certificate.
CharacteristicSet intersect_loci(const TreeBall& b, const CharacteristicSet& x,
                                 const CharacteristicSet& y);
Rational locus_length(const CharacteristicSet& cs);
bool locus_touches_frontier(const TreeBall& b, const CharacteristicSet& cs);

}  // namespace gtd

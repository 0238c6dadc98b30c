#pragma once

#include <map>

#include "gtd/word.hpp"

namespace gtd {

// A point of a quotient graph: a vertex or an interior edge point with the
// offset measured from the edge's `from` endpoint.
struct QPoint {
  int vertex = -1;
  int edge = -1;
  Rational offset;

  static QPoint at_vertex(int v) { return QPoint{v, -1, Rational(0)}; }
  static QPoint on_edge(int e, Rational off) {
    return QPoint{-1, e, std::move(off)};
  }
  bool is_vertex() const { return vertex >= 0; }
};

// One segment of an edge path: the range edge is traversed from offset
// `from_off` to `to_off` (either order), offsets from the edge's `from` end.
struct RangeStep {
  int edge;
  Rational from_off, to_off;

  Rational length() const { return (to_off - from_off).abs(); }
};

// Equivariant 1-Lipschitz map between trees with trivial vertex stabilizers,
// presented on quotient data: every domain edge traverses its image path
// isometrically.
struct Morphism {
  GraphOfGroups domain, range;
  std::vector<QPoint> vertex_images;               // per domain vertex
  std::vector<std::vector<RangeStep>> edge_images; // per domain edge, from->to
  Rational fold_depth;                             // m(phi)
};

// Builds a morphism from full-edge image paths ("a", "c^-1", ...), inferring
// vertex images from the domain base (mapped to the range base).
Morphism make_morphism(const GraphOfGroups& domain, const GraphOfGroups& range,
                       const std::map<std::string, std::vector<std::string>>&
                           edge_images);

// Validates an assembled morphism and computes its fold depth.
void finalize_morphism(Morphism& m);

Morphism scale_morphism(const Morphism& m, const Rational& k);

struct FoldResult {
  GraphOfGroups tree;  // T_t
  Morphism phi_0t;     // domain -> T_t
  Morphism phi_t1;     // T_t -> range
};

// The canonical interpolation tree T_t: the domain folded to depth
// m(phi) * t. `reverse_order` switches the deterministic fold order so
// confluence can be tested.
FoldResult fold_at_time(const Morphism& m, const Rational& t,
                        bool reverse_order = false);

struct FoldPath {
  Morphism morphism;
  std::vector<std::pair<Rational, FoldResult>> steps;
};

FoldPath fold_path(const Morphism& m, const std::vector<Rational>& times);

// l_{T_t}(w) for each word and time.
std::vector<std::vector<Rational>> length_profile(
    const Morphism& m, const std::vector<std::string>& words,
    const std::vector<Rational>& times);

}  // namespace gtd

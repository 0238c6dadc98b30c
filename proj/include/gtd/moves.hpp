#pragma once

#include "gtd/word.hpp"

namespace gtd {

struct ExpansionSpec {
  std::string new_vertex, new_edge;
  BigInt index{1};  // subgroup index k; the new edge carries indices (k, 1)
  Rational length{1};
  // edge ends migrating to the new vertex: (edge id, true = the `from` end)
  std::vector<std::pair<std::string, bool>> migrate;
  // collapse inverses restore the killed edge verbatim through this field
  std::optional<EdgeSpec> exact_edge;
  // collapse inverses also restore the original spanning tree
  std::optional<std::vector<std::string>> restore_tree;
};

struct MoveRecord {
  std::string kind;  // "collapse" | "expansion"
  std::string element;
  Rational before_volume, after_volume;
  std::map<std::string, std::string> marking_update;  // old letter -> word
  // data to invert the move
  ExpansionSpec inverse_expansion;  // for collapses
  std::string inverse_collapse;     // for expansions
};

struct ReducedCheck {
  bool reduced = true;
  std::string witness;  // offending edge when not reduced
};

// A graph is reduced when no non-loop edge has a full edge-inclusion
// (G_e = G_u) on either side.
ReducedCheck is_reduced(const GraphOfGroups& g);

std::pair<GraphOfGroups, MoveRecord> collapse_edge(const GraphOfGroups& g,
                                                   const std::string& edge_id);

std::pair<GraphOfGroups, MoveRecord> expand_vertex(const GraphOfGroups& g,
                                                   const std::string& vertex_id,
                                                   const ExpansionSpec& spec);

// Rewrites a word over the pre-move graph to the post-move graph.
Word rewrite_through_collapse(const GraphOfGroups& before,
                              const GraphOfGroups& after,
                              const MoveRecord& rec, const Word& w);
Word rewrite_through_expansion(const GraphOfGroups& before,
                               const GraphOfGroups& after,
                               const MoveRecord& rec, const Word& w);

struct ProfileResult {
  bool agree = true;
  std::string witness;  // first base word whose classification differs
};

// Compares elliptic/hyperbolic classifications of base-group words through
// both graphs' markings.
ProfileResult same_deformation_space(const GraphOfGroups& g1,
                                     const GraphOfGroups& g2,
                                     const std::vector<std::string>& base_words);

}  // namespace gtd

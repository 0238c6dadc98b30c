#pragma once

#include <string>
#include <vector>

#include "gtd/graph.hpp"

namespace gtd {

// A word letter: either a vertex-generator power a_v^k (k != 0) or an edge
// letter e^(+-1). Edge letters follow the relation
//   t_e a_from^(index_from) t_e^-1 = a_to^(index_to),
// so reading a word as a path, the letter e with exponent +1 runs from to(e)
// to from(e) and e^-1 runs from from(e) to to(e).
struct Letter {
  bool is_edge = false;
  std::string id;
  BigInt exponent{1};
};

using Word = std::vector<Letter>;

Word parse_word(const std::string& text);
std::string word_to_string(const Word& w);
Word invert_word(const Word& w);

// Vertex generators are addressed as "a_<vertex id>".
std::string vertex_generator_name(const std::string& vertex_id);

// Index-based syllable: a vertex power or a single edge traversal.
struct Syl {
  bool is_edge = false;
  int index = 0;  // vertex index or edge index
  int dir = 1;    // traversal direction for edges
  BigInt power{0};

  static Syl vertex(int v, BigInt p) { return Syl{false, v, 1, std::move(p)}; }
  static Syl edge(int e, int dir) { return Syl{true, e, dir, BigInt(0)}; }
};

// A path in the Bass-Serre groupoid: alternating vertex powers and edge
// traversals starting at a fixed graph vertex.
struct PathWord {
  int start = 0;
  std::vector<Syl> syls;

  bool trivial() const { return syls.empty(); }
};

// Traversal endpoints and inclusion indices under the letter convention.
int traversal_start(const GraphOfGroups& g, int edge, int dir);
int traversal_end(const GraphOfGroups& g, int edge, int dir);
const BigInt& traversal_start_index(const GraphOfGroups& g, int edge, int dir);
const BigInt& traversal_end_index(const GraphOfGroups& g, int edge, int dir);

// Converts letters to an index-based path starting at `start`, checking
// positional validity. Throws UnknownGenerator / NotALoop.
PathWord to_path(const GraphOfGroups& g, const Word& w, int start);

Word path_to_word(const GraphOfGroups& g, const PathWord& p);

int path_end(const GraphOfGroups& g, const PathWord& p);

// Britton reduction (confluent); result has no pinch subwords and no zero or
// mergeable vertex powers.
PathWord britton_reduce(const GraphOfGroups& g, const PathWord& p);

// Britton reduction followed by the normal-form shift that leaves every
// vertex power entering an edge inside the canonical coset range. Two paths
// are equal in the fundamental groupoid iff their canonical forms match.
PathWord canonical_form(const GraphOfGroups& g, const PathWord& p);

std::string serialize_path(const PathWord& p);

// Canonical key for the coset p * G_(end vertex).
std::string coset_key(const GraphOfGroups& g, const PathWord& p);

PathWord multiply(const GraphOfGroups& g, const PathWord& a, const PathWord& b);
PathWord inverse(const GraphOfGroups& g, const PathWord& p);

// True iff the loop p lies in the vertex group at its basepoint.
bool in_vertex_group(const GraphOfGroups& g, const PathWord& loop);

struct ReducedWord {
  PathWord britton;  // canonical Britton-reduced loop at the original basepoint
  PathWord cyclic;   // cyclically reduced conjugate (basepoint may move)
  bool hyperbolic = false;
  Rational length{0};

  bool is_identity() const { return britton.trivial(); }
};

// Cyclic reduction of an arbitrary loop (not only at the base vertex).
ReducedWord reduce_loop(const GraphOfGroups& g, const PathWord& loop);

ReducedWord reduce_word(const GraphOfGroups& g, const Word& w);
Rational translation_length(const GraphOfGroups& g, const Word& w);

// Substitutes base-group generator names through the graph's marking.
// Tokens that are graph letters pass through when allow_raw_letters is set.
Word marked_word(const GraphOfGroups& g, const std::string& base_word_text,
                 bool allow_raw_letters = true);

// All distinct nontrivial loop words at the base vertex with at most
// max_letters letters (each vertex power counted once), deterministic order.
std::vector<Word> enumerate_loop_words(const GraphOfGroups& g, int max_letters,
                                       size_t limit = 100000);

}  // namespace gtd

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gtd/bigint.hpp"
#include "gtd/rational.hpp"

namespace gtd {

// Domain errors carry a stable code (the spec'd error name) plus context
// fields for the report emitter.
class Error : public std::runtime_error {
public:
  Error(std::string code, std::string message,
        std::map<std::string, std::string> context = {})
      : std::runtime_error(code + ": " + message),
        code_(std::move(code)),
        context_(std::move(context)) {}

  const std::string& code() const { return code_; }
  const std::map<std::string, std::string>& context() const { return context_; }

private:
  std::string code_;
  std::map<std::string, std::string> context_;
};

enum class GroupKind { Trivial, InfiniteCyclic };

struct VertexSpec {
  std::string id;
  GroupKind kind = GroupKind::Trivial;
};

struct EdgeSpec {
  std::string id;
  std::string from, to;
  BigInt index_from{1}, index_to{1};
  Rational length{1};
};

// Finite quotient data of a cocompact G-tree: metric graph, vertex groups
// (trivial or Z), edge inclusion indices, spanning tree, optional marking
// into a fixed base group. The group relation attached to an edge e is
//   t_e a_from^(index_from) t_e^-1 = a_to^(index_to),
// with t_e killed when e lies in the spanning tree.
struct GraphOfGroups {
  std::vector<VertexSpec> vertices;
  std::vector<EdgeSpec> edges;
  std::vector<std::string> spanning_tree;
  // base-group generator name -> word over this graph's letters
  std::optional<std::map<std::string, std::string>> marking;

  int vertex_index(const std::string& id) const;
  int edge_index(const std::string& id) const;
  bool has_vertex(const std::string& id) const { return vertex_index_quiet(id) >= 0; }
  bool has_edge(const std::string& id) const { return edge_index_quiet(id) >= 0; }
  int vertex_index_quiet(const std::string& id) const;
  int edge_index_quiet(const std::string& id) const;

  int base_vertex() const { return 0; }
  size_t vertex_count() const { return vertices.size(); }
  size_t edge_count() const { return edges.size(); }

  bool in_spanning_tree(const std::string& edge_id) const;
  bool edge_group_trivial(int e) const;
  bool all_vertices_trivial() const;
  Rational volume() const;

  GraphOfGroups scaled(const Rational& k) const;
};

struct ValidationIssue {
  std::string code;     // ZeroIndex, Disconnected, BadSpanningTree, ...
  std::string element;  // offending vertex/edge id
  std::string detail;
};

std::vector<ValidationIssue> validate_graph(const GraphOfGroups& g);

// Throws Error with the first issue's code if validation fails.
void require_valid(const GraphOfGroups& g);

// Convenience builders used throughout the tests and tools.
GraphOfGroups make_bs(int64_t m, int64_t n, const Rational& len = Rational(1));
GraphOfGroups make_rose(const std::vector<Rational>& lengths);

}  // namespace gtd

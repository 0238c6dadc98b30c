#include "gtd/graph.hpp"

#include <algorithm>
#include <set>

namespace gtd {

int GraphOfGroups::vertex_index_quiet(const std::string& id) const {
  for (size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i].id == id) return int(i);
  return -1;
}

int GraphOfGroups::edge_index_quiet(const std::string& id) const {
  for (size_t i = 0; i < edges.size(); ++i)
    if (edges[i].id == id) return int(i);
  return -1;
}

int GraphOfGroups::vertex_index(const std::string& id) const {
  int i = vertex_index_quiet(id);
  if (i < 0) throw Error("UnknownVertex", "no vertex '" + id + "'", {{"vertex", id}});
  return i;
}

int GraphOfGroups::edge_index(const std::string& id) const {
  int i = edge_index_quiet(id);
  if (i < 0) throw Error("UnknownEdge", "no edge '" + id + "'", {{"edge", id}});
  return i;
}

bool GraphOfGroups::in_spanning_tree(const std::string& edge_id) const {
  return std::find(spanning_tree.begin(), spanning_tree.end(), edge_id) !=
         spanning_tree.end();
}

bool GraphOfGroups::edge_group_trivial(int e) const {
  const EdgeSpec& es = edges[e];
  return vertices[vertex_index(es.from)].kind == GroupKind::Trivial ||
         vertices[vertex_index(es.to)].kind == GroupKind::Trivial;
}

bool GraphOfGroups::all_vertices_trivial() const {
  for (const auto& v : vertices)
    if (v.kind != GroupKind::Trivial) return false;
  return true;
}

Rational GraphOfGroups::volume() const {
  Rational v(0);
  for (const auto& e : edges) v += e.length;
  return v;
}

GraphOfGroups GraphOfGroups::scaled(const Rational& k) const {
  GraphOfGroups g = *this;
  for (auto& e : g.edges) e.length = e.length * k;
  return g;
}

std::vector<ValidationIssue> validate_graph(const GraphOfGroups& g) {
  std::vector<ValidationIssue> issues;
  std::set<std::string> vertex_ids, edge_ids;

  for (const auto& v : g.vertices) {
    if (!vertex_ids.insert(v.id).second)
      issues.push_back({"DuplicateId", v.id, "duplicate vertex id"});
  }
  if (g.vertices.empty()) {
    issues.push_back({"Disconnected", "", "graph has no vertices"});
    return issues;
  }

  for (const auto& e : g.edges) {
    if (!edge_ids.insert(e.id).second)
      issues.push_back({"DuplicateId", e.id, "duplicate edge id"});
    if (vertex_ids.count(e.id))
      issues.push_back({"DuplicateId", e.id, "edge id collides with vertex id"});
    if (e.id.rfind("a_", 0) == 0 && vertex_ids.count(e.id.substr(2)))
      issues.push_back(
          {"DuplicateId", e.id, "edge id collides with a vertex generator name"});
    if (!vertex_ids.count(e.from) || !vertex_ids.count(e.to)) {
      issues.push_back({"UnknownVertex", e.id, "edge endpoint does not exist"});
      continue;
    }
    if (e.index_from.is_zero())
      issues.push_back({"ZeroIndex", e.id, "index_from is 0"});
    if (e.index_to.is_zero())
      issues.push_back({"ZeroIndex", e.id, "index_to is 0"});
    if (e.length.sign() <= 0)
      issues.push_back({"NonpositiveLength", e.id, "edge length must be > 0"});
    bool has_trivial_end =
        g.vertices[g.vertex_index_quiet(e.from)].kind == GroupKind::Trivial ||
        g.vertices[g.vertex_index_quiet(e.to)].kind == GroupKind::Trivial;
    if (has_trivial_end &&
        (e.index_from.abs() != BigInt(1) || e.index_to.abs() != BigInt(1)))
      issues.push_back({"TrivialVertexWithIndex", e.id,
                        "edge at a trivial vertex must carry indices 1"});
  }

  // connectivity over well-formed edges
  {
    std::vector<int> comp(g.vertices.size(), -1);
    std::vector<int> stack = {0};
    comp[0] = 0;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (const auto& e : g.edges) {
        int a = g.vertex_index_quiet(e.from), b = g.vertex_index_quiet(e.to);
        if (a < 0 || b < 0) continue;
        int other = -1;
        if (a == v) other = b;
        else if (b == v) other = a;
        if (other >= 0 && comp[other] < 0) {
          comp[other] = 0;
          stack.push_back(other);
        }
      }
    }
    for (size_t i = 0; i < g.vertices.size(); ++i)
      if (comp[i] < 0)
        issues.push_back({"Disconnected", g.vertices[i].id,
                          "vertex not reachable from base"});
  }

  // spanning tree: correct edge ids, no cycles, spans all vertices
  {
    bool ok = true;
    std::set<std::string> seen;
    for (const auto& id : g.spanning_tree) {
      if (!edge_ids.count(id) || !seen.insert(id).second) {
        issues.push_back({"BadSpanningTree", id, "not a distinct edge id"});
        ok = false;
      }
    }
    if (ok) {
      if (g.spanning_tree.size() != g.vertices.size() - 1) {
        issues.push_back({"BadSpanningTree", "",
                          "spanning tree must have |V|-1 edges"});
      } else {
        // union-find acyclicity + spanning check
        std::vector<int> parent(g.vertices.size());
        for (size_t i = 0; i < parent.size(); ++i) parent[i] = int(i);
        auto find = [&](int x) {
          while (parent[x] != x) x = parent[x] = parent[parent[x]];
          return x;
        };
        for (const auto& id : g.spanning_tree) {
          const EdgeSpec& e = g.edges[g.edge_index_quiet(id)];
          int a = g.vertex_index_quiet(e.from), b = g.vertex_index_quiet(e.to);
          if (a < 0 || b < 0) continue;
          int ra = find(a), rb = find(b);
          if (ra == rb) {
            issues.push_back({"BadSpanningTree", id, "spanning tree has a cycle"});
            break;
          }
          parent[ra] = rb;
        }
      }
    }
  }

  if (g.marking) {
    for (const auto& [gen, word] : *g.marking) {
      if (gen.empty())
        issues.push_back({"BadMarking", gen, "empty generator name"});
      if (word.empty())
        issues.push_back({"BadMarking", gen, "empty marking word"});
    }
  }

  return issues;
}

void require_valid(const GraphOfGroups& g) {
  auto issues = validate_graph(g);
  if (!issues.empty())
    throw Error(issues[0].code, issues[0].detail, {{"element", issues[0].element}});
}

GraphOfGroups make_bs(int64_t m, int64_t n, const Rational& len) {
  GraphOfGroups g;
  g.vertices = {{"v", GroupKind::InfiniteCyclic}};
  g.edges = {{"t", "v", "v", BigInt(m), BigInt(n), len}};
  g.spanning_tree = {};
  g.marking = std::map<std::string, std::string>{{"a", "a_v"}, {"t", "t"}};
  return g;
}

GraphOfGroups make_rose(const std::vector<Rational>& lengths) {
  GraphOfGroups g;
  g.vertices = {{"v", GroupKind::Trivial}};
  std::map<std::string, std::string> marking;
  for (size_t i = 0; i < lengths.size(); ++i) {
    std::string id = i < 3 ? std::string(1, char('x' + i)) : "x" + std::to_string(i);
    g.edges.push_back({id, "v", "v", BigInt(1), BigInt(1), lengths[i]});
    marking[id] = id;
  }
  g.spanning_tree = {};
  g.marking = marking;
  return g;
}

}  // namespace gtd

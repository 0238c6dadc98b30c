#include "gtd/moves.hpp"

#include <algorithm>
#include <set>

namespace gtd {

namespace {

// G_e = G_side: trivial side always (trivial edge group), cyclic side only
// with a cyclic partner and inclusion index +-1.
bool full_inclusion(const GraphOfGroups& g, const EdgeSpec& e, bool from_side) {
  const VertexSpec& side =
      g.vertices[g.vertex_index(from_side ? e.from : e.to)];
  const VertexSpec& other =
      g.vertices[g.vertex_index(from_side ? e.to : e.from)];
  if (side.kind == GroupKind::Trivial) return true;
  if (other.kind != GroupKind::InfiniteCyclic) return false;
  const BigInt& idx = from_side ? e.index_from : e.index_to;
  return idx.abs() == BigInt(1);
}

std::vector<std::string> tree_path_edges(const GraphOfGroups& g,
                                         const std::string& from,
                                         const std::string& to) {
  // BFS over spanning-tree edges
  std::vector<int> prev_edge(g.vertices.size(), -1);
  std::vector<int> prev_vertex(g.vertices.size(), -1);
  std::vector<bool> seen(g.vertices.size(), false);
  std::vector<int> queue = {g.vertex_index(from)};
  seen[queue[0]] = true;
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    int v = queue[qi];
    for (size_t e = 0; e < g.edges.size(); ++e) {
      if (!g.in_spanning_tree(g.edges[e].id)) continue;
      int a = g.vertex_index(g.edges[e].from), b = g.vertex_index(g.edges[e].to);
      int other = a == v ? b : (b == v ? a : -1);
      if (other >= 0 && !seen[other]) {
        seen[other] = true;
        prev_edge[other] = int(e);
        prev_vertex[other] = v;
        queue.push_back(other);
      }
    }
  }
  std::vector<std::string> path;
  int cur = g.vertex_index(to);
  while (prev_edge[cur] >= 0) {
    path.push_back(g.edges[prev_edge[cur]].id);
    cur = prev_vertex[cur];
  }
  return path;
}

}  // namespace

ReducedCheck is_reduced(const GraphOfGroups& g) {
  require_valid(g);
  for (const auto& e : g.edges) {
    if (e.from == e.to) continue;
    if (full_inclusion(g, e, true) || full_inclusion(g, e, false))
      return ReducedCheck{false, e.id};
  }
  return ReducedCheck{true, ""};
}

std::pair<GraphOfGroups, MoveRecord> collapse_edge(const GraphOfGroups& g,
                                                   const std::string& edge_id) {
  require_valid(g);
  int ei = g.edge_index(edge_id);
  const EdgeSpec e = g.edges[ei];
  if (e.from == e.to)
    throw Error("LoopCollapse", "cannot collapse the loop '" + edge_id + "'",
                {{"edge", edge_id}});
  bool absorb_to;
  if (full_inclusion(g, e, false)) absorb_to = true;
  else if (full_inclusion(g, e, true)) absorb_to = false;
  else
    throw Error("EdgeGroupNotFull",
                "neither endpoint of '" + edge_id + "' carries a full inclusion",
                {{"edge", edge_id}});
  if (g.edges.size() == 1)
    throw Error("LastEdgeOfMinimalAction",
                "collapsing the last edge would leave a point",
                {{"edge", edge_id}});

  const std::string s = absorb_to ? e.to : e.from;    // absorbed
  const std::string d = absorb_to ? e.from : e.to;    // survives
  int si = g.vertex_index(s), di = g.vertex_index(d);
  bool s_cyclic = g.vertices[si].kind == GroupKind::InfiniteCyclic;
  bool d_cyclic = g.vertices[di].kind == GroupKind::InfiniteCyclic;

  // multiplier through the killed edge: a_s = a_d^(sigma * n)
  BigInt sigma = absorb_to ? (e.index_to.sign() > 0 ? 1 : -1)
                           : (e.index_from.sign() > 0 ? 1 : -1);
  BigInt n = absorb_to ? e.index_from : e.index_to;
  BigInt multiplier = sigma * n;

  if (!s_cyclic && d_cyclic) {
    for (const auto& x : g.edges) {
      if (x.id == e.id) continue;
      bool at_s = x.from == s || x.to == s;
      if (!at_s) continue;
      std::string far = x.from == s ? x.to : x.from;
      if (far == s) far = d;  // loop at s lands on d
      if (g.vertices[g.vertex_index(far)].kind == GroupKind::InfiniteCyclic)
        throw Error("UnrepresentableResult",
                    "collapse would create a trivial edge group between two "
                    "cyclic vertices",
                    {{"edge", x.id}});
    }
  }

  GraphOfGroups out;
  for (const auto& v : g.vertices)
    if (v.id != s) out.vertices.push_back(v);
  if (g.vertices[g.base_vertex()].id == s) {
    // keep the base at the surviving vertex
    auto it = std::find_if(out.vertices.begin(), out.vertices.end(),
                           [&](const VertexSpec& v) { return v.id == d; });
    std::rotate(out.vertices.begin(), it, it + 1);
  }

  for (const auto& x : g.edges) {
    if (x.id == e.id) continue;
    EdgeSpec nx = x;
    bool edge_group_z =
        g.vertices[g.vertex_index(x.from)].kind == GroupKind::InfiniteCyclic &&
        g.vertices[g.vertex_index(x.to)].kind == GroupKind::InfiniteCyclic;
    if (x.from == s) {
      nx.from = d;
      if (edge_group_z) nx.index_from = x.index_from * multiplier;
    }
    if (x.to == s) {
      nx.to = d;
      if (edge_group_z) nx.index_to = x.index_to * multiplier;
    }
    out.edges.push_back(nx);
  }

  // spanning tree of the merged graph
  std::vector<std::string> tree;
  if (g.in_spanning_tree(e.id)) {
    for (const auto& id : g.spanning_tree)
      if (id != e.id) tree.push_back(id);
  } else {
    auto cycle = tree_path_edges(g, e.from, e.to);
    std::string drop = *std::min_element(cycle.begin(), cycle.end());
    for (const auto& id : g.spanning_tree)
      if (id != drop) tree.push_back(id);
  }
  out.spanning_tree = tree;

  MoveRecord rec;
  rec.kind = "collapse";
  rec.element = e.id;
  rec.before_volume = g.volume();
  rec.after_volume = out.volume();
  if (s_cyclic) {
    std::string target = vertex_generator_name(d);
    if (multiplier != BigInt(1)) target += "^" + multiplier.to_string();
    rec.marking_update[vertex_generator_name(s)] = target;
  }
  rec.marking_update[e.id] = "";

  rec.inverse_expansion.new_vertex = s;
  rec.inverse_expansion.new_edge = e.id;
  rec.inverse_expansion.index = multiplier;
  rec.inverse_expansion.length = e.length;
  EdgeSpec exact = e;
  rec.inverse_expansion.exact_edge = exact;
  rec.inverse_expansion.restore_tree = g.spanning_tree;
  for (const auto& x : g.edges) {
    if (x.id == e.id) continue;
    if (x.from == s) rec.inverse_expansion.migrate.push_back({x.id, true});
    if (x.to == s) rec.inverse_expansion.migrate.push_back({x.id, false});
  }

  if (g.marking) {
    std::map<std::string, std::string> m;
    for (const auto& [gen, word] : *g.marking) {
      Word w = parse_word(word);
      m[gen] = word_to_string(rewrite_through_collapse(g, out, rec, w));
    }
    out.marking = m;
  }

  require_valid(out);
  return {out, rec};
}

Word rewrite_through_collapse(const GraphOfGroups& before,
                              const GraphOfGroups& /*after*/,
                              const MoveRecord& rec, const Word& w) {
  int ei = before.edge_index(rec.element);
  const EdgeSpec& e = before.edges[ei];
  // mirror of collapse_edge's side priority
  bool absorb_to = full_inclusion(before, e, false);
  const std::string s = absorb_to ? e.to : e.from;
  const std::string d = absorb_to ? e.from : e.to;
  BigInt multiplier = rec.inverse_expansion.index;

  std::string a_s = vertex_generator_name(s);
  Word out;
  for (const auto& l : w) {
    if (l.id == rec.element) continue;  // the killed edge letter
    if (!l.is_edge && l.id == a_s) {
      out.push_back(Letter{false, vertex_generator_name(d),
                           l.exponent * multiplier});
      continue;
    }
    out.push_back(l);
  }
  return out;
}

std::pair<GraphOfGroups, MoveRecord> expand_vertex(const GraphOfGroups& g,
                                                   const std::string& vertex_id,
                                                   const ExpansionSpec& spec) {
  require_valid(g);
  int vi = g.vertex_index(vertex_id);  // throws UnknownVertex
  const VertexSpec& v = g.vertices[vi];
  if (g.has_vertex(spec.new_vertex) || g.has_edge(spec.new_edge) ||
      spec.new_vertex.empty() || spec.new_edge.empty())
    throw Error("DuplicateId", "new vertex/edge ids must be fresh and nonempty");
  if (spec.index.is_zero())
    throw Error("ZeroIndex", "expansion subgroup index must be nonzero");
  if (v.kind == GroupKind::Trivial && spec.index.abs() != BigInt(1))
    throw Error("DivisibilityFailure",
                "a trivial vertex admits only index-1 expansions");
  if (spec.length.sign() <= 0)
    throw Error("NonpositiveLength", "expansion edge length must be positive");

  GraphOfGroups out = g;
  out.vertices.push_back(VertexSpec{spec.new_vertex, v.kind});

  std::set<std::pair<std::string, bool>> migrating(spec.migrate.begin(),
                                                   spec.migrate.end());
  for (const auto& [eid, from_side] : migrating) {
    int xi = g.edge_index_quiet(eid);
    if (xi < 0)
      throw Error("UnknownEdge", "migrating edge '" + eid + "' does not exist");
    const EdgeSpec& x = g.edges[xi];
    if ((from_side ? x.from : x.to) != vertex_id)
      throw Error("BadExpansionSpec",
                  "edge end '" + eid + "' is not attached at '" + vertex_id + "'");
  }

  for (size_t i = 0; i < out.edges.size(); ++i) {
    const EdgeSpec& x0 = g.edges[i];
    EdgeSpec& x = out.edges[i];
    bool mig_from = migrating.count({x0.id, true}) > 0;
    bool mig_to = migrating.count({x0.id, false}) > 0;
    if (!mig_from && !mig_to) continue;
    bool z_group =
        g.vertices[g.vertex_index(x0.from)].kind == GroupKind::InfiniteCyclic &&
        g.vertices[g.vertex_index(x0.to)].kind == GroupKind::InfiniteCyclic;
    if (mig_from) {
      x.from = spec.new_vertex;
      if (z_group) {
        if (!x0.index_from.divisible_by(spec.index))
          throw Error("DivisibilityFailure",
                      "index of '" + x0.id +
                          "' is not divisible by the expansion index",
                      {{"edge", x0.id}});
        x.index_from = x0.index_from / spec.index;
      }
    }
    if (mig_to) {
      x.to = spec.new_vertex;
      if (z_group) {
        if (!x0.index_to.divisible_by(spec.index))
          throw Error("DivisibilityFailure",
                      "index of '" + x0.id +
                          "' is not divisible by the expansion index",
                      {{"edge", x0.id}});
        x.index_to = x0.index_to / spec.index;
      }
    }
  }

  EdgeSpec ne;
  if (spec.exact_edge) {
    ne = *spec.exact_edge;
    ne.id = spec.new_edge;
    bool joins = (ne.from == vertex_id && ne.to == spec.new_vertex) ||
                 (ne.from == spec.new_vertex && ne.to == vertex_id);
    if (!joins)
      throw Error("BadExpansionSpec",
                  "exact edge must join the expanded and the new vertex");
  } else {
    ne.id = spec.new_edge;
    ne.from = vertex_id;
    ne.to = spec.new_vertex;
    ne.index_from = spec.index;
    ne.index_to = BigInt(1);
    ne.length = spec.length;
  }
  out.edges.push_back(ne);
  if (spec.restore_tree) out.spanning_tree = *spec.restore_tree;
  else out.spanning_tree.push_back(spec.new_edge);

  MoveRecord rec;
  rec.kind = "expansion";
  rec.element = vertex_id;
  rec.before_volume = g.volume();
  rec.after_volume = out.volume();
  rec.inverse_collapse = spec.new_edge;
  rec.inverse_expansion = spec;

  if (g.marking) {
    std::map<std::string, std::string> m;
    for (const auto& [gen, word] : *g.marking) {
      Word w = parse_word(word);
      m[gen] = word_to_string(rewrite_through_expansion(g, out, rec, w));
    }
    out.marking = m;
  }

  require_valid(out);
  return {out, rec};
}

Word rewrite_through_expansion(const GraphOfGroups& before,
                               const GraphOfGroups& after,
                               const MoveRecord& rec, const Word& w) {
  // letters survive; insert traversals of the new edge wherever the path
  // jumps between the expanded vertex and the new vertex
  int nv = after.vertex_index(rec.inverse_expansion.new_vertex);
  int ov = after.vertex_index(rec.element);
  int ne = after.edge_index(rec.inverse_expansion.new_edge);
  (void)before;

  int plus_start = traversal_start(after, ne, 1);

  auto connector = [&](int from, int to) -> Letter {
    // traversal of the new edge from `from` to `to`
    int dir = plus_start == from ? 1 : -1;
    if (traversal_start(after, ne, dir) != from ||
        traversal_end(after, ne, dir) != to)
      throw Error("InternalError", "expansion connector mismatch");
    return Letter{true, after.edges[ne].id, BigInt(dir)};
  };

  Word out;
  int pos = after.base_vertex();
  auto step_to = [&](int target) {
    if (pos == target) return;
    if ((pos == nv && target == ov) || (pos == ov && target == nv)) {
      out.push_back(connector(pos, target));
      pos = target;
      return;
    }
    throw Error("InternalError", "expansion rewrite lost its position");
  };

  for (const auto& l : w) {
    if (!l.is_edge && l.id.rfind("a_", 0) == 0 &&
        after.vertex_index_quiet(l.id.substr(2)) >= 0) {
      int v = after.vertex_index(l.id.substr(2));
      step_to(v);
      out.push_back(l);
      continue;
    }
    int e = after.edge_index_quiet(l.id);
    if (e < 0) {
      out.push_back(l);  // unknown to the new graph; leave untouched
      continue;
    }
    BigInt n = l.exponent.abs();
    int dir = l.exponent.sign() > 0 ? 1 : -1;
    for (int64_t i = 0; i < n.to_int64(); ++i) {
      step_to(traversal_start(after, e, dir));
      out.push_back(Letter{true, l.id, BigInt(dir)});
      pos = traversal_end(after, e, dir);
    }
  }
  step_to(after.base_vertex());
  return out;
}

ProfileResult same_deformation_space(const GraphOfGroups& g1,
                                     const GraphOfGroups& g2,
                                     const std::vector<std::string>& base_words) {
  if (!g1.marking || !g2.marking)
    throw Error("MissingMarking", "both graphs need markings to compare");
  for (const auto& text : base_words) {
    Word w1, w2;
    try {
      w1 = marked_word(g1, text, false);
      w2 = marked_word(g2, text, false);
    } catch (const Error& e) {
      if (e.code() == "UnknownGenerator")
        throw Error("MissingMarking", e.what());
      throw;
    }
    bool h1 = reduce_word(g1, w1).hyperbolic;
    bool h2 = reduce_word(g2, w2).hyperbolic;
    if (h1 != h2) return ProfileResult{false, text};
  }
  return ProfileResult{true, ""};
}

}  // namespace gtd

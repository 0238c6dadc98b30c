#include "gtd/json_io.hpp"

#include <fstream>

namespace gtd {

Json rational_json(const Rational& r) { return Json(r.to_string()); }

Rational rational_from_json(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<int64_t>());
  if (j.is_string()) return Rational::from_string(j.get<std::string>());
  throw Error("ParseError", "expected a rational as \"p/q\" or an integer");
}

static BigInt bigint_from_json(const Json& j) {
  if (j.is_number_integer()) return BigInt(j.get<int64_t>());
  if (j.is_string()) return BigInt::from_string(j.get<std::string>());
  throw Error("ParseError", "expected an integer");
}

static Json bigint_json(const BigInt& v) {
  if (v.fits_int64()) return Json(v.to_int64());
  return Json(v.to_string());
}

Json graph_to_json(const GraphOfGroups& g) {
  Json j;
  j["vertices"] = Json::array();
  for (const auto& v : g.vertices)
    j["vertices"].push_back(
        {{"id", v.id},
         {"group", v.kind == GroupKind::InfiniteCyclic ? "Z" : "1"}});
  j["edges"] = Json::array();
  for (const auto& e : g.edges)
    j["edges"].push_back({{"id", e.id},
                          {"from", e.from},
                          {"to", e.to},
                          {"index_from", bigint_json(e.index_from)},
                          {"index_to", bigint_json(e.index_to)},
                          {"length", rational_json(e.length)}});
  j["spanning_tree"] = g.spanning_tree;
  if (g.marking) {
    Json m = Json::object();
    for (const auto& [gen, word] : *g.marking) m[gen] = word;
    j["marking"] = m;
  }
  return j;
}

GraphOfGroups graph_from_json(const Json& j) {
  GraphOfGroups g;
  if (!j.contains("vertices") || !j.contains("edges"))
    throw Error("ParseError", "tree file needs 'vertices' and 'edges'");
  for (const auto& v : j["vertices"]) {
    std::string kind = v.value("group", "1");
    if (kind != "Z" && kind != "1")
      throw Error("ParseError", "vertex group must be \"Z\" or \"1\"");
    g.vertices.push_back(VertexSpec{
        v.at("id").get<std::string>(),
        kind == "Z" ? GroupKind::InfiniteCyclic : GroupKind::Trivial});
  }
  for (const auto& e : j["edges"]) {
    EdgeSpec es;
    es.id = e.at("id").get<std::string>();
    es.from = e.at("from").get<std::string>();
    es.to = e.at("to").get<std::string>();
    es.index_from = bigint_from_json(e.value("index_from", Json(1)));
    es.index_to = bigint_from_json(e.value("index_to", Json(1)));
    es.length = rational_from_json(e.value("length", Json("1")));
    g.edges.push_back(es);
  }
  if (j.contains("spanning_tree"))
    for (const auto& id : j["spanning_tree"])
      g.spanning_tree.push_back(id.get<std::string>());
  if (j.contains("marking")) {
    std::map<std::string, std::string> m;
    for (const auto& [gen, word] : j["marking"].items())
      m[gen] = word.get<std::string>();
    g.marking = m;
  }
  return g;
}

GraphOfGroups load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("ParseError", "cannot open '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error("ParseError", "bad JSON in '" + path + "': " + e.what());
  }
  return graph_from_json(j);
}

void save_graph(const std::string& path, const GraphOfGroups& g) {
  std::ofstream out(path);
  if (!out) throw Error("ParseError", "cannot write '" + path + "'");
  out << graph_to_json(g).dump(2) << "\n";
}

std::string graph_to_dot(const GraphOfGroups& g) {
  std::string out = "graph tree {\n  node [shape=circle fontsize=10];\n";
  for (const auto& v : g.vertices)
    out += "  \"" + v.id + "\" [label=\"" + v.id +
           (v.kind == GroupKind::InfiniteCyclic ? ":Z" : "") + "\"];\n";
  for (const auto& e : g.edges) {
    out += "  \"" + e.from + "\" -- \"" + e.to + "\" [label=\"" + e.id + " (" +
           e.index_from.to_string() + "," + e.index_to.to_string() + ") " +
           e.length.to_string() + "\"];\n";
  }
  out += "}\n";
  return out;
}

Json move_record_to_json(const MoveRecord& rec) {
  Json j;
  j["kind"] = rec.kind;
  j["element"] = rec.element;
  j["before_volume"] = rational_json(rec.before_volume);
  j["after_volume"] = rational_json(rec.after_volume);
  Json mu = Json::object();
  for (const auto& [k, v] : rec.marking_update) mu[k] = v;
  j["marking_update"] = mu;
  if (rec.kind == "collapse") {
    Json inv;
    inv["vertex"] = rec.inverse_expansion.exact_edge
                        ? (rec.inverse_expansion.exact_edge->from ==
                                   rec.inverse_expansion.new_vertex
                               ? rec.inverse_expansion.exact_edge->to
                               : rec.inverse_expansion.exact_edge->from)
                        : "";
    inv["new_vertex"] = rec.inverse_expansion.new_vertex;
    inv["new_edge"] = rec.inverse_expansion.new_edge;
    inv["index"] = bigint_json(rec.inverse_expansion.index);
    inv["length"] = rational_json(rec.inverse_expansion.length);
    Json mig = Json::array();
    for (const auto& [eid, from_side] : rec.inverse_expansion.migrate)
      mig.push_back({{"edge", eid}, {"end", from_side ? "from" : "to"}});
    inv["migrate"] = mig;
    if (rec.inverse_expansion.exact_edge) {
      const EdgeSpec& e = *rec.inverse_expansion.exact_edge;
      inv["exact_edge"] = {{"id", e.id},
                           {"from", e.from},
                           {"to", e.to},
                           {"index_from", bigint_json(e.index_from)},
                           {"index_to", bigint_json(e.index_to)},
                           {"length", rational_json(e.length)}};
    }
    if (rec.inverse_expansion.restore_tree)
      inv["restore_tree"] = *rec.inverse_expansion.restore_tree;
    j["inverse_expansion"] = inv;
  } else {
    j["inverse_collapse"] = rec.inverse_collapse;
  }
  return j;
}

ExpansionSpec expansion_spec_from_json(const Json& j) {
  ExpansionSpec spec;
  spec.new_vertex = j.at("new_vertex").get<std::string>();
  spec.new_edge = j.at("new_edge").get<std::string>();
  if (j.contains("index")) spec.index = bigint_from_json(j["index"]);
  if (j.contains("length")) spec.length = rational_from_json(j["length"]);
  if (j.contains("migrate"))
    for (const auto& m : j["migrate"])
      spec.migrate.push_back({m.at("edge").get<std::string>(),
                              m.at("end").get<std::string>() == "from"});
  if (j.contains("exact_edge")) {
    const Json& e = j["exact_edge"];
    EdgeSpec es;
    es.id = e.at("id").get<std::string>();
    es.from = e.at("from").get<std::string>();
    es.to = e.at("to").get<std::string>();
    es.index_from = bigint_from_json(e.at("index_from"));
    es.index_to = bigint_from_json(e.at("index_to"));
    es.length = rational_from_json(e.at("length"));
    spec.exact_edge = es;
  }
  if (j.contains("restore_tree")) {
    std::vector<std::string> tree;
    for (const auto& id : j["restore_tree"]) tree.push_back(id.get<std::string>());
    spec.restore_tree = tree;
  }
  return spec;
}

Json point_to_json(const TreeBall& b, const BallPoint& p0) {
  BallPoint p = normalize_point(b, p0);
  Json j;
  if (p.is_vertex()) {
    j["vertex"] = p.vertex;
    Word w = path_to_word(b.graph, b.vertices[p.vertex].rep);
    j["word"] = w.empty() ? "1" : word_to_string(w);
  } else {
    j["edge"] = p.edge;
    j["offset"] = rational_json(p.offset);
  }
  return j;
}

BallPoint point_from_json(const TreeBall& b, const Json& j) {
  BallPoint p;
  if (j.contains("vertex")) {
    p = BallPoint::at_vertex(j["vertex"].get<int>());
  } else if (j.contains("edge")) {
    p = BallPoint::on_edge(j["edge"].get<int>(),
                           rational_from_json(j.at("offset")));
  } else {
    throw Error("ParseError", "point needs 'vertex' or 'edge'+'offset'");
  }
  check_point(b, p);
  return p;
}

RelationDoc load_relation(const std::string& path, size_t cap) {
  std::ifstream in(path);
  if (!in) throw Error("ParseError", "cannot open '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error("ParseError", "bad JSON in '" + path + "': " + e.what());
  }
  RelationDoc doc;
  doc.left_tree_path = j.at("left").at("tree").get<std::string>();
  doc.right_tree_path = j.at("right").at("tree").get<std::string>();
  doc.left_radius = rational_from_json(j.at("left").at("radius"));
  doc.right_radius = rational_from_json(j.at("right").at("radius"));
  GraphOfGroups lg = load_graph(doc.left_tree_path);
  GraphOfGroups rg = load_graph(doc.right_tree_path);
  doc.approx.left = build_ball(lg, doc.left_radius, cap);
  doc.approx.right = build_ball(rg, doc.right_radius, cap);
  doc.approx.epsilon = rational_from_json(j.at("epsilon"));
  doc.approx.full = j.value("full", false);
  if (j.contains("P"))
    for (const auto& w : j["P"]) {
      doc.P_texts.push_back(w.get<std::string>());
      doc.approx.P.push_back(marked_word(lg, w.get<std::string>()));
      doc.approx.P_right.push_back(marked_word(rg, w.get<std::string>()));
    }
  for (const auto& pr : j.at("pairs"))
    doc.approx.pairs.push_back({point_from_json(doc.approx.left, pr.at(0)),
                                point_from_json(doc.approx.right, pr.at(1))});
  return doc;
}

Json relation_to_json(const RelationDoc& doc) {
  Json j;
  j["left"] = {{"tree", doc.left_tree_path},
               {"radius", rational_json(doc.left_radius)}};
  j["right"] = {{"tree", doc.right_tree_path},
                {"radius", rational_json(doc.right_radius)}};
  j["epsilon"] = rational_json(doc.approx.epsilon);
  j["P"] = doc.P_texts;
  j["full"] = doc.approx.full;
  Json pairs = Json::array();
  for (const auto& [x, y] : doc.approx.pairs) {
    Json px = point_to_json(doc.approx.left, x);
    px.erase("word");
    Json py = point_to_json(doc.approx.right, y);
    py.erase("word");
    pairs.push_back(Json::array({px, py}));
  }
  j["pairs"] = pairs;
  return j;
}

MorphismDoc load_morphism(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("ParseError", "cannot open '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error("ParseError", "bad JSON in '" + path + "': " + e.what());
  }
  MorphismDoc doc;
  doc.domain_path = j.at("domain").get<std::string>();
  doc.range_path = j.at("range").get<std::string>();
  GraphOfGroups dom = load_graph(doc.domain_path);
  GraphOfGroups ran = load_graph(doc.range_path);
  std::map<std::string, std::vector<std::string>> images;
  for (const auto& [eid, path_json] : j.at("edge_images").items()) {
    std::vector<std::string> toks;
    for (const auto& t : path_json) toks.push_back(t.get<std::string>());
    images[eid] = toks;
  }
  doc.morphism = make_morphism(dom, ran, images);
  return doc;
}

Json error_to_json(const Error& e) {
  Json j;
  j["error"] = e.code();
  for (const auto& [k, v] : e.context()) j[k] = v;
  j["message"] = e.what();
  return j;
}

}  // namespace gtd

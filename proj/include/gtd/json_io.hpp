#pragma once

#include "json.hpp"

#include "gtd/moves.hpp"
#include "gtd/section.hpp"

namespace gtd {

using Json = nlohmann::ordered_json;

Json graph_to_json(const GraphOfGroups& g);
GraphOfGroups graph_from_json(const Json& j);
GraphOfGroups load_graph(const std::string& path);
void save_graph(const std::string& path, const GraphOfGroups& g);

std::string graph_to_dot(const GraphOfGroups& g);

Json rational_json(const Rational& r);
Rational rational_from_json(const Json& j);

Json move_record_to_json(const MoveRecord& rec);
ExpansionSpec expansion_spec_from_json(const Json& j);

Json point_to_json(const TreeBall& b, const BallPoint& p);
BallPoint point_from_json(const TreeBall& b, const Json& j);

struct RelationDoc {
  std::string left_tree_path, right_tree_path;
  Rational left_radius, right_radius;
  Approximation approx;
  std::vector<std::string> P_texts;
};

RelationDoc load_relation(const std::string& path, size_t cap);
Json relation_to_json(const RelationDoc& doc);

struct MorphismDoc {
  std::string domain_path, range_path;
  Morphism morphism;
};

MorphismDoc load_morphism(const std::string& path);

Json error_to_json(const Error& e);

}  // namespace gtd

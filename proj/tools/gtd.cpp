// gtd: exact computation in deformation spaces of cocompact G-trees.
// Subcommands cover validation, translation lengths, Bass-Serre balls,
// min-max basepoints, collapse/expansion moves, fold paths, epsilon-
// approximation checks, simplex coordinates, sections and contraction paths.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "gtd/json_io.hpp"

using namespace gtd;

namespace {

size_t default_cap() {
  if (const char* env = std::getenv("GTD_CAP")) {
    long v = std::atol(env);
    if (v > 0) return size_t(v);
  }
  return 100000;
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : csv) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<Rational> parse_times(const std::string& csv) {
  std::vector<Rational> out;
  for (const auto& s : split_list(csv)) out.push_back(Rational::from_string(s));
  return out;
}

void emit(const Json& j) { std::cout << j.dump() << "\n"; }

// canonical word sample for reports: generators, pairs and twisted pairs
std::vector<std::string> sample_words(const GraphOfGroups& g) {
  std::vector<std::string> gens;
  if (g.marking)
    for (const auto& [gen, text] : *g.marking) gens.push_back(gen);
  std::vector<std::string> out = gens;
  for (size_t i = 0; i < gens.size(); ++i)
    for (size_t j = i + 1; j < gens.size(); ++j) {
      out.push_back(gens[i] + " " + gens[j]);
      out.push_back(gens[i] + " " + gens[j] + "^-1");
    }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact computation in deformation spaces of cocompact G-trees"};
  app.require_subcommand(1);
  app.fallthrough();
  size_t cap = default_cap();
  app.add_option("--cap", cap, "ball vertex cap");

  std::string tree_path, tree2_path, word_text, edge_id, vertex_id, spec_path;
  std::string out_path, radius_text = "2", S_text, dot_path, times_text;
  std::string base_path, target_path, morphism_path, profile_path, csv_path;
  std::string delta_text, emit_what = "report";

  auto* validate = app.add_subcommand("validate", "check graph invariants");
  validate->add_option("tree", tree_path)->required();

  auto* length = app.add_subcommand("length", "translation length of a word");
  length->add_option("tree", tree_path)->required();
  length->add_option("word", word_text)->required();

  auto* ball = app.add_subcommand("ball", "build a Bass-Serre tree ball");
  ball->add_option("tree", tree_path)->required();
  ball->add_option("-r,--radius", radius_text);
  ball->add_option("--emit-dot", dot_path);

  auto* bp = app.add_subcommand("basepoint", "min-max locus and midpoint");
  bp->add_option("tree", tree_path)->required();
  bp->add_option("-S", S_text, "comma separated generating words")->required();
  bp->add_option("-r,--radius", radius_text);

  auto* collapse = app.add_subcommand("collapse", "collapse an edge");
  collapse->add_option("tree", tree_path)->required();
  collapse->add_option("-e,--edge", edge_id)->required();
  collapse->add_option("-o,--out", out_path);

  auto* expand = app.add_subcommand("expand", "expand a vertex");
  expand->add_option("tree", tree_path)->required();
  expand->add_option("-v,--vertex", vertex_id)->required();
  expand->add_option("--spec", spec_path)->required();
  expand->add_option("-o,--out", out_path);

  auto* reduced = app.add_subcommand("reduced", "test reducedness");
  reduced->add_option("tree", tree_path)->required();

  auto* profile = app.add_subcommand("profile-compare",
                                     "compare elliptic profiles of two trees");
  profile->add_option("tree1", tree_path)->required();
  profile->add_option("tree2", tree2_path)->required();
  profile->add_option("-S", S_text, "comma separated base words")->required();

  auto* fold = app.add_subcommand("fold", "evaluate the canonical fold path");
  fold->add_option("morphism", morphism_path)->required();
  fold->add_option("-t,--time", times_text);
  fold->add_option("--emit", emit_what, "report | tree");
  fold->add_option("--profile", profile_path, "file of words, one per line");
  fold->add_option("--times", times_text);
  fold->add_option("-o,--out", out_path);

  auto* approx = app.add_subcommand("approx", "epsilon-approximation tools");
  approx->require_subcommand(1);
  auto* approx_check = approx->add_subcommand("check", "verify a relation");
  approx_check->add_option("relation", spec_path)->required();
  auto* approx_thicken = approx->add_subcommand("thicken", "L1 thickening");
  approx_thicken->add_option("relation", spec_path)->required();
  approx_thicken->add_option("-d,--delta", delta_text)->required();
  approx_thicken->add_option("-o,--out", out_path);

  auto* simplex = app.add_subcommand("simplex", "simplex coordinates");
  simplex->add_option("tree", tree_path)->required();

  auto* section = app.add_subcommand("section", "transverse section T_Y -> Y");
  section->add_option("--base", base_path)->required();
  section->add_option("--target", target_path)->required();
  section->add_option("-r,--radius", radius_text);

  auto* contract = app.add_subcommand("contract", "sampled contraction path");
  int simplex_steps = 0;
  contract->add_option("--base", base_path)->required();
  contract->add_option("--target", target_path)->required();
  contract->add_option("--times", times_text)->required();
  contract->add_option("--emit-csv", csv_path);
  contract->add_option("--emit-dot", dot_path);
  contract->add_option("-r,--radius", radius_text);
  contract->add_option("--simplex-steps", simplex_steps,
                       "straight-line samples from T_Y to the base simplex");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      GraphOfGroups g = load_graph(tree_path);
      auto issues = validate_graph(g);
      if (issues.empty()) {
        emit(Json{{"ok", true}});
        return 0;
      }
      Json j;
      j["error"] = issues[0].code;
      if (!issues[0].element.empty()) {
        bool is_edge = g.edge_index_quiet(issues[0].element) >= 0;
        j[is_edge ? "edge" : "vertex"] = issues[0].element;
      }
      if (issues.size() > 1) {
        Json list = Json::array();
        for (const auto& is : issues)
          list.push_back({{"error", is.code},
                          {"element", is.element},
                          {"detail", is.detail}});
        j["issues"] = list;
      }
      std::cout << j.dump() << "\n";
      return 1;
    }

    if (*length) {
      GraphOfGroups g = load_graph(tree_path);
      require_valid(g);
      ReducedWord rw = reduce_word(g, marked_word(g, word_text));
      emit(Json{{"classification", rw.hyperbolic ? "hyperbolic" : "elliptic"},
                {"length", rational_json(rw.length)}});
      return 0;
    }

    if (*ball) {
      GraphOfGroups g = load_graph(tree_path);
      TreeBall b = build_ball(g, Rational::from_string(radius_text), cap);
      int frontier = 0;
      for (size_t v = 0; v < b.vertices.size(); ++v)
        if (b.frontier(int(v))) ++frontier;
      if (!dot_path.empty()) {
        std::ofstream out(dot_path);
        out << ball_to_dot(b);
      }
      emit(Json{{"vertices", b.vertices.size()},
                {"edges", b.edges.size()},
                {"radius", rational_json(b.radius)},
                {"frontier", frontier}});
      return 0;
    }

    if (*bp) {
      GraphOfGroups g = load_graph(tree_path);
      std::vector<Word> S;
      for (const auto& s : split_list(S_text)) S.push_back(marked_word(g, s));
      TreeBall b;
      BasepointResult r =
          basepoint_auto(g, S, Rational::from_string(radius_text), cap, &b);
      Rational locus_len = locus_length(r.locus);
      Json lverts = Json::array(), lsegs = Json::array();
      for (int v : r.locus.vertices)
        lverts.push_back(point_to_json(b, BallPoint::at_vertex(v)));
      for (const auto& s : r.locus.segments)
        lsegs.push_back({{"edge", s.edge},
                         {"from", rational_json(s.from)},
                         {"to", rational_json(s.to)}});
      emit(Json{{"l_S", rational_json(r.l_S)},
                {"locus",
                 {{"shape", locus_len.is_zero() ? "point" : "segment"},
                  {"length", rational_json(locus_len)},
                  {"vertices", lverts},
                  {"segments", lsegs}}},
                {"basepoint", point_to_json(b, r.basepoint)},
                {"radius", rational_json(b.radius)}});
      return 0;
    }

    if (*collapse) {
      GraphOfGroups g = load_graph(tree_path);
      auto [after, rec] = collapse_edge(g, edge_id);
      if (!out_path.empty()) save_graph(out_path, after);
      Json j = move_record_to_json(rec);
      if (out_path.empty()) j["tree"] = graph_to_json(after);
      emit(j);
      return 0;
    }

    if (*expand) {
      GraphOfGroups g = load_graph(tree_path);
      std::ifstream sin(spec_path);
      if (!sin) throw Error("ParseError", "cannot open '" + spec_path + "'");
      Json sj;
      sin >> sj;
      auto [after, rec] = expand_vertex(g, vertex_id, expansion_spec_from_json(sj));
      if (!out_path.empty()) save_graph(out_path, after);
      Json j = move_record_to_json(rec);
      if (out_path.empty()) j["tree"] = graph_to_json(after);
      emit(j);
      return 0;
    }

    if (*reduced) {
      GraphOfGroups g = load_graph(tree_path);
      ReducedCheck rc = is_reduced(g);
      Json j{{"reduced", rc.reduced}};
      if (!rc.reduced) j["witness"] = rc.witness;
      emit(j);
      return 0;
    }

    if (*profile) {
      GraphOfGroups g1 = load_graph(tree_path);
      GraphOfGroups g2 = load_graph(tree2_path);
      ProfileResult pr = same_deformation_space(g1, g2, split_list(S_text));
      Json j{{"agree", pr.agree}};
      if (!pr.agree) j["witness"] = pr.witness;
      emit(j);
      return 0;
    }

    if (*fold) {
      MorphismDoc doc = load_morphism(morphism_path);
      if (!profile_path.empty()) {
        std::ifstream in(profile_path);
        if (!in) throw Error("ParseError", "cannot open '" + profile_path + "'");
        std::vector<std::string> words;
        std::string line;
        while (std::getline(in, line))
          if (!line.empty()) words.push_back(line);
        auto times = parse_times(times_text);
        auto rows = length_profile(doc.morphism, words, times);
        Json jt = Json::array(), jr = Json::array();
        for (const auto& t : times) jt.push_back(rational_json(t));
        for (size_t w = 0; w < words.size(); ++w) {
          Json row = Json::array();
          for (const auto& v : rows[w]) row.push_back(rational_json(v));
          jr.push_back({{"word", words[w]}, {"lengths", row}});
        }
        emit(Json{{"fold_depth", rational_json(doc.morphism.fold_depth)},
                  {"times", jt},
                  {"profile", jr}});
        return 0;
      }
      Rational t = times_text.empty() ? Rational(1)
                                      : Rational::from_string(times_text);
      FoldResult fr = fold_at_time(doc.morphism, t);
      if (emit_what == "tree") {
        if (!out_path.empty()) save_graph(out_path, fr.tree);
        else emit(graph_to_json(fr.tree));
        return 0;
      }
      emit(Json{{"t", rational_json(t)},
                {"fold_depth", rational_json(doc.morphism.fold_depth)},
                {"volume", rational_json(fr.tree.volume())},
                {"vertices", fr.tree.vertices.size()},
                {"edges", fr.tree.edges.size()}});
      return 0;
    }

    if (*approx_check) {
      RelationDoc doc = load_relation(spec_path, cap);
      ApproximationReport rep = check_approximation(doc.approx);
      Json j{{"ok", rep.ok}};
      if (!rep.ok) {
        j["error"] = rep.violation;
        j["detail"] = rep.detail;
        std::cout << j.dump() << "\n";
        return 1;
      }
      emit(j);
      return 0;
    }

    if (*approx_thicken) {
      RelationDoc doc = load_relation(spec_path, cap);
      RelationDoc out = doc;
      out.approx = thicken(doc.approx, Rational::from_string(delta_text));
      Json j = relation_to_json(out);
      if (!out_path.empty()) {
        std::ofstream o(out_path);
        o << j.dump(2) << "\n";
        emit(Json{{"ok", true},
                  {"epsilon", rational_json(out.approx.epsilon)},
                  {"pairs", out.approx.pairs.size()}});
      } else {
        emit(j);
      }
      return 0;
    }

    if (*simplex) {
      GraphOfGroups g = load_graph(tree_path);
      SimplexCoords c = simplex_coords(g);
      Json bary = Json::array();
      for (const auto& b : c.barycentric) bary.push_back(rational_json(b));
      emit(Json{{"barycentric", bary}, {"volume", rational_json(c.volume)}});
      return 0;
    }

    if (*section) {
      GraphOfGroups base = load_graph(base_path);
      GraphOfGroups target = load_graph(target_path);
      SectionMap sm =
          section_map(base, target, Rational::from_string(radius_text), cap);
      Json lens = Json::object();
      for (const auto& e : sm.remetrized.edges)
        lens[e.id] = rational_json(e.length);
      Json j{{"l_S", rational_json(sm.y_star.l_S)},
             {"basepoint", point_to_json(sm.ball, sm.y_star.basepoint)},
             {"T_Y_lengths", lens},
             {"T_Y_volume", rational_json(sm.remetrized.volume())}};
      if (sm.beta_valid)
        j["fold_depth"] = rational_json(sm.beta.fold_depth);
      emit(j);
      return 0;
    }

    if (*contract) {
      GraphOfGroups base = load_graph(base_path);
      GraphOfGroups target = load_graph(target_path);
      auto times = parse_times(times_text);
      ContractionPath cp = contraction_path(
          base, target, times, Rational::from_string(radius_text), cap);
      auto words = sample_words(base);
      if (!csv_path.empty()) {
        std::ofstream csv(csv_path);
        csv << "t,volume";
        for (const auto& w : words) csv << "," << '"' << w << '"';
        csv << "\n";
        for (const auto& [t, tree] : cp.steps) {
          csv << t.to_string() << "," << tree.volume().to_string();
          for (const auto& w : words)
            csv << ","
                << translation_length(tree, marked_word(tree, w, false))
                       .to_string();
          csv << "\n";
        }
      }
      if (!dot_path.empty()) {
        std::filesystem::create_directories(dot_path);
        int k = 0;
        for (const auto& [t, tree] : cp.steps) {
          std::ofstream dot(dot_path + "/step_" + std::to_string(k++) + ".dot");
          dot << graph_to_dot(tree);
        }
      }
      Json steps = Json::array();
      for (const auto& [t, tree] : cp.steps)
        steps.push_back({{"t", rational_json(t)},
                         {"volume", rational_json(tree.volume())},
                         {"edges", tree.edges.size()}});
      Json bary = Json::array();
      for (const auto& b : cp.terminal.barycentric)
        bary.push_back(rational_json(b));
      Json out_json{{"fold_depth", rational_json(cp.beta.fold_depth)},
                    {"steps", steps},
                    {"terminal_simplex",
                     {{"barycentric", bary},
                      {"volume", rational_json(cp.terminal.volume)}}}};
      if (simplex_steps > 0) {
        // straight-line samples in simplex x volume coordinates from T_Y
        // toward the base point of its simplex
        SimplexCoords from = cp.terminal;
        SimplexCoords to = simplex_coords(base);
        Json samples = Json::array();
        for (int k = 0; k <= simplex_steps; ++k) {
          Rational s(k, simplex_steps);
          Json row = Json::array();
          for (size_t i = 0; i < from.barycentric.size(); ++i)
            row.push_back(rational_json(from.barycentric[i] * (Rational(1) - s) +
                                        to.barycentric[i] * s));
          samples.push_back(
              {{"s", rational_json(s)},
               {"barycentric", row},
               {"volume", rational_json(from.volume * (Rational(1) - s) +
                                        to.volume * s)}});
        }
        out_json["simplex_path"] = samples;
      }
      emit(out_json);
      return 0;
    }
  } catch (const Error& e) {
    std::cout << error_to_json(e).dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cout << Json{{"error", "InternalError"}, {"message", e.what()}}.dump()
              << "\n";
    return 1;
  }
  return 2;
}

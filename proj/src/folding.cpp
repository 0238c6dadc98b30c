#include "gtd/folding.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace gtd {

namespace {

QPoint range_point(const GraphOfGroups& g, int edge, const Rational& off) {
  if (off.is_zero()) return QPoint::at_vertex(g.vertex_index(g.edges[edge].from));
  if (off == g.edges[edge].length)
    return QPoint::at_vertex(g.vertex_index(g.edges[edge].to));
  return QPoint::on_edge(edge, off);
}

bool same_qpoint(const QPoint& a, const QPoint& b) {
  if (a.is_vertex() != b.is_vertex()) return false;
  if (a.is_vertex()) return a.vertex == b.vertex;
  return a.edge == b.edge && a.offset == b.offset;
}

// ---------------------------------------------------------------------------
// simplicial normalization: subdivide range and domain so that every domain
// edge maps isometrically onto exactly one range edge

struct RgEdge {
  int from, to;
  Rational len;
  int orig;        // original range edge
  Rational a, b;   // covered interval of the original edge, a < b
};

struct DgEdge {
  int from, to;
  int rg;   // image range edge
  int dir;  // +1: from->to tracks the rg edge from->to
  int orig; // original domain edge
};

struct Norm {
  std::vector<RgEdge> redges;
  std::vector<QPoint> rvert_orig;  // rg vertex -> original range point
  std::vector<DgEdge> dedges;
  std::vector<int> dv_image;       // dg vertex -> rg vertex
  std::vector<std::vector<int>> chains;  // original domain edge -> dg edges
  int dvert_count = 0;
  int dbase = 0;
};

Norm normalize(const Morphism& m) {
  const GraphOfGroups& dom = m.domain;
  const GraphOfGroups& ran = m.range;
  Norm n;

  // cut offsets per original range edge
  std::vector<std::set<Rational, bool (*)(const Rational&, const Rational&)>>
      cuts;
  auto less = [](const Rational& x, const Rational& y) { return x < y; };
  for (size_t e = 0; e < ran.edges.size(); ++e)
    cuts.emplace_back(less);
  auto add_cut = [&](int e, const Rational& off) {
    if (off.sign() > 0 && off < ran.edges[e].length) cuts[e].insert(off);
  };
  for (const auto& vi : m.vertex_images)
    if (!vi.is_vertex()) add_cut(vi.edge, vi.offset);
  for (const auto& path : m.edge_images)
    for (const auto& s : path) {
      add_cut(s.edge, s.from_off);
      add_cut(s.edge, s.to_off);
    }

  // range vertices first, cut vertices after
  for (size_t v = 0; v < ran.vertices.size(); ++v)
    n.rvert_orig.push_back(QPoint::at_vertex(int(v)));
  std::vector<std::vector<std::pair<Rational, int>>> cut_vertex(
      ran.edges.size());
  for (size_t e = 0; e < ran.edges.size(); ++e)
    for (const auto& off : cuts[e]) {
      cut_vertex[e].push_back({off, int(n.rvert_orig.size())});
      n.rvert_orig.push_back(QPoint::on_edge(int(e), off));
    }
  auto rvert_at = [&](int e, const Rational& off) -> int {
    if (off.is_zero()) return ran.vertex_index(ran.edges[e].from);
    if (off == ran.edges[e].length) return ran.vertex_index(ran.edges[e].to);
    for (const auto& [o, v] : cut_vertex[e])
      if (o == off) return v;
    throw Error("InternalError", "range offset is not a subdivision point");
  };

  // rg edges per original range edge, in offset order
  std::vector<std::vector<int>> pieces(ran.edges.size());
  for (size_t e = 0; e < ran.edges.size(); ++e) {
    std::vector<Rational> offs = {Rational(0)};
    for (const auto& [o, v] : cut_vertex[e]) offs.push_back(o);
    offs.push_back(ran.edges[e].length);
    for (size_t k = 0; k + 1 < offs.size(); ++k) {
      pieces[e].push_back(int(n.redges.size()));
      n.redges.push_back(RgEdge{rvert_at(int(e), offs[k]),
                                rvert_at(int(e), offs[k + 1]),
                                offs[k + 1] - offs[k], int(e), offs[k],
                                offs[k + 1]});
    }
  }

  // refined image tokens of one step
  auto step_tokens = [&](const RangeStep& s) {
    std::vector<std::pair<int, int>> toks;  // (rg edge, dir)
    bool fwd = s.to_off > s.from_off;
    Rational lo = fwd ? s.from_off : s.to_off;
    Rational hi = fwd ? s.to_off : s.from_off;
    std::vector<int> covered;
    for (int p : pieces[s.edge])
      if (n.redges[p].a >= lo && n.redges[p].b <= hi) covered.push_back(p);
    if (!fwd) std::reverse(covered.begin(), covered.end());
    for (int p : covered) toks.push_back({p, fwd ? 1 : -1});
    return toks;
  };

  // domain vertices keep their ids; subdivision vertices appended
  n.dvert_count = int(dom.vertices.size());
  n.dv_image.resize(dom.vertices.size());
  for (size_t v = 0; v < dom.vertices.size(); ++v) {
    const QPoint& img = m.vertex_images[v];
    n.dv_image[v] = img.is_vertex() ? img.vertex : rvert_at(img.edge, img.offset);
  }
  n.dbase = dom.base_vertex();

  n.chains.resize(dom.edges.size());
  for (size_t e = 0; e < dom.edges.size(); ++e) {
    std::vector<std::pair<int, int>> toks;
    for (const auto& s : m.edge_images[e]) {
      auto st = step_tokens(s);
      toks.insert(toks.end(), st.begin(), st.end());
    }
    if (toks.empty())
      throw Error("InternalError", "empty edge image after refinement");
    int prev = dom.vertex_index(dom.edges[e].from);
    for (size_t k = 0; k < toks.size(); ++k) {
      int head_rg = toks[k].second > 0 ? n.redges[toks[k].first].to
                                       : n.redges[toks[k].first].from;
      int next;
      if (k + 1 == toks.size()) {
        next = dom.vertex_index(dom.edges[e].to);
        if (n.dv_image[next] != head_rg)
          throw Error("InternalError", "edge image does not reach the image "
                                       "of the far endpoint");
      } else {
        next = n.dvert_count++;
        n.dv_image.push_back(head_rg);
      }
      n.chains[e].push_back(int(n.dedges.size()));
      n.dedges.push_back(
          DgEdge{prev, next, toks[k].first, toks[k].second, int(e)});
      prev = next;
    }
  }
  return n;
}

// ---------------------------------------------------------------------------
// fold depth m(phi): longest common image prefix over pairs of rays

struct OrientedD {
  int edge;
  int fwd;  // +1: traversed from->to
  bool operator<(const OrientedD& o) const {
    return edge != o.edge ? edge < o.edge : fwd < o.fwd;
  }
  bool operator==(const OrientedD& o) const {
    return edge == o.edge && fwd == o.fwd;
  }
};

Rational fold_depth_normalized(const Norm& n) {
  auto head = [&](const OrientedD& o) {
    return o.fwd > 0 ? n.dedges[o.edge].to : n.dedges[o.edge].from;
  };
  auto germ = [&](const OrientedD& o) -> std::pair<int, int> {
    const DgEdge& d = n.dedges[o.edge];
    return {d.rg, o.fwd > 0 ? d.dir : -d.dir};
  };
  std::vector<std::vector<OrientedD>> out_edges(n.dvert_count);
  for (size_t e = 0; e < n.dedges.size(); ++e) {
    out_edges[n.dedges[e].from].push_back(OrientedD{int(e), 1});
    out_edges[n.dedges[e].to].push_back(OrientedD{int(e), -1});
  }

  std::map<std::pair<OrientedD, OrientedD>, Rational> memo;
  std::set<std::pair<OrientedD, OrientedD>> onstack;

  auto walk = [&](auto&& self, OrientedD x, OrientedD y) -> Rational {
    auto key = std::minmax(x, y);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    if (onstack.count(key))
      throw Error("MarkingIncompatible",
                  "fold depth is infinite; the map is not a morphism between "
                  "trees of one deformation space");
    onstack.insert(key);
    Rational best = n.redges[n.dedges[x.edge].rg].len;
    Rational extend(0);
    int hx = head(x), hy = head(y);
    OrientedD rx{x.edge, -x.fwd}, ry{y.edge, -y.fwd};
    for (const auto& cx : out_edges[hx]) {
      if (cx == rx) continue;
      for (const auto& cy : out_edges[hy]) {
        // cx == cy is legitimate: the two rays are distinct lifts and may
        // keep tracking the same quotient edge
        if (cy == ry) continue;
        if (germ(cx) != germ(cy)) continue;
        extend = max(extend, self(self, cx, cy));
      }
    }
    onstack.erase(key);
    Rational total = best + extend;
    memo[key] = total;
    return total;
  };

  Rational m(0);
  for (int v = 0; v < n.dvert_count; ++v) {
    const auto& ends = out_edges[v];
    for (size_t i = 0; i < ends.size(); ++i)
      for (size_t j = i + 1; j < ends.size(); ++j)
        if (germ(ends[i]) == germ(ends[j]))
          m = max(m, walk(walk, ends[i], ends[j]));
  }
  return m;
}

// ---------------------------------------------------------------------------
// the fold engine

using Token = std::pair<int, int>;  // (rg edge, dir)

// Fold state. Members of a T_t vertex class are vertices of the universal
// cover of the (progressively subdivided) domain; they are coordinated by
// reduced edge-path words from the class's first member. Since the domain
// actions are free, free reduction computes exact geodesics between members,
// which keeps the fold budgets exact.
struct Fold {
  std::vector<RgEdge> redges;
  std::vector<QPoint> rvert_orig;

  // D-edge: an edge of the subdivided domain quotient carrying its image
  // token; signed ids +-(d+1) orient it geometrically from->to
  struct DEdge {
    int rg;
    int dir;
    int fold_edge;  // current fold class of this domain edge
  };

  struct FV {
    int rg_vertex = 0;
    std::vector<std::vector<int>> members;  // reduced paths from member 0
    bool alive = true;
  };
  struct FE {
    int a, b;
    int a_member, b_member;
    int drep;  // D-edge whose +orientation runs a->b
    int rg;
    int dir;  // +1: a->b tracks the rg edge from->to
    bool alive = true;
  };

  std::vector<DEdge> dedges;
  std::vector<FV> verts;
  std::vector<FE> edges;
  std::vector<std::vector<std::pair<int, int>>> chains;  // (fe, geom dir)
  int base_fv = 0;
  Rational mt;

  static int inv_tok(int t) { return -t; }

  Token rg_token(int signed_d) const {
    const DEdge& d = dedges[std::abs(signed_d) - 1];
    int dir = signed_d > 0 ? d.dir : -d.dir;
    return {d.rg, dir};
  }

  static void reduce_append(std::vector<int>& word, int tok) {
    if (!word.empty() && word.back() == -tok) word.pop_back();
    else word.push_back(tok);
  }
  static std::vector<int> reduce_concat(const std::vector<int>& a,
                                        const std::vector<int>& b) {
    std::vector<int> out = a;
    for (int t : b) reduce_append(out, t);
    return out;
  }
  static std::vector<int> inv_word(const std::vector<int>& a) {
    std::vector<int> out;
    for (auto it = a.rbegin(); it != a.rend(); ++it) out.push_back(-*it);
    return out;
  }

  // domain geodesic between two members of one class
  std::vector<int> member_path(const FV& v, int mi, int mj) const {
    if (mi == mj) return {};
    return reduce_concat(inv_word(v.members[mi]), v.members[mj]);
  }

  // max elevation along the geodesic over points whose reduced radial does
  // not leave along `germ`; members sit at elevation zero
  Rational budget_obstruction(const FV& v, int mi, int mj,
                              const Token& germ) const {
    std::vector<Token> stack;
    Rational elev(0), B(0);
    auto front_blocks = [&]() {
      if (stack.empty()) return true;
      return !(stack.front() == germ);
    };
    for (int t : member_path(v, mi, mj)) {
      if (front_blocks()) B = max(B, elev);
      Token tok = rg_token(t);
      if (!stack.empty() && stack.back() == Token{tok.first, -tok.second}) {
        elev -= redges[tok.first].len;
        stack.pop_back();
      } else {
        stack.push_back(tok);
        elev += redges[tok.first].len;
      }
      if (front_blocks()) B = max(B, elev);
    }
    if (!stack.empty() || !elev.is_zero())
      throw Error("InternalError", "class members are not at elevation zero");
    return B;
  }

  // splits the rg edge at `off` from its from side; splits every fold edge
  // and domain edge above it, fixing member words and chains
  void subdivide_rg(int rg, const Rational& off) {
    if (!(off.sign() > 0 && off < redges[rg].len))
      throw Error("InternalError", "subdivision offset outside the edge");
    int mid = int(rvert_orig.size());
    Rational cut = redges[rg].a + off;
    rvert_orig.push_back(QPoint::on_edge(redges[rg].orig, cut));
    int r2 = int(redges.size());
    redges.push_back(RgEdge{mid, redges[rg].to, redges[rg].len - off,
                            redges[rg].orig, cut, redges[rg].b});
    redges[rg].to = mid;
    redges[rg].len = off;
    redges[rg].b = cut;

    // split fold edges over rg; their D-edges follow inside the loop below
    size_t fe_count = edges.size();
    std::vector<int> d_old_to_new(dedges.size(), -1);  // b-side half per D-edge
    for (size_t e = 0; e < fe_count; ++e) {
      if (!edges[e].alive || edges[e].rg != rg) continue;
      int mv = int(verts.size());
      verts.push_back(FV{mid, {{}}, true});
      int e2 = int(edges.size());
      int a_piece, b_piece;
      std::vector<int> dmine;
      for (size_t d = 0; d < dedges.size(); ++d)
        if (dedges[d].fold_edge == int(e)) dmine.push_back(int(d));
      int old_drep = edges[e].drep;
      // the surviving id keeps the rg-from piece; geometrically that is
      // the a side when dir > 0 and the b side otherwise
      if (edges[e].dir > 0) {
        edges.push_back(
            FE{mv, edges[e].b, 0, edges[e].b_member, -1, r2, 1, true});
        edges[e].b = mv;
        edges[e].b_member = 0;
        a_piece = int(e);
        b_piece = e2;
      } else {
        edges.push_back(
            FE{edges[e].a, mv, edges[e].a_member, 0, -1, r2, -1, true});
        edges[e].a = mv;
        edges[e].a_member = 0;
        a_piece = e2;
        b_piece = int(e);
      }
      // the piece covering the kept rg id is the one adjacent to rg.from
      int p_rg = (edges[a_piece].rg == rg) ? a_piece : b_piece;
      int p_r2 = p_rg == a_piece ? b_piece : a_piece;
      for (int d : dmine) {
        // id d keeps the a-side half in d's own frame
        int d2 = int(dedges.size());
        bool d_a_covers_rg = dedges[d].dir > 0;
        dedges.push_back(DEdge{d_a_covers_rg ? r2 : rg, dedges[d].dir,
                               d_a_covers_rg ? p_r2 : p_rg});
        dedges[d].rg = d_a_covers_rg ? rg : r2;
        dedges[d].fold_edge = d_a_covers_rg ? p_rg : p_r2;
        d_old_to_new[d] = d2;
      }
      // drep stays aligned with the (a,b) frame: the a piece keeps the old
      // drep id, the b piece takes its far half
      if (old_drep < 0 || d_old_to_new[old_drep] < 0)
        throw Error("InternalError", "drep did not split with its class");
      edges[a_piece].drep = old_drep;
      edges[b_piece].drep = d_old_to_new[old_drep];
      if (dedges[edges[a_piece].drep].fold_edge != a_piece ||
          dedges[edges[b_piece].drep].fold_edge != b_piece)
        throw Error("InternalError", "drep assignment after split broke");
      for (auto& chain : chains) {
        std::vector<std::pair<int, int>> nu;
        for (const auto& [ce, cd] : chain) {
          if (ce != int(e)) {
            nu.push_back({ce, cd});
            continue;
          }
          if (cd > 0) {
            nu.push_back({a_piece, 1});
            nu.push_back({b_piece, 1});
          } else {
            nu.push_back({b_piece, -1});
            nu.push_back({a_piece, -1});
          }
        }
        chain = std::move(nu);
      }
    }
    // member words: +d becomes +d +d2 in the geometric a->b order
    for (auto& v : verts) {
      if (!v.alive) continue;
      for (auto& w : v.members) {
        std::vector<int> nu;
        for (int t : w) {
          int d = std::abs(t) - 1;
          int d2 = d < int(d_old_to_new.size()) ? d_old_to_new[d] : -1;
          if (d2 < 0) {
            nu.push_back(t);
            continue;
          }
          if (t > 0) {
            nu.push_back(d + 1);
            nu.push_back(d2 + 1);
          } else {
            nu.push_back(-(d2 + 1));
            nu.push_back(-(d + 1));
          }
        }
        w = std::move(nu);
      }
    }
  }

  struct End {
    int edge;
    int side;  // 0 = a, 1 = b
  };

  std::vector<End> ends_at(int v) const {
    std::vector<End> res;
    for (size_t e = 0; e < edges.size(); ++e) {
      if (!edges[e].alive) continue;
      if (edges[e].a == v) res.push_back(End{int(e), 0});
      if (edges[e].b == v) res.push_back(End{int(e), 1});
    }
    return res;
  }

  Token end_germ(const End& en) const {
    const FE& e = edges[en.edge];
    return en.side == 0 ? Token{e.rg, e.dir} : Token{e.rg, -e.dir};
  }
  int end_member(const End& en) const {
    const FE& e = edges[en.edge];
    return en.side == 0 ? e.a_member : e.b_member;
  }
  // the D-edge step leaving the attach member into the arm
  int end_dstep(const End& en) const {
    const FE& e = edges[en.edge];
    return en.side == 0 ? e.drep + 1 : -(e.drep + 1);
  }
  int far_vertex(const End& en) const {
    const FE& e = edges[en.edge];
    return en.side == 0 ? e.b : e.a;
  }
  int far_member(const End& en) const {
    const FE& e = edges[en.edge];
    return en.side == 0 ? e.b_member : e.a_member;
  }

  // folds the two arm edges completely; they share germ and length
  void fold_pair(int v, const End& ei, const End& ej) {
    int wi = far_vertex(ei), wj = far_vertex(ej);
    int oi = far_member(ei), oj = far_member(ej);

    if (wi != wj) {
      // domain geodesic from Ei's far member to Ej's far member
      std::vector<int> connector = {inv_tok(end_dstep(ei))};
      connector = reduce_concat(
          connector, member_path(verts[v], end_member(ei), end_member(ej)));
      reduce_append(connector, end_dstep(ej));

      FV& Wi = verts[wi];
      FV& Wj = verts[wj];
      // rebase Wj's members onto Wi's coordinates
      std::vector<int> base_path = reduce_concat(
          reduce_concat(Wi.members[oi], connector), inv_word(Wj.members[oj]));
      int offset = int(Wi.members.size());
      for (const auto& mw : Wj.members)
        Wi.members.push_back(reduce_concat(base_path, mw));
      Wj.alive = false;
      for (auto& e : edges) {
        if (!e.alive) continue;
        if (e.a == wj) {
          e.a = wi;
          e.a_member += offset;
        }
        if (e.b == wj) {
          e.b = wi;
          e.b_member += offset;
        }
      }
      if (base_fv == wj) base_fv = wi;
    }

    // merge Ej into Ei; orientation relative to the shared vertex side
    bool same_orient = (ei.side == ej.side);
    for (auto& d : dedges)
      if (d.fold_edge == ej.edge) d.fold_edge = ei.edge;
    edges[ej.edge].alive = false;
    for (auto& chain : chains)
      for (auto& [ce, cd] : chain)
        if (ce == ej.edge) {
          ce = ei.edge;
          if (!same_orient) cd = -cd;
        }
    (void)oi;
    (void)oj;
  }
};

struct FoldRun {
  Fold f;
  GraphOfGroups tree;

  // degree-two vertices that are neither the base, nor images of original
  // domain vertices, nor blocked fold points are contracted away; a tidy
  // edge is a maximal chain of fold edges through contracted vertices
  struct TidyEdge {
    std::vector<std::pair<int, int>> seq;  // (fold edge, geometric direction)
    int from_fv, to_fv;
    Rational len;
  };
  std::vector<TidyEdge> tidy;
  std::vector<int> tidy_of;       // fold edge -> tidy index
  std::vector<int> pos_in_tidy;   // fold edge -> position in seq
  std::vector<Rational> tidy_cum; // per fold edge: start offset inside the tidy edge
  std::vector<int> fv_compact;    // kept fold vertex -> tree vertex index
  std::vector<int> fv_of_dgv;     // original domain vertex -> fold vertex
};

FoldRun run_fold(const Morphism& m, const Rational& t, bool reverse_order) {
  if (t.sign() < 0 || t > Rational(1))
    throw Error("TOutOfRange", "fold time must lie in [0,1]");
  Norm n = normalize(m);

  FoldRun run;
  Fold& f = run.f;
  f.redges = n.redges;
  f.rvert_orig = n.rvert_orig;
  f.mt = m.fold_depth * t;
  f.base_fv = n.dbase;
  for (int v = 0; v < n.dvert_count; ++v)
    f.verts.push_back(Fold::FV{n.dv_image[v], {{}}, true});
  for (size_t e = 0; e < n.dedges.size(); ++e) {
    const DgEdge& de = n.dedges[e];
    f.dedges.push_back(Fold::DEdge{de.rg, de.dir, int(e)});
    f.edges.push_back(
        Fold::FE{de.from, de.to, 0, 0, int(e), de.rg, de.dir, true});
  }
  f.chains.resize(n.chains.size());
  for (size_t e = 0; e < n.chains.size(); ++e)
    for (int piece : n.chains[e]) f.chains[e].push_back({piece, 1});
  run.fv_of_dgv.resize(m.domain.vertices.size());
  for (size_t v = 0; v < m.domain.vertices.size(); ++v)
    run.fv_of_dgv[v] = int(v);

  // iterate folds in a canonical order until no pair has budget left
  for (int guard = 0;; ++guard) {
    if (guard > 200000)
      throw Error("InternalError", "fold iteration did not terminate");
    bool acted = false;
    std::vector<int> verts_order;
    for (size_t v = 0; v < f.verts.size(); ++v)
      if (f.verts[v].alive) verts_order.push_back(int(v));
    if (reverse_order)
      std::reverse(verts_order.begin(), verts_order.end());
    for (int v : verts_order) {
      auto ends = f.ends_at(v);
      if (reverse_order) std::reverse(ends.begin(), ends.end());
      for (size_t i = 0; i < ends.size() && !acted; ++i)
        for (size_t j = i + 1; j < ends.size() && !acted; ++j) {
          if (ends[i].edge == ends[j].edge && ends[i].side == ends[j].side)
            continue;
          Token gi = f.end_germ(ends[i]);
          if (!(gi == f.end_germ(ends[j]))) continue;
          Rational B = f.budget_obstruction(
              f.verts[v], f.end_member(ends[i]), f.end_member(ends[j]), gi);
          Rational budget = f.mt - B;
          if (budget.sign() <= 0) continue;
          Rational len = f.redges[gi.first].len;
          if (budget < len) {
            Rational off = gi.second > 0 ? budget : len - budget;
            f.subdivide_rg(gi.first, off);
            acted = true;  // re-scan with the refined complex
            break;
          }
          int wj = f.far_vertex(ends[j]);
          int wi = f.far_vertex(ends[i]);
          f.fold_pair(v, ends[i], ends[j]);
          if (wi != wj)
            for (auto& fv : run.fv_of_dgv)
              if (fv == wj) fv = wi;
          acted = true;
        }
      if (acted) break;
    }
    if (!acted) break;
  }

  // kept vertices
  std::vector<char> kept(f.verts.size(), 0);
  kept[f.base_fv] = 1;
  for (int fv : run.fv_of_dgv) kept[fv] = 1;
  for (size_t v = 0; v < f.verts.size(); ++v) {
    if (!f.verts[v].alive || kept[v]) continue;
    auto ends = f.ends_at(int(v));
    if (ends.size() != 2) {
      kept[v] = 1;
      continue;
    }
    if (ends[0].edge == ends[1].edge) kept[v] = 1;  // a bare loop
    else if (f.end_germ(ends[0]) == f.end_germ(ends[1]))
      kept[v] = 1;  // a blocked fold point: phi_t1 folds here
  }

  // tidy chains between kept vertices
  run.tidy_of.assign(f.edges.size(), -1);
  run.pos_in_tidy.assign(f.edges.size(), -1);
  run.tidy_cum.assign(f.edges.size(), Rational(0));
  std::vector<char> consumed(f.edges.size(), 0);
  std::vector<int> kept_order;
  kept_order.push_back(f.base_fv);
  for (size_t v = 0; v < f.verts.size(); ++v)
    if (f.verts[v].alive && kept[v] && int(v) != f.base_fv)
      kept_order.push_back(int(v));
  for (int v : kept_order) {
    auto ends = f.ends_at(v);
    for (const auto& en : ends) {
      if (consumed[en.edge]) continue;
      FoldRun::TidyEdge te;
      te.from_fv = v;
      Fold::End cur = en;
      for (;;) {
        int geom = cur.side == 0 ? 1 : -1;  // traveling a->b or b->a
        consumed[cur.edge] = 1;
        run.tidy_of[cur.edge] = int(run.tidy.size());
        run.pos_in_tidy[cur.edge] = int(te.seq.size());
        run.tidy_cum[cur.edge] = te.len;
        te.seq.push_back({cur.edge, geom});
        te.len += f.redges[f.edges[cur.edge].rg].len;
        int w = f.far_vertex(cur);
        if (kept[w]) {
          te.to_fv = w;
          break;
        }
        auto wends = f.ends_at(w);
        // degree two: continue through the other end
        Fold::End next = wends[0];
        if (next.edge == cur.edge &&
            next.side == (cur.side == 0 ? 1 : 0))
          next = wends[1];
        cur = next;
      }
      run.tidy.push_back(te);
    }
  }

  // the compact graph
  GraphOfGroups& out = run.tree;
  run.fv_compact.assign(f.verts.size(), -1);
  for (size_t k = 0; k < kept_order.size(); ++k) {
    run.fv_compact[kept_order[k]] = int(k);
    out.vertices.push_back(
        VertexSpec{"v" + std::to_string(k), GroupKind::Trivial});
  }
  for (size_t k = 0; k < run.tidy.size(); ++k) {
    const auto& te = run.tidy[k];
    out.edges.push_back(EdgeSpec{"e" + std::to_string(k),
                                 out.vertices[run.fv_compact[te.from_fv]].id,
                                 out.vertices[run.fv_compact[te.to_fv]].id,
                                 BigInt(1), BigInt(1), te.len});
  }
  // spanning tree by BFS
  {
    std::vector<bool> seen(out.vertices.size(), false);
    seen[0] = true;
    std::vector<int> queue = {0};
    std::set<std::string> tree_ids;
    for (size_t qi = 0; qi < queue.size(); ++qi) {
      for (const auto& e : out.edges) {
        int a = out.vertex_index(e.from), b = out.vertex_index(e.to);
        int other = -1;
        if (a == queue[qi] && !seen[b]) other = b;
        if (b == queue[qi] && !seen[a]) other = a;
        if (other >= 0) {
          seen[other] = true;
          tree_ids.insert(e.id);
          queue.push_back(other);
        }
      }
    }
    out.spanning_tree.assign(tree_ids.begin(), tree_ids.end());
  }
  return run;
}

// a fold-edge chain expressed as steps over the tidy edges
std::vector<RangeStep> chain_to_tidy_steps(
    const FoldRun& run, const std::vector<std::pair<int, int>>& chain) {
  std::vector<RangeStep> steps;
  for (const auto& [fe, gd] : chain) {
    int ti = run.tidy_of[fe];
    const auto& te = run.tidy[ti];
    int stored = te.seq[run.pos_in_tidy[fe]].second;
    Rational lo = run.tidy_cum[fe];
    Rational hi = lo + run.f.redges[run.f.edges[fe].rg].len;
    Rational from = gd == stored ? lo : hi;
    Rational to = gd == stored ? hi : lo;
    if (!steps.empty() && steps.back().edge == ti &&
        steps.back().to_off == from &&
        (steps.back().to_off > steps.back().from_off) == (to > from)) {
      steps.back().to_off = to;
    } else {
      steps.push_back(RangeStep{ti, from, to});
    }
  }
  return steps;
}

// converts a chain into word letters; requires every step to span a full
// tidy edge (chains between kept vertices always do)
Word chain_to_letters(const FoldRun& run,
                      const std::vector<std::pair<int, int>>& chain,
                      int exponent_sign) {
  auto steps = chain_to_tidy_steps(run, chain);
  Word w;
  auto emit = [&](const RangeStep& s) {
    const auto& te = run.tidy[s.edge];
    if (!((s.from_off.is_zero() && s.to_off == te.len) ||
          (s.to_off.is_zero() && s.from_off == te.len)))
      throw Error("InternalError",
                  "chain letter spans a partial tidy edge: e" +
                      std::to_string(s.edge) + " " + s.from_off.to_string() +
                      "->" + s.to_off.to_string() + " of len " +
                      te.len.to_string());
    // a geometric from->to traversal of edge e is the letter e^-1
    bool geom_forward = s.to_off > s.from_off;
    w.push_back(Letter{true, run.tree.edges[s.edge].id,
                       BigInt(geom_forward ? -1 : 1)});
  };
  if (exponent_sign > 0) {
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
      RangeStep rev{it->edge, it->to_off, it->from_off};
      emit(rev);
    }
  } else {
    for (const auto& s : steps) emit(s);
  }
  return w;
}

}  // namespace

Morphism make_morphism(const GraphOfGroups& domain, const GraphOfGroups& range,
                       const std::map<std::string, std::vector<std::string>>&
                           edge_images) {
  Morphism m;
  m.domain = domain;
  m.range = range;
  m.vertex_images.assign(domain.vertices.size(), QPoint{});
  m.edge_images.resize(domain.edges.size());

  std::vector<bool> have_image(domain.vertices.size(), false);
  m.vertex_images[domain.base_vertex()] =
      QPoint::at_vertex(range.base_vertex());
  have_image[domain.base_vertex()] = true;

  // parse image paths as signed full edges
  std::vector<std::vector<std::pair<int, int>>> paths(domain.edges.size());
  for (size_t e = 0; e < domain.edges.size(); ++e) {
    auto it = edge_images.find(domain.edges[e].id);
    if (it == edge_images.end())
      throw Error("LengthMismatch",
                  "no image path for edge '" + domain.edges[e].id + "'");
    for (const auto& tok : it->second) {
      std::string id = tok;
      int dir = 1;
      auto caret = tok.find('^');
      if (caret != std::string::npos) {
        id = tok.substr(0, caret);
        if (tok.substr(caret + 1) != "-1")
          throw Error("BadWord", "edge image tokens use '^-1' only");
        dir = -1;
      }
      paths[e].push_back({range.edge_index(id), dir});
    }
    if (paths[e].empty())
      throw Error("LengthMismatch",
                  "empty image path for edge '" + domain.edges[e].id + "'");
  }

  // propagate vertex images along edges (geometric direction from->to)
  for (bool progress = true; progress;) {
    progress = false;
    for (size_t e = 0; e < domain.edges.size(); ++e) {
      int u = domain.vertex_index(domain.edges[e].from);
      int v = domain.vertex_index(domain.edges[e].to);
      if (!have_image[u] && !have_image[v]) continue;
      // walk the path from the known side
      int start, fin;
      std::vector<std::pair<int, int>> walkp = paths[e];
      if (have_image[u]) {
        start = u;
        fin = v;
      } else {
        start = v;
        fin = u;
        std::reverse(walkp.begin(), walkp.end());
        for (auto& [re, rd] : walkp) rd = -rd;
      }
      int pos = m.vertex_images[start].vertex;
      if (pos < 0)
        throw Error("InternalError", "vertex image propagation off a vertex");
      for (const auto& [re, rd] : walkp) {
        int tail = rd > 0 ? range.vertex_index(range.edges[re].from)
                          : range.vertex_index(range.edges[re].to);
        if (tail != pos)
          throw Error("LengthMismatch",
                      "image path of '" + domain.edges[e].id +
                          "' is not continuous");
        pos = rd > 0 ? range.vertex_index(range.edges[re].to)
                     : range.vertex_index(range.edges[re].from);
      }
      if (!have_image[fin]) {
        m.vertex_images[fin] = QPoint::at_vertex(pos);
        have_image[fin] = true;
        progress = true;
      } else if (m.vertex_images[fin].vertex != pos) {
        throw Error("LengthMismatch",
                    "inconsistent vertex images for edge '" +
                        domain.edges[e].id + "'");
      }
    }
  }
  for (bool h : have_image)
    if (!h) throw Error("InternalError", "domain is not connected");

  for (size_t e = 0; e < domain.edges.size(); ++e) {
    for (const auto& [re, rd] : paths[e]) {
      Rational len = range.edges[re].length;
      m.edge_images[e].push_back(rd > 0 ? RangeStep{re, Rational(0), len}
                                        : RangeStep{re, len, Rational(0)});
    }
  }

  finalize_morphism(m);
  return m;
}

void finalize_morphism(Morphism& m) {
  require_valid(m.domain);
  require_valid(m.range);
  if (!m.domain.all_vertices_trivial() || !m.range.all_vertices_trivial())
    throw Error("NontrivialStabilizer",
                "folding requires trivial vertex stabilizers");
  if (!m.domain.marking || !m.range.marking)
    throw Error("MarkingIncompatible", "both trees need markings");

  if (m.vertex_images.size() != m.domain.vertices.size() ||
      m.edge_images.size() != m.domain.edges.size())
    throw Error("InternalError", "morphism tables incomplete");

  // isometric on edges, continuous paths
  for (size_t e = 0; e < m.domain.edges.size(); ++e) {
    const auto& path = m.edge_images[e];
    if (path.empty())
      throw Error("LengthMismatch",
                  "empty image path for edge '" + m.domain.edges[e].id + "'");
    Rational total(0);
    for (size_t k = 0; k < path.size(); ++k) {
      if (path[k].from_off == path[k].to_off)
        throw Error("LengthMismatch", "degenerate image step");
      total += path[k].length();
      if (k + 1 < path.size()) {
        QPoint a = range_point(m.range, path[k].edge, path[k].to_off);
        QPoint b = range_point(m.range, path[k + 1].edge, path[k + 1].from_off);
        if (!same_qpoint(a, b))
          throw Error("LengthMismatch",
                      "image path of '" + m.domain.edges[e].id +
                          "' is not continuous");
        if (path[k + 1].edge == path[k].edge &&
            (path[k + 1].to_off > path[k + 1].from_off) !=
                (path[k].to_off > path[k].from_off))
          throw Error("LengthMismatch",
                      "image path of '" + m.domain.edges[e].id +
                          "' backtracks");
      }
    }
    if (total != m.domain.edges[e].length)
      throw Error("LengthMismatch",
                  "edge '" + m.domain.edges[e].id +
                      "' has length " + m.domain.edges[e].length.to_string() +
                      " but its image path has length " + total.to_string(),
                  {{"edge", m.domain.edges[e].id}});
    QPoint s0 = range_point(m.range, path.front().edge, path.front().from_off);
    QPoint s1 = range_point(m.range, path.back().edge, path.back().to_off);
    int u = m.domain.vertex_index(m.domain.edges[e].from);
    int v = m.domain.vertex_index(m.domain.edges[e].to);
    if (!same_qpoint(s0, m.vertex_images[u]) ||
        !same_qpoint(s1, m.vertex_images[v]))
      throw Error("LengthMismatch",
                  "image path endpoints disagree with the vertex images for '" +
                      m.domain.edges[e].id + "'");
  }

  // sampled Lipschitz check through the markings
  std::vector<std::string> gens;
  for (const auto& [gname, unused] : *m.domain.marking) gens.push_back(gname);
  for (const auto& gname : gens)
    if (!m.range.marking->count(gname))
      throw Error("MarkingIncompatible", "marking generator sets differ");
  if (m.range.marking->size() != m.domain.marking->size())
    throw Error("MarkingIncompatible", "marking generator sets differ");
  std::vector<std::string> sample = gens;
  for (size_t i = 0; i < gens.size(); ++i)
    for (size_t j = 0; j < gens.size(); ++j) {
      if (i == j) continue;
      sample.push_back(gens[i] + " " + gens[j]);
      sample.push_back(gens[i] + " " + gens[j] + "^-1");
    }
  for (const auto& text : sample) {
    Rational ld = translation_length(m.domain, marked_word(m.domain, text, false));
    Rational lr = translation_length(m.range, marked_word(m.range, text, false));
    if (ld < lr)
      throw Error("MarkingIncompatible",
                  "word '" + text + "' grows from " + ld.to_string() + " to " +
                      lr.to_string(),
                  {{"word", text}});
  }

  m.fold_depth = fold_depth_normalized(normalize(m));
}

Morphism scale_morphism(const Morphism& m, const Rational& k) {
  if (k.sign() <= 0) throw Error("BadScale", "scale factor must be positive");
  Morphism out = m;
  out.domain = m.domain.scaled(k);
  out.range = m.range.scaled(k);
  for (auto& vi : out.vertex_images)
    if (!vi.is_vertex()) vi.offset = vi.offset * k;
  for (auto& path : out.edge_images)
    for (auto& s : path) {
      s.from_off = s.from_off * k;
      s.to_off = s.to_off * k;
    }
  out.fold_depth = m.fold_depth * k;
  return out;
}

FoldResult fold_at_time(const Morphism& m, const Rational& t,
                        bool reverse_order) {
  FoldRun run = run_fold(m, t, reverse_order);
  FoldResult res;
  res.tree = run.tree;

  // marking of T_t: push the domain marking through the chains
  {
    std::map<std::string, std::string> marking;
    for (const auto& [gen, text] : *m.domain.marking) {
      Word w = parse_word(text);
      Word out;
      for (const auto& l : w) {
        int e = m.domain.edge_index(l.id);  // trivial groups: edge letters only
        BigInt cnt = l.exponent.abs();
        int sgn = l.exponent.sign();
        for (int64_t k = 0; k < cnt.to_int64(); ++k) {
          Word piece = chain_to_letters(run, run.f.chains[e], sgn);
          out.insert(out.end(), piece.begin(), piece.end());
        }
      }
      marking[gen] = word_to_string(out);
    }
    res.tree.marking = marking;
  }

  // phi_0t: original domain -> T_t
  res.phi_0t.domain = m.domain;
  res.phi_0t.range = res.tree;
  for (size_t e = 0; e < m.domain.edges.size(); ++e)
    res.phi_0t.edge_images.push_back(chain_to_tidy_steps(run, run.f.chains[e]));
  res.phi_0t.vertex_images.resize(m.domain.vertices.size());
  for (size_t v = 0; v < m.domain.vertices.size(); ++v)
    res.phi_0t.vertex_images[v] =
        QPoint::at_vertex(run.fv_compact[run.fv_of_dgv[v]]);
  finalize_morphism(res.phi_0t);

  // phi_t1: T_t -> original range
  res.phi_t1.domain = res.tree;
  res.phi_t1.range = m.range;
  res.phi_t1.vertex_images.assign(res.tree.vertices.size(), QPoint{});
  for (size_t v = 0; v < run.f.verts.size(); ++v) {
    if (!run.f.verts[v].alive || run.fv_compact[v] < 0) continue;
    res.phi_t1.vertex_images[run.fv_compact[v]] =
        run.f.rvert_orig[run.f.verts[v].rg_vertex];
  }
  for (size_t k = 0; k < run.tidy.size(); ++k) {
    std::vector<RangeStep> steps;
    for (const auto& [fe, geom] : run.tidy[k].seq) {
      const RgEdge& r = run.f.redges[run.f.edges[fe].rg];
      int dir = geom * run.f.edges[fe].dir;
      RangeStep step = dir > 0 ? RangeStep{r.orig, r.a, r.b}
                               : RangeStep{r.orig, r.b, r.a};
      if (!steps.empty() && steps.back().edge == step.edge &&
          steps.back().to_off == step.from_off &&
          (steps.back().to_off > steps.back().from_off) ==
              (step.to_off > step.from_off)) {
        steps.back().to_off = step.to_off;
      } else {
        steps.push_back(step);
      }
    }
    res.phi_t1.edge_images.push_back(steps);
  }
  finalize_morphism(res.phi_t1);

  return res;
}

FoldPath fold_path(const Morphism& m, const std::vector<Rational>& times) {
  FoldPath fp;
  fp.morphism = m;
  for (const auto& t : times) fp.steps.push_back({t, fold_at_time(m, t)});
  return fp;
}

std::vector<std::vector<Rational>> length_profile(
    const Morphism& m, const std::vector<std::string>& words,
    const std::vector<Rational>& times) {
  std::vector<std::vector<Rational>> rows(words.size());
  for (const auto& t : times) {
    FoldResult fr = fold_at_time(m, t);
    for (size_t w = 0; w < words.size(); ++w)
      rows[w].push_back(
          translation_length(fr.tree, marked_word(fr.tree, words[w], false)));
  }
  return rows;
}

}  // namespace gtd

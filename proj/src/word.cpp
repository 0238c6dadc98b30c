#include "gtd/word.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace gtd {

std::string vertex_generator_name(const std::string& vertex_id) {
  return "a_" + vertex_id;
}

Word parse_word(const std::string& text) {
  Word w;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    std::string name = tok;
    BigInt exp(1);
    auto caret = tok.find('^');
    if (caret != std::string::npos) {
      name = tok.substr(0, caret);
      exp = BigInt::from_string(tok.substr(caret + 1));
    }
    if (name.empty()) throw Error("BadWord", "empty letter in '" + text + "'");
    if (exp.is_zero()) throw Error("BadWord", "zero exponent in '" + tok + "'");
    w.push_back(Letter{false, name, exp});
  }
  return w;
}

std::string word_to_string(const Word& w) {
  std::string out;
  for (const auto& l : w) {
    if (!out.empty()) out += " ";
    out += l.id;
    if (l.exponent != BigInt(1)) out += "^" + l.exponent.to_string();
  }
  return out;
}

Word invert_word(const Word& w) {
  Word r;
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    Letter l = *it;
    l.exponent = -l.exponent;
    r.push_back(l);
  }
  return r;
}

int traversal_start(const GraphOfGroups& g, int edge, int dir) {
  const EdgeSpec& e = g.edges[edge];
  return dir > 0 ? g.vertex_index(e.to) : g.vertex_index(e.from);
}

int traversal_end(const GraphOfGroups& g, int edge, int dir) {
  const EdgeSpec& e = g.edges[edge];
  return dir > 0 ? g.vertex_index(e.from) : g.vertex_index(e.to);
}

const BigInt& traversal_start_index(const GraphOfGroups& g, int edge, int dir) {
  const EdgeSpec& e = g.edges[edge];
  return dir > 0 ? e.index_to : e.index_from;
}

const BigInt& traversal_end_index(const GraphOfGroups& g, int edge, int dir) {
  const EdgeSpec& e = g.edges[edge];
  return dir > 0 ? e.index_from : e.index_to;
}

PathWord to_path(const GraphOfGroups& g, const Word& w, int start) {
  PathWord p;
  p.start = start;
  int pos = start;
  for (const auto& l : w) {
    // resolve the letter: vertex generator a_<vid> or edge id
    int e = g.edge_index_quiet(l.id);
    if (e >= 0) {
      int dir = l.exponent.sign() > 0 ? 1 : -1;
      BigInt n = l.exponent.abs();
      if (!n.fits_int64() || n.to_int64() > 1000000)
        throw Error("BadWord", "edge exponent too large on '" + l.id + "'");
      for (int64_t i = 0; i < n.to_int64(); ++i) {
        if (traversal_start(g, e, dir) != pos)
          throw Error("NotALoop",
                      "edge letter '" + l.id + "' does not continue the path",
                      {{"letter", l.id}});
        p.syls.push_back(Syl::edge(e, dir));
        pos = traversal_end(g, e, dir);
      }
      continue;
    }
    bool named_vertex = false;
    if (l.id.size() > 2 && l.id.rfind("a_", 0) == 0) {
      int v = g.vertex_index_quiet(l.id.substr(2));
      if (v >= 0) {
        named_vertex = true;
        if (g.vertices[v].kind != GroupKind::InfiniteCyclic)
          throw Error("UnknownGenerator",
                      "vertex '" + g.vertices[v].id + "' has trivial group",
                      {{"letter", l.id}});
        if (v != pos)
          throw Error("NotALoop",
                      "vertex letter '" + l.id + "' used away from its vertex",
                      {{"letter", l.id}});
        p.syls.push_back(Syl::vertex(v, l.exponent));
      }
    }
    if (!named_vertex && e < 0)
      throw Error("UnknownGenerator", "unknown letter '" + l.id + "'",
                  {{"letter", l.id}});
  }
  return p;
}

Word path_to_word(const GraphOfGroups& g, const PathWord& p) {
  Word w;
  for (const auto& s : p.syls) {
    if (s.is_edge)
      w.push_back(Letter{true, g.edges[s.index].id, BigInt(s.dir)});
    else
      w.push_back(
          Letter{false, vertex_generator_name(g.vertices[s.index].id), s.power});
  }
  return w;
}

int path_end(const GraphOfGroups& g, const PathWord& p) {
  int pos = p.start;
  for (const auto& s : p.syls)
    if (s.is_edge) pos = traversal_end(g, s.index, s.dir);
  return pos;
}

namespace {

// Appends a vertex power to the reduction stack, merging with the top.
void push_power(std::vector<Syl>& out, int vertex, const BigInt& power) {
  if (power.is_zero()) return;
  if (!out.empty() && !out.back().is_edge && out.back().index == vertex) {
    out.back().power += power;
    if (out.back().power.is_zero()) out.pop_back();
    return;
  }
  out.push_back(Syl::vertex(vertex, power));
}

}  // namespace

PathWord britton_reduce(const GraphOfGroups& g, const PathWord& p) {
  PathWord out;
  out.start = p.start;
  std::vector<Syl>& st = out.syls;
  for (const auto& s : p.syls) {
    if (!s.is_edge) {
      push_power(st, s.index, s.power);
      continue;
    }
    // try pinches until the traversal can be pushed
    for (;;) {
      // locate pattern [T0, P?] on top with T0 the inverse traversal of s
      size_t n = st.size();
      int t0 = -1;
      BigInt mid(0);
      bool has_mid = false;
      if (n >= 1 && st[n - 1].is_edge) {
        t0 = int(n - 1);
      } else if (n >= 2 && !st[n - 1].is_edge && st[n - 2].is_edge) {
        t0 = int(n - 2);
        mid = st[n - 1].power;
        has_mid = true;
      }
      if (t0 < 0 || st[t0].index != s.index || st[t0].dir != -s.dir) break;
      bool trivial_edge = g.edge_group_trivial(st[t0].index);
      const BigInt& divisor = traversal_end_index(g, st[t0].index, st[t0].dir);
      bool pinch = trivial_edge ? mid.is_zero() : mid.divisible_by(divisor);
      if (!pinch) break;
      int home = traversal_start(g, st[t0].index, st[t0].dir);
      BigInt repl(0);
      if (!trivial_edge && !mid.is_zero())
        repl = (mid / divisor) * traversal_start_index(g, st[t0].index, st[t0].dir);
      if (has_mid) st.pop_back();
      st.pop_back();
      push_power(st, home, repl);
      // the pinch consumed the current traversal as well
      goto consumed;
    }
    st.push_back(s);
    continue;
  consumed:;
  }
  return out;
}

PathWord canonical_form(const GraphOfGroups& g, const PathWord& p) {
  PathWord r = britton_reduce(g, p);
  PathWord out;
  out.start = r.start;
  BigInt pending(0);
  int pending_vertex = r.start;
  bool have_pending = false;
  for (const auto& s : r.syls) {
    if (!s.is_edge) {
      pending_vertex = s.index;
      pending += s.power;
      have_pending = true;
      continue;
    }
    BigInt carry(0);
    if (have_pending && !pending.is_zero()) {
      if (!g.edge_group_trivial(s.index)) {
        const BigInt& sidx = traversal_start_index(g, s.index, s.dir);
        BigInt rem = pending % sidx;
        if (rem.sign() < 0) rem += sidx.abs();
        BigInt q = (pending - rem) / sidx;
        if (!rem.is_zero()) out.syls.push_back(Syl::vertex(pending_vertex, rem));
        carry = q * traversal_end_index(g, s.index, s.dir);
      } else {
        out.syls.push_back(Syl::vertex(pending_vertex, pending));
      }
    }
    out.syls.push_back(s);
    pending = carry;
    pending_vertex = traversal_end(g, s.index, s.dir);
    have_pending = !carry.is_zero();
  }
  if (have_pending && !pending.is_zero())
    out.syls.push_back(Syl::vertex(pending_vertex, pending));
  return out;
}

std::string serialize_path(const PathWord& p) {
  std::string s = "@" + std::to_string(p.start);
  for (const auto& syl : p.syls) {
    if (syl.is_edge)
      s += "|e" + std::to_string(syl.index) + (syl.dir > 0 ? "+" : "-");
    else
      s += "|v" + std::to_string(syl.index) + "^" + syl.power.to_string();
  }
  return s;
}

std::string coset_key(const GraphOfGroups& g, const PathWord& p) {
  PathWord c = canonical_form(g, p);
  if (!c.syls.empty() && !c.syls.back().is_edge) c.syls.pop_back();
  return serialize_path(c);
}

PathWord multiply(const GraphOfGroups& g, const PathWord& a, const PathWord& b) {
  if (path_end(g, a) != b.start)
    throw Error("BadPath", "paths do not compose");
  PathWord c;
  c.start = a.start;
  c.syls = a.syls;
  c.syls.insert(c.syls.end(), b.syls.begin(), b.syls.end());
  return britton_reduce(g, c);
}

PathWord inverse(const GraphOfGroups& g, const PathWord& p) {
  PathWord r;
  r.start = path_end(g, p);
  for (auto it = p.syls.rbegin(); it != p.syls.rend(); ++it) {
    Syl s = *it;
    if (s.is_edge)
      s.dir = -s.dir;
    else
      s.power = -s.power;
    r.syls.push_back(s);
  }
  return r;
}

bool in_vertex_group(const GraphOfGroups& g, const PathWord& loop) {
  PathWord r = britton_reduce(g, loop);
  for (const auto& s : r.syls)
    if (s.is_edge) return false;
  return true;
}

ReducedWord reduce_loop(const GraphOfGroups& g, const PathWord& loop) {
  if (path_end(g, loop) != loop.start)
    throw Error("NotALoop", "word is not a closed path");
  ReducedWord res;
  res.britton = canonical_form(g, loop);

  PathWord w = britton_reduce(g, loop);
  for (;;) {
    bool has_edge = false;
    for (const auto& s : w.syls)
      if (s.is_edge) { has_edge = true; break; }
    if (!has_edge) break;
    // conjugate a leading vertex power to the tail
    if (!w.syls.front().is_edge) {
      Syl head = w.syls.front();
      w.syls.erase(w.syls.begin());
      push_power(w.syls, head.index, head.power);
      w = britton_reduce(g, w);
      continue;
    }
    // wrap pinch: tail [Tq, P?] against head T1
    const Syl& head = w.syls.front();
    size_t n = w.syls.size();
    int tq = -1;
    BigInt mid(0);
    if (w.syls[n - 1].is_edge) {
      tq = int(n - 1);
    } else if (n >= 2 && w.syls[n - 2].is_edge) {
      tq = int(n - 2);
      mid = w.syls[n - 1].power;
    }
    if (tq <= 0) break;  // single edge letter cannot wrap-pinch with itself
    const Syl& last = w.syls[tq];
    if (last.index == head.index && last.dir == -head.dir) {
      bool trivial_edge = g.edge_group_trivial(last.index);
      const BigInt& divisor = traversal_end_index(g, last.index, last.dir);
      bool pinch = trivial_edge ? mid.is_zero() : mid.divisible_by(divisor);
      if (pinch) {
        BigInt repl(0);
        if (!trivial_edge && !mid.is_zero())
          repl = (mid / divisor) * traversal_start_index(g, last.index, last.dir);
        int home = traversal_start(g, last.index, last.dir);
        // w := T1^-1 w T1, with the tail pinch applied
        PathWord next;
        next.start = traversal_end(g, head.index, head.dir);
        next.syls.assign(w.syls.begin() + 1, w.syls.begin() + tq);
        push_power(next.syls, home, repl);
        w = britton_reduce(g, next);
        continue;
      }
    }
    break;
  }

  res.cyclic = w;
  Rational len(0);
  bool hyper = false;
  for (const auto& s : w.syls) {
    if (s.is_edge) {
      hyper = true;
      len += g.edges[s.index].length;
    }
  }
  res.hyperbolic = hyper;
  res.length = hyper ? len : Rational(0);
  return res;
}

ReducedWord reduce_word(const GraphOfGroups& g, const Word& w) {
  PathWord p = to_path(g, w, g.base_vertex());
  if (path_end(g, p) != g.base_vertex())
    throw Error("NotALoop", "edge letters do not form a closed path at the base");
  return reduce_loop(g, p);
}

Rational translation_length(const GraphOfGroups& g, const Word& w) {
  return reduce_word(g, w).length;
}

Word marked_word(const GraphOfGroups& g, const std::string& base_word_text,
                 bool allow_raw_letters) {
  Word raw = parse_word(base_word_text);
  Word out;
  for (const auto& l : raw) {
    if (g.marking && g.marking->count(l.id)) {
      Word sub = parse_word(g.marking->at(l.id));
      BigInt n = l.exponent.abs();
      if (!n.fits_int64() || n.to_int64() > 100000)
        throw Error("BadWord", "marking exponent too large");
      Word piece = l.exponent.sign() > 0 ? sub : invert_word(sub);
      for (int64_t i = 0; i < n.to_int64(); ++i)
        out.insert(out.end(), piece.begin(), piece.end());
      continue;
    }
    if (!allow_raw_letters)
      throw Error("UnknownGenerator", "no marking for generator '" + l.id + "'",
                  {{"letter", l.id}});
    out.push_back(l);
  }
  return out;
}

std::vector<Word> enumerate_loop_words(const GraphOfGroups& g, int max_letters,
                                       size_t limit) {
  std::vector<Word> result;
  std::set<std::string> seen;
  PathWord cur;
  cur.start = g.base_vertex();

  // letters available at a position, deterministic order
  auto options = [&](int pos) {
    std::vector<Syl> opts;
    if (g.vertices[pos].kind == GroupKind::InfiniteCyclic) {
      opts.push_back(Syl::vertex(pos, BigInt(1)));
      opts.push_back(Syl::vertex(pos, BigInt(-1)));
    }
    for (size_t e = 0; e < g.edges.size(); ++e) {
      for (int dir : {1, -1})
        if (traversal_start(g, int(e), dir) == pos)
          opts.push_back(Syl::edge(int(e), dir));
    }
    return opts;
  };

  std::vector<Syl> stack;
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (result.size() >= limit) return;
    if (pos == g.base_vertex() && !stack.empty()) {
      PathWord p;
      p.start = g.base_vertex();
      p.syls = stack;
      PathWord red = britton_reduce(g, p);
      if (!red.trivial()) {
        std::string key = serialize_path(canonical_form(g, red));
        if (seen.insert(key).second) {
          Word w;
          for (const auto& s : stack) {
            if (s.is_edge)
              w.push_back(Letter{true, g.edges[s.index].id, BigInt(s.dir)});
            else
              w.push_back(Letter{false,
                                 vertex_generator_name(g.vertices[s.index].id),
                                 s.power});
          }
          result.push_back(w);
        }
      }
    }
    if (remaining == 0) return;
    for (const auto& s : options(pos)) {
      // prune immediate inverses
      if (!stack.empty()) {
        const Syl& prev = stack.back();
        if (!s.is_edge && !prev.is_edge && prev.index == s.index &&
            prev.power == -s.power)
          continue;
        if (s.is_edge && prev.is_edge && prev.index == s.index &&
            prev.dir == -s.dir)
          continue;
      }
      stack.push_back(s);
      int next = s.is_edge ? traversal_end(g, s.index, s.dir) : pos;
      self(self, next, remaining - 1);
      stack.pop_back();
    }
  };
  rec(rec, g.base_vertex(), max_letters);
  return result;
}

}  // namespace gtd

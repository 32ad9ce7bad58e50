#pragma once

// Brute-force reference computations used as test oracles. Deliberately naive:
// explicit enumeration of words and walks, no subset constructions.

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sofic/presentation.hpp"

namespace oracle {

using sofic::LabeledGraph;
using sofic::Presentation;
using sofic::Symbol;
using sofic::Vertex;
using sofic::Word;

inline std::string corpus_path(const std::string& name) { return std::string(CORPUS_DIR) + "/" + name; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Presentation load(const std::string& name) {
  return sofic::parse_presentation(read_file(corpus_path(name)));
}

/// All words of length n over {0..sigma-1} in lexicographic order.
inline std::vector<Word> all_words(std::size_t sigma, std::size_t n) {
  std::vector<Word> out{Word{}};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Word> next;
    for (const auto& w : out)
      for (Symbol s = 0; s < sigma; ++s) {
        auto v = w;
        v.push_back(s);
        next.push_back(std::move(v));
      }
    out = std::move(next);
  }
  return out;
}

/// Vertices reached from `from` by walks labeled w.
inline std::set<Vertex> read(const LabeledGraph& g, std::set<Vertex> from, const Word& w) {
  for (auto s : w) {
    std::set<Vertex> next;
    for (auto v : from)
      for (const auto& e : g.edges())
        if (e.src == v && e.label == s) next.insert(e.trg);
    from = std::move(next);
  }
  return from;
}

/// Vertices with a walk of length >= |V| ending (past) or starting (future) there.
inline std::vector<bool> long_walk(const LabeledGraph& g, bool past) {
  const auto n = g.num_vertices();
  std::vector<bool> ok(n, true);
  for (std::size_t step = 0; step < n + 1; ++step) {
    std::vector<bool> next(n, false);
    for (const auto& e : g.edges()) {
      if (past && ok[e.src]) next[e.trg] = true;
      if (!past && ok[e.trg]) next[e.src] = true;
    }
    ok = std::move(next);
  }
  return ok;
}

/// Label words of length n of bi-infinite walks, by exhaustive word scan.
inline std::set<Word> language(const Presentation& p, std::size_t n) {
  const auto& g = p.presenting_graph();
  auto past = long_walk(g, true);
  auto future = long_walk(g, false);
  std::set<Vertex> start, end;
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    if (past[v]) start.insert(v);
    if (future[v]) end.insert(v);
  }
  std::set<Word> out;
  for (const auto& w : all_words(p.alphabet().size(), n)) {
    for (auto v : read(g, start, w))
      if (end.count(v)) {
        out.insert(w);
        break;
      }
  }
  return out;
}

/// True iff w^inf is the label of a bi-infinite walk: some vertex returns to
/// itself reading w^k, k <= |V|.
inline bool periodic_admissible(const LabeledGraph& g, const Word& w) {
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    std::set<Vertex> cur{v};
    for (std::size_t k = 1; k <= g.num_vertices(); ++k) {
      cur = read(g, cur, w);
      if (cur.count(v)) return true;
      if (cur.empty()) break;
    }
  }
  return false;
}

/// Number of points fixed by the n-fold shift.
inline std::size_t periodic_count(const Presentation& p, std::size_t n) {
  std::size_t c = 0;
  for (const auto& w : all_words(p.alphabet().size(), n))
    if (periodic_admissible(p.presenting_graph(), w)) ++c;
  return c;
}

/// Closed walks of length n in a graph (edge sequences), by enumeration.
inline std::size_t closed_walks(const LabeledGraph& g, std::size_t n) {
  std::size_t total = 0;
  std::vector<std::pair<Vertex, Vertex>> frontier;  // (start, current)
  for (Vertex v = 0; v < g.num_vertices(); ++v) frontier.emplace_back(v, v);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<Vertex, Vertex>> next;
    for (auto [s, v] : frontier)
      for (auto e : g.out(v)) next.emplace_back(s, g.edge(e).trg);
    frontier = std::move(next);
  }
  for (auto [s, v] : frontier) total += s == v;
  return total;
}

inline bool has_factor(const std::vector<std::uint32_t>& text, const std::vector<std::uint32_t>& pat) {
  if (pat.size() > text.size()) return false;
  for (std::size_t i = 0; i + pat.size() <= text.size(); ++i)
    if (std::equal(pat.begin(), pat.end(), text.begin() + static_cast<std::ptrdiff_t>(i))) return true;
  return false;
}

/// Label words of length n readable from a set of vertices of a graph.
inline std::set<Word> follower_language(const LabeledGraph& g, std::size_t sigma, Vertex v, std::size_t n) {
  std::set<Word> out;
  for (const auto& w : all_words(sigma, n))
    if (!read(g, {v}, w).empty()) out.insert(w);
  return out;
}

}  // namespace oracle

#pragma once

// Alphabets, words, labeled graphs and finite presentations of subshifts,
// together with the JSON presentation format.

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sofic/core.hpp"

namespace sofic {

/// Ordered finite set of symbol tokens. Declaration order is the total order
/// used by every lexicographic construction downstream.
class Alphabet {
 public:
  Alphabet() = default;

  explicit Alphabet(std::vector<std::string> symbols) : tokens_(std::move(symbols)) {
    if (tokens_.empty()) throw Error("empty_alphabet", "alphabet must be nonempty");
    for (Symbol i = 0; i < tokens_.size(); ++i) {
      if (tokens_[i].empty()) throw Error("malformed_document", "empty symbol token");
      if (!index_.emplace(tokens_[i], i).second)
        throw Error("malformed_document", "duplicate symbol '" + tokens_[i] + "'");
    }
  }

  std::size_t size() const noexcept { return tokens_.size(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const std::string& token(Symbol s) const { return tokens_.at(s); }

  std::optional<Symbol> find(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  Symbol at(const std::string& token) const {
    auto s = find(token);
    if (!s) throw Error("undeclared_label", "symbol '" + token + "' is not in the alphabet");
    return *s;
  }

  /// Splits a string into symbols. Whitespace-separated input is read token
  /// by token; otherwise tokens are matched greedily by longest match.
  Word parse_word(const std::string& text) const {
    Word w;
    if (text.find_first_of(" \t\n\r") != std::string::npos) {
      std::size_t i = 0;
      while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        if (j > i) w.push_back(at(text.substr(i, j - i)));
        i = j;
      }
      return w;
    }
    std::size_t i = 0;
    while (i < text.size()) {
      std::size_t best = 0;
      Symbol best_sym = 0;
      for (Symbol s = 0; s < tokens_.size(); ++s) {
        const auto& t = tokens_[s];
        if (t.size() > best && text.compare(i, t.size(), t) == 0) {
          best = t.size();
          best_sym = s;
        }
      }
      if (best == 0)
        throw Error("undeclared_label", "cannot tokenize '" + text.substr(i) + "'");
      w.push_back(best_sym);
      i += best;
    }
    return w;
  }

  std::string format(std::span<const Symbol> w, const std::string& sep = "") const {
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i && !sep.empty()) out += sep;
      out += token(w[i]);
    }
    return out;
  }

  bool operator==(const Alphabet& o) const { return tokens_ == o.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, Symbol> index_;
};

struct Edge {
  Vertex src = 0;
  Vertex trg = 0;
  Symbol label = 0;

  bool operator==(const Edge&) const = default;
};

/// Finite directed graph with labeled edges. Vertices are 0..n-1 with names;
/// edge ids are positions in edges().
class LabeledGraph {
 public:
  LabeledGraph() = default;

  explicit LabeledGraph(std::vector<std::string> vertex_names)
      : names_(std::move(vertex_names)), out_(names_.size()), in_(names_.size()) {
    for (Vertex v = 0; v < names_.size(); ++v)
      if (!index_.emplace(names_[v], v).second)
        throw Error("malformed_document", "duplicate vertex '" + names_[v] + "'");
  }

  EdgeId add_edge(Vertex src, Vertex trg, Symbol label) {
    if (src >= names_.size() || trg >= names_.size())
      throw Error("undeclared_vertex", "edge endpoint out of range");
    auto id = static_cast<EdgeId>(edges_.size());
    edges_.push_back({src, trg, label});
    out_[src].push_back(id);
    in_[trg].push_back(id);
    return id;
  }

  std::size_t num_vertices() const noexcept { return names_.size(); }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_.at(e); }
  const std::vector<std::string>& vertex_names() const noexcept { return names_; }
  const std::string& name(Vertex v) const { return names_.at(v); }

  std::span<const EdgeId> out(Vertex v) const { return out_.at(v); }
  std::span<const EdgeId> in(Vertex v) const { return in_.at(v); }

  std::optional<Vertex> find_vertex(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Out-edge of v carrying the label, for right-resolving graphs.
  std::optional<EdgeId> out_edge(Vertex v, Symbol label) const {
    for (auto e : out_[v])
      if (edges_[e].label == label) return e;
    return std::nullopt;
  }

  /// Label word of a path.
  Word labels(std::span<const EdgeId> path) const {
    Word w;
    w.reserve(path.size());
    for (auto e : path) w.push_back(edges_.at(e).label);
    return w;
  }

  bool is_path(std::span<const EdgeId> path) const {
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (path[i] >= edges_.size()) return false;
      if (i && edges_[path[i - 1]].trg != edges_[path[i]].src) return false;
    }
    return true;
  }

  bool operator==(const LabeledGraph& o) const {
    return names_ == o.names_ && edges_ == o.edges_;
  }

 private:
  std::vector<std::string> names_;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> out_;
  std::vector<std::vector<EdgeId>> in_;
  std::unordered_map<std::string, Vertex> index_;
};

/// Returns (vertex, label) pairs where two out-edges share a label; empty iff
/// the graph is right-resolving.
inline std::vector<std::pair<Vertex, Symbol>> right_resolving_violations(const LabeledGraph& g) {
  std::vector<std::pair<Vertex, Symbol>> bad;
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    std::set<Symbol> seen;
    for (auto e : g.out(v))
      if (!seen.insert(g.edge(e).label).second) bad.emplace_back(v, g.edge(e).label);
  }
  return bad;
}

inline std::vector<std::pair<Vertex, Symbol>> left_resolving_violations(const LabeledGraph& g) {
  std::vector<std::pair<Vertex, Symbol>> bad;
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    std::set<Symbol> seen;
    for (auto e : g.in(v))
      if (!seen.insert(g.edge(e).label).second) bad.emplace_back(v, g.edge(e).label);
  }
  return bad;
}

/// Result of removing stranded vertices (no in-edge or no out-edge), repeated
/// until every remaining vertex lies on a bi-infinite path.
struct TrimResult {
  LabeledGraph graph;
  std::vector<Vertex> kept;     // new vertex -> old vertex
  std::vector<Vertex> removed;  // old vertices that were stranded
};

inline TrimResult trim_essential(const LabeledGraph& g) {
  const auto n = g.num_vertices();
  std::vector<bool> alive(n, true);
  std::vector<std::size_t> indeg(n, 0), outdeg(n, 0);
  for (const auto& e : g.edges()) {
    ++outdeg[e.src];
    ++indeg[e.trg];
  }
  std::vector<Vertex> stack;
  for (Vertex v = 0; v < n; ++v)
    if (indeg[v] == 0 || outdeg[v] == 0) stack.push_back(v);
  while (!stack.empty()) {
    Vertex v = stack.back();
    stack.pop_back();
    if (!alive[v]) continue;
    alive[v] = false;
    for (auto e : g.out(v)) {
      auto t = g.edge(e).trg;
      if (alive[t] && t != v && --indeg[t] == 0) stack.push_back(t);
    }
    for (auto e : g.in(v)) {
      auto s = g.edge(e).src;
      if (alive[s] && s != v && --outdeg[s] == 0) stack.push_back(s);
    }
  }
  TrimResult r;
  std::vector<std::string> names;
  std::vector<Vertex> remap(n, 0);
  for (Vertex v = 0; v < n; ++v) {
    if (alive[v]) {
      remap[v] = static_cast<Vertex>(r.kept.size());
      r.kept.push_back(v);
      names.push_back(g.name(v));
    } else {
      r.removed.push_back(v);
    }
  }
  r.graph = LabeledGraph(std::move(names));
  for (const auto& e : g.edges())
    if (alive[e.src] && alive[e.trg]) r.graph.add_edge(remap[e.src], remap[e.trg], e.label);
  return r;
}

using Matrix = std::vector<std::vector<std::uint64_t>>;

/// Entry (u, v) is the number of edges u -> v.
inline Matrix adjacency_matrix(const LabeledGraph& g) {
  Matrix a(g.num_vertices(), std::vector<std::uint64_t>(g.num_vertices(), 0));
  for (const auto& e : g.edges()) ++a[e.src][e.trg];
  return a;
}

enum class Kind { EdgeShift, LabeledSofic, Forbidden };

inline std::string to_string(Kind k) {
  switch (k) {
    case Kind::EdgeShift: return "edge-shift";
    case Kind::LabeledSofic: return "labeled-sofic";
    case Kind::Forbidden: return "forbidden";
  }
  return "?";
}

/// A finite description of a subshift: a labeled graph whose bi-infinite label
/// sequences are the points, an edge shift, or a forbidden-word SFT.
class Presentation {
 public:
  Presentation(Kind kind, Alphabet alphabet, LabeledGraph graph)
      : kind_(kind), alphabet_(std::move(alphabet)), graph_(std::move(graph)) {
    if (kind_ == Kind::Forbidden)
      throw Error("malformed_document", "forbidden kind needs a word list");
    for (const auto& e : graph_.edges())
      if (e.label >= alphabet_.size()) throw Error("undeclared_label", "edge label out of range");
    if (kind_ == Kind::EdgeShift) {
      std::set<Symbol> seen;
      for (const auto& e : graph_.edges())
        if (!seen.insert(e.label).second)
          throw Error("malformed_document",
                      "edge-shift edges must carry distinct names, '" +
                          alphabet_.token(e.label) + "' repeats");
    }
    presenting_ = graph_;
  }

  Presentation(Alphabet alphabet, std::vector<Word> forbidden)
      : kind_(Kind::Forbidden), alphabet_(std::move(alphabet)), forbidden_(std::move(forbidden)) {
    for (const auto& w : forbidden_) {
      if (w.empty()) throw Error("malformed_document", "empty forbidden word");
      for (auto s : w)
        if (s >= alphabet_.size()) throw Error("undeclared_label", "forbidden symbol out of range");
    }
    presenting_ = compile_forbidden();
  }

  Kind kind() const noexcept { return kind_; }
  const Alphabet& alphabet() const noexcept { return alphabet_; }

  /// The declared graph (graph kinds only).
  const LabeledGraph& graph() const noexcept { return graph_; }
  const std::vector<Word>& forbidden() const noexcept { return forbidden_; }

  /// Labeled graph whose bi-infinite label sequences are exactly the points.
  /// For forbidden-word SFTs this is the graph of admissible (m-1)-blocks.
  const LabeledGraph& presenting_graph() const noexcept { return presenting_; }

  /// Longest forbidden word length (0 when none).
  std::size_t memory() const {
    std::size_t m = 0;
    for (const auto& w : forbidden_) m = std::max(m, w.size());
    return m;
  }

  bool operator==(const Presentation& o) const {
    return kind_ == o.kind_ && alphabet_ == o.alphabet_ && graph_ == o.graph_ &&
           forbidden_ == o.forbidden_;
  }

 private:
  bool block_ok(const Word& w) const {
    for (const auto& f : forbidden_)
      if (f.size() <= w.size() && std::search(w.begin(), w.end(), f.begin(), f.end()) != w.end())
        return false;
    return true;
  }

  LabeledGraph compile_forbidden() const {
    const std::size_t m = memory();
    const std::size_t k = m > 1 ? m - 1 : 0;
    const std::size_t sigma = alphabet_.size();
    // enumerate admissible k-blocks in lexicographic order
    std::vector<Word> blocks;
    Word cur(k, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == k) {
        blocks.push_back(cur);
        return;
      }
      for (Symbol s = 0; s < sigma; ++s) {
        cur[i] = s;
        Word prefix(cur.begin(), cur.begin() + static_cast<std::ptrdiff_t>(i + 1));
        if (block_ok(prefix)) rec(i + 1);
      }
    };
    rec(0);
    std::map<Word, Vertex> index;
    std::vector<std::string> names;
    for (const auto& b : blocks) {
      index.emplace(b, static_cast<Vertex>(names.size()));
      names.push_back(k == 0 ? std::string("*") : alphabet_.format(b, k > 1 ? "" : ""));
    }
    // multi-character tokens could make formatted names collide
    std::set<std::string> uniq(names.begin(), names.end());
    if (uniq.size() != names.size())
      for (std::size_t i = 0; i < names.size(); ++i) names[i] = alphabet_.format(blocks[i], ".");
    LabeledGraph g(std::move(names));
    for (const auto& b : blocks) {
      for (Symbol s = 0; s < sigma; ++s) {
        Word ext = b;
        ext.push_back(s);
        if (!block_ok(ext)) continue;
        Word next(ext.begin() + 1, ext.end());
        auto it = index.find(next);
        if (it == index.end()) continue;
        g.add_edge(index.at(b), it->second, s);
      }
    }
    return g;
  }

  Kind kind_;
  Alphabet alphabet_;
  LabeledGraph graph_;
  std::vector<Word> forbidden_;
  LabeledGraph presenting_;
};

/// Parses the JSON presentation document. Unknown fields are rejected.
/// `extra_allowed` lists additional top-level keys tolerated by callers that
/// embed presentations in larger documents (e.g. "back_map" for covers).
inline Presentation presentation_from_json(const json& doc,
                                           const std::set<std::string>& extra_allowed = {}) {
  if (!doc.is_object()) throw Error("malformed_document", "presentation must be a JSON object");
  static const std::set<std::string> known{"alphabet", "kind", "vertices", "edges", "forbidden"};
  for (const auto& [key, _] : doc.items())
    if (!known.count(key) && !extra_allowed.count(key))
      throw Error("malformed_document", "unknown field '" + key + "'");
  if (!doc.contains("alphabet") || !doc["alphabet"].is_array())
    throw Error("malformed_document", "missing 'alphabet' array");
  if (!doc.contains("kind") || !doc["kind"].is_string())
    throw Error("malformed_document", "missing 'kind'");
  std::vector<std::string> tokens;
  for (const auto& t : doc["alphabet"]) {
    if (!t.is_string()) throw Error("malformed_document", "symbols must be strings");
    tokens.push_back(t.get<std::string>());
  }
  Alphabet alphabet(std::move(tokens));
  const auto kind = doc["kind"].get<std::string>();

  if (kind == "forbidden") {
    if (doc.contains("vertices") || doc.contains("edges"))
      throw Error("malformed_document", "forbidden kind takes no vertices/edges");
    if (!doc.contains("forbidden") || !doc["forbidden"].is_array())
      throw Error("malformed_document", "missing 'forbidden' array");
    std::vector<Word> words;
    for (const auto& w : doc["forbidden"]) {
      if (!w.is_string()) throw Error("malformed_document", "forbidden words must be strings");
      words.push_back(alphabet.parse_word(w.get<std::string>()));
    }
    return Presentation(std::move(alphabet), std::move(words));
  }

  Kind k;
  if (kind == "labeled-sofic")
    k = Kind::LabeledSofic;
  else if (kind == "edge-shift")
    k = Kind::EdgeShift;
  else
    throw Error("malformed_document", "unknown kind '" + kind + "'");
  if (doc.contains("forbidden")) throw Error("malformed_document", "graph kinds take no 'forbidden'");
  if (!doc.contains("vertices") || !doc["vertices"].is_array() || !doc.contains("edges") ||
      !doc["edges"].is_array())
    throw Error("malformed_document", "graph kinds need 'vertices' and 'edges' arrays");
  std::vector<std::string> names;
  for (const auto& v : doc["vertices"]) {
    if (!v.is_string()) throw Error("malformed_document", "vertex names must be strings");
    names.push_back(v.get<std::string>());
  }
  LabeledGraph g(std::move(names));
  for (const auto& e : doc["edges"]) {
    if (!e.is_object()) throw Error("malformed_document", "edge must be an object");
    for (const auto& [key, _] : e.items())
      if (key != "src" && key != "trg" && key != "label")
        throw Error("malformed_document", "unknown edge field '" + key + "'");
    if (!e.contains("src") || !e.contains("trg") || !e.contains("label") || !e["src"].is_string() ||
        !e["trg"].is_string() || !e["label"].is_string())
      throw Error("malformed_document", "edge needs string src, trg, label");
    auto s = g.find_vertex(e["src"].get<std::string>());
    auto t = g.find_vertex(e["trg"].get<std::string>());
    if (!s || !t)
      throw Error("undeclared_vertex", "edge references undeclared vertex '" +
                                           (s ? e["trg"] : e["src"]).get<std::string>() + "'");
    g.add_edge(*s, *t, alphabet.at(e["label"].get<std::string>()));
  }
  return Presentation(k, std::move(alphabet), std::move(g));
}

inline Presentation parse_presentation(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error("malformed_document", std::string("invalid JSON: ") + e.what());
  }
  return presentation_from_json(doc);
}

inline json graph_to_json(const Alphabet& a, const LabeledGraph& g, Kind kind) {
  json doc;
  doc["alphabet"] = a.tokens();
  doc["kind"] = to_string(kind);
  doc["vertices"] = g.vertex_names();
  json edges = json::array();
  for (const auto& e : g.edges()) {
    json je;
    je["src"] = g.name(e.src);
    je["trg"] = g.name(e.trg);
    je["label"] = a.token(e.label);
    edges.push_back(std::move(je));
  }
  doc["edges"] = std::move(edges);
  return doc;
}

inline json to_json(const Presentation& p) {
  if (p.kind() != Kind::Forbidden) return graph_to_json(p.alphabet(), p.graph(), p.kind());
  json doc;
  doc["alphabet"] = p.alphabet().tokens();
  doc["kind"] = "forbidden";
  json words = json::array();
  // multi-character tokens are written space-separated so they re-tokenize exactly
  bool multi = false;
  for (const auto& t : p.alphabet().tokens()) multi = multi || t.size() > 1;
  for (const auto& w : p.forbidden()) {
    auto s = p.alphabet().format(w, multi ? " " : "");
    if (multi && w.size() == 1) s += " ";
    words.push_back(s);
  }
  doc["forbidden"] = std::move(words);
  return doc;
}

inline std::string serialize(const Presentation& p) { return to_json(p).dump(2); }

/// Structural diagnostics of the input presentation; never throws.
inline Report validate(const Presentation& p) {
  Report r;
  r.subject = "presentation";
  const auto& g = p.presenting_graph();
  auto trimmed = trim_essential(g);
  json stranded = json::array();
  for (auto v : trimmed.removed) stranded.push_back(g.name(v));
  r.add("essential", trimmed.removed.empty(), json{{"stranded", stranded}}, false);
  r.add("nonempty", trimmed.graph.num_vertices() > 0,
        json{{"essential_vertices", trimmed.graph.num_vertices()}});
  auto bad = right_resolving_violations(g);
  json w = json::array();
  for (auto [v, s] : bad) w.push_back(json{{"vertex", g.name(v)}, {"label", p.alphabet().token(s)}});
  r.add("right_resolving", bad.empty(), json{{"violations", w}}, false);
  return r;
}

}  // namespace sofic

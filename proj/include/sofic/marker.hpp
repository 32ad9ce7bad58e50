#pragma once

// Marker path, connectors, indices over paths avoiding the marker, the block
// length and the payload injections.

#include <functional>
#include <map>
#include <queue>
#include <tuple>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sofic/invariants.hpp"

namespace sofic {

/// Knuth-Morris-Pratt automaton of an edge path. State s in [0, L] is the
/// length of the longest suffix of the input that is a prefix of the pattern;
/// state L means an occurrence just ended.
class EdgeMatcher {
 public:
  EdgeMatcher() = default;

  explicit EdgeMatcher(EdgePath pattern) : pattern_(std::move(pattern)) {
    const auto n = pattern_.size();
    fail_.assign(n + 1, 0);
    for (std::size_t i = 1, k = 0; i < n; ++i) {
      while (k > 0 && pattern_[i] != pattern_[k]) k = fail_[k];
      if (pattern_[i] == pattern_[k]) ++k;
      fail_[i + 1] = k;
    }
  }

  std::size_t length() const noexcept { return pattern_.size(); }
  const EdgePath& pattern() const noexcept { return pattern_; }

  std::size_t step(std::size_t s, EdgeId e) const {
    if (s == pattern_.size()) s = fail_[s];
    while (s > 0 && pattern_[s] != e) s = fail_[s];
    if (pattern_[s] == e) ++s;
    return s;
  }

  /// State after reading a path, or nullopt if an occurrence completes on the
  /// way (the final step included).
  std::optional<std::size_t> run_safe(std::size_t s, std::span<const EdgeId> path) const {
    for (auto e : path) {
      s = step(s, e);
      if (s == pattern_.size()) return std::nullopt;
    }
    return s;
  }

  /// End positions (exclusive) of all occurrences in a path.
  std::vector<std::size_t> occurrences(std::span<const EdgeId> path) const {
    std::vector<std::size_t> out;
    std::size_t s = 0;
    for (std::size_t i = 0; i < path.size(); ++i) {
      s = step(s, path[i]);
      if (s == pattern_.size()) out.push_back(i + 1);
    }
    return out;
  }

 private:
  EdgePath pattern_;
  std::vector<std::size_t> fail_;
};

/// True iff no proper nonempty prefix of p equals a suffix of p.
inline bool is_border_free(std::span<const EdgeId> p) {
  for (std::size_t k = 1; k < p.size(); ++k)
    if (std::equal(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(k),
                   p.end() - static_cast<std::ptrdiff_t>(k)))
      return false;
  return true;
}

struct MarkerPath {
  EdgePath edges;
  Word label;
  bool border_free = false;
  bool synchronizing = false;
  // a = prefix . unit^repeats; pumping increments repeats
  std::string construction;
  EdgePath prefix;
  EdgePath unit;
  std::size_t repeats = 0;

  std::size_t length() const noexcept { return edges.size(); }
};

namespace detail {

inline MarkerPath assemble_marker(const FischerCover& c, std::string how, EdgePath prefix, EdgePath unit,
                                  std::size_t repeats) {
  MarkerPath m;
  m.construction = std::move(how);
  m.prefix = std::move(prefix);
  m.unit = std::move(unit);
  m.repeats = repeats;
  m.edges = m.prefix;
  for (std::size_t i = 0; i < repeats; ++i) m.edges.insert(m.edges.end(), m.unit.begin(), m.unit.end());
  m.label = c.labels(m.edges);
  m.border_free = is_border_free(m.edges);
  m.synchronizing = !m.label.empty() && c.image(m.label).size() == 1;
  return m;
}

/// Shortest path (edge-id order on ties) from u to v, possibly empty.
inline std::optional<EdgePath> shortest_path(const LabeledGraph& g, Vertex u, Vertex v) {
  std::vector<std::optional<EdgePath>> best(g.num_vertices());
  best[u] = EdgePath{};
  std::queue<Vertex> q;
  q.push(u);
  while (!q.empty()) {
    auto x = q.front();
    q.pop();
    if (x == v) return best[x];
    for (auto e : g.out(x)) {
      auto t = g.edge(e).trg;
      if (best[t]) continue;
      best[t] = *best[x];
      best[t]->push_back(e);
      q.push(t);
    }
  }
  return std::nullopt;
}

/// Shortest path that starts with `first`, ends with the two edges
/// `first, last`, and whose label is synchronizing.
inline std::optional<EdgePath> synchronizing_return(const FischerCover& c, EdgeId first, EdgeId last) {
  const auto& g = c.graph();
  using Key = std::pair<std::vector<Vertex>, EdgeId>;
  std::map<Key, EdgePath> seen;
  std::queue<Key> q;
  auto start_img = c.image(Word{g.edge(first).label});
  Key k0{start_img, first};
  seen.emplace(k0, EdgePath{first});
  q.push(k0);
  while (!q.empty()) {
    auto key = q.front();
    q.pop();
    const auto path = seen.at(key);
    if (key.second == first) {
      auto img = key.first;
      std::set<Vertex> next;
      for (auto v : img)
        if (auto t = c.step(v, g.edge(last).label)) next.insert(*t);
      if (next.size() == 1) {
        auto out = path;
        out.push_back(last);
        return out;
      }
    }
    for (auto e : g.out(g.edge(key.second).trg)) {
      std::set<Vertex> next;
      for (auto v : key.first)
        if (auto t = c.step(v, g.edge(e).label)) next.insert(*t);
      Key nk{{next.begin(), next.end()}, e};
      if (seen.count(nk)) continue;
      auto p = path;
      p.push_back(e);
      seen.emplace(nk, std::move(p));
      q.push(nk);
    }
  }
  return std::nullopt;
}

/// Shortest border-free path with synchronizing label, by breadth-first
/// enumeration of paths up to a length bound.
inline std::optional<EdgePath> generic_marker_search(const FischerCover& c, std::size_t max_length,
                                                     std::size_t max_visits) {
  const auto& g = c.graph();
  std::vector<EdgePath> layer;
  for (EdgeId e = 0; e < g.num_edges(); ++e) layer.push_back({e});
  std::size_t visits = 0;
  for (std::size_t len = 1; len <= max_length && !layer.empty(); ++len) {
    for (const auto& p : layer) {
      if (++visits > max_visits) return std::nullopt;
      if (is_border_free(p) && c.image(c.labels(p)).size() == 1) return p;
    }
    std::vector<EdgePath> next;
    for (const auto& p : layer)
      for (auto e : g.out(g.edge(p.back()).trg)) {
        auto q = p;
        q.push_back(e);
        next.push_back(std::move(q));
      }
    layer = std::move(next);
  }
  return std::nullopt;
}

}  // namespace detail

/// Marker path a with no proper prefix equal to a suffix and a synchronizing
/// label. If some loop alpha has an entering edge beta != alpha, a = b alpha^|b|
/// with b the shortest path from beta ending in beta alpha with synchronizing
/// label. Otherwise a = alpha c (alpha b)^m for an edge alpha with two
/// continuations beta, gamma, with the least m making both properties hold.
inline MarkerPath build_marker(const FischerCover& c, std::size_t max_repeats = 64) {
  const auto& g = c.graph();
  if (g.num_edges() < 2) throw Error("degenerate_cover", "cover has fewer than two edges");

  for (EdgeId alpha = 0; alpha < g.num_edges(); ++alpha) {
    const auto& ea = g.edge(alpha);
    if (ea.src != ea.trg) continue;
    for (auto beta : g.in(ea.src)) {
      if (beta == alpha) continue;
      auto b = detail::synchronizing_return(c, beta, alpha);
      if (!b) continue;
      auto m = detail::assemble_marker(c, "loop", *b, EdgePath{alpha}, b->size());
      if (m.border_free && m.synchronizing) return m;
    }
  }

  for (EdgeId alpha = 0; alpha < g.num_edges(); ++alpha) {
    const auto& ea = g.edge(alpha);
    std::vector<EdgeId> next;
    for (auto e : g.out(ea.trg))
      if (e != alpha) next.push_back(e);
    for (std::size_t i = 0; i < next.size(); ++i)
      for (std::size_t j = 0; j < next.size(); ++j) {
        if (i == j) continue;
        auto beta = next[i], gamma = next[j];
        auto tb = detail::shortest_path(g, g.edge(beta).trg, ea.src);
        auto tc = detail::shortest_path(g, g.edge(gamma).trg, ea.src);
        if (!tb || !tc) continue;
        EdgePath ab{alpha, beta}, ac{alpha, gamma};
        ab.insert(ab.end(), tb->begin(), tb->end());
        ac.insert(ac.end(), tc->begin(), tc->end());
        for (std::size_t r = 1; r <= max_repeats; ++r) {
          auto m = detail::assemble_marker(c, "branch", ac, ab, r);
          if (m.border_free && m.synchronizing) return m;
        }
      }
  }

  if (auto p = detail::generic_marker_search(c, 24, 2000000)) {
    auto m = detail::assemble_marker(c, "search", *p, EdgePath{}, 0);
    return m;
  }
  throw Error("marker_not_found", "no marker path within the search bound");
}

/// Lengthens a by repeating its terminal unit until both properties hold again.
inline MarkerPath pump_marker(const FischerCover& c, const MarkerPath& a, std::size_t max_steps = 64) {
  if (a.unit.empty()) throw Error("marker_not_pumpable", "marker has no repeatable unit");
  for (std::size_t r = a.repeats + 1; r <= a.repeats + max_steps; ++r) {
    auto m = detail::assemble_marker(c, a.construction, a.prefix, a.unit, r);
    if (m.border_free && m.synchronizing) return m;
  }
  throw Error("marker_not_pumpable", "pumping did not preserve the marker properties");
}

/// Connector paths of a common length K. A connector from U, read from any
/// matcher state a path ending at U can produce, never completes the marker
/// and always ends in the same matcher state (its reset state).
struct ConnectorTable {
  std::size_t K = 0;
  std::vector<std::vector<EdgePath>> table;        // [U][W]
  std::vector<std::vector<std::size_t>> reset;     // matcher state after table[U][W]

  const EdgePath& at(Vertex u, Vertex w) const { return table.at(u).at(w); }
  std::size_t reset_state(Vertex u, Vertex w) const { return reset.at(u).at(w); }
};

namespace detail {

inline std::optional<std::pair<EdgePath, std::size_t>> find_connector(const LabeledGraph& g,
                                                                      const EdgeMatcher& m, Vertex u,
                                                                      Vertex w, std::size_t k) {
  const auto L = m.length();
  // matcher states a path ending at u can leave behind
  std::vector<std::size_t> start{0};
  for (std::size_t s = 1; s < L; ++s)
    if (g.edge(m.pattern()[s - 1]).trg == u) start.push_back(s);
  std::set<std::tuple<Vertex, std::vector<std::size_t>, std::size_t>> dead;
  EdgePath path;
  std::optional<std::size_t> result;
  std::function<bool(Vertex, const std::vector<std::size_t>&, std::size_t)> go =
      [&](Vertex v, const std::vector<std::size_t>& states, std::size_t left) -> bool {
    if (left == 0) {
      if (v != w) return false;
      for (auto s : states)
        if (s != states[0]) return false;
      result = states[0];
      return true;
    }
    auto key = std::make_tuple(v, states, left);
    if (dead.count(key)) return false;
    for (auto e : g.out(v)) {
      std::vector<std::size_t> next(states.size());
      bool ok = true;
      for (std::size_t i = 0; i < states.size() && ok; ++i) {
        next[i] = m.step(states[i], e);
        ok = next[i] < L;
      }
      if (!ok) continue;
      path.push_back(e);
      if (go(g.edge(e).trg, next, left - 1)) return true;
      path.pop_back();
    }
    dead.insert(key);
    return false;
  };
  if (!go(u, start, k)) return std::nullopt;
  return std::make_pair(path, *result);
}

}  // namespace detail

/// Lexicographically least connectors of the least common length K >= 1.
inline ConnectorTable build_connectors(const FischerCover& c, const EdgeMatcher& m, std::size_t max_k = 64) {
  const auto& g = c.graph();
  const auto n = g.num_vertices();
  for (std::size_t k = 1; k <= max_k; ++k) {
    ConnectorTable t;
    t.K = k;
    t.table.assign(n, std::vector<EdgePath>(n));
    t.reset.assign(n, std::vector<std::size_t>(n, 0));
    bool all = true;
    for (Vertex u = 0; u < n && all; ++u)
      for (Vertex w = 0; w < n && all; ++w) {
        auto found = detail::find_connector(g, m, u, w, k);
        if (!found) {
          all = false;
          break;
        }
        t.table[u][w] = std::move(found->first);
        t.reset[u][w] = found->second;
      }
    if (all) return t;
  }
  throw Error("connector_search_exhausted", "no uniform connector length up to " + std::to_string(max_k));
}

/// Rank/unrank over paths avoiding the marker. The first edge leaving vertex
/// u starts the matcher in start_state[u]; the plain index starts every path
/// in state 0 and counts D_n(a).
class AvoidanceIndex {
 public:
  AvoidanceIndex() = default;

  AvoidanceIndex(const LabeledGraph& g, const EdgeMatcher& m, std::vector<std::size_t> start_state,
                 std::size_t max_length)
      : start_state_(std::move(start_state)) {
    const auto L = m.length();
    const auto n = g.num_vertices();
    DetGraph d;
    d.sigma = g.num_edges();
    d.next.assign(1 + n * L, std::vector<std::int32_t>(d.sigma, kNone));
    auto id = [L](Vertex v, std::size_t s) { return static_cast<std::int32_t>(1 + v * L + s); };
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
      const auto& ed = g.edge(e);
      auto s = m.step(start_state_.at(ed.src), e);
      if (s < L) d.next[0][e] = id(ed.trg, s);
      for (std::size_t t = 0; t < L; ++t) {
        auto s2 = m.step(t, e);
        if (s2 < L) d.next[static_cast<std::size_t>(id(ed.src, t))][e] = id(ed.trg, s2);
      }
    }
    table_ = RankTable(std::move(d), 0, max_length);
  }

  static AvoidanceIndex plain(const LabeledGraph& g, const EdgeMatcher& m, std::size_t max_length) {
    return AvoidanceIndex(g, m, std::vector<std::size_t>(g.num_vertices(), 0), max_length);
  }

  std::size_t max_length() const noexcept { return table_.max_length(); }
  Count count(std::size_t n) const { return table_.count(n); }
  bool contains(std::span<const EdgeId> p) const { return table_.contains(p); }

  Count rank(std::span<const EdgeId> p) const {
    if (!table_.contains(p)) throw Error("inadmissible_path", "path is not in the avoidance set");
    return table_.rank(p);
  }
  EdgePath unrank(std::size_t n, const Count& i) const { return table_.unrank(n, i); }
  const std::vector<std::size_t>& start_states() const noexcept { return start_state_; }

 private:
  std::vector<std::size_t> start_state_;
  RankTable table_;
};

/// Start states for payloads: a payload from u follows a . c(trg a, u).
inline std::vector<std::size_t> payload_start_states(const FischerCover& c, const MarkerPath& a,
                                                     const ConnectorTable& t) {
  std::vector<std::size_t> out(c.num_vertices());
  const auto after = c.graph().edge(a.edges.back()).trg;
  for (Vertex u = 0; u < c.num_vertices(); ++u) out[u] = t.reset_state(after, u);
  return out;
}

struct Certificate {
  std::size_t l = 0;
  Count x_words;
  Count payloads;
};

struct BlockLengthChoice {
  std::size_t ell = 0;
  std::size_t L = 0;
  std::size_t K = 0;
  std::vector<Certificate> certificates;  // l = ell .. 4 ell

  std::size_t pay(std::size_t l) const { return l - L - 2 * K; }
};

/// Least ell > 2(L+K) with card L_l(X) <= payload count at pay(l) for every l
/// in [ell, 4 ell]; nullopt if none up to max_ell.
inline std::optional<BlockLengthChoice> select_block_length(const LanguageIndex& x,
                                                            const AvoidanceIndex& payload, std::size_t L,
                                                            std::size_t K, std::size_t max_ell) {
  for (std::size_t ell = 2 * (L + K) + 1; ell <= max_ell; ++ell) {
    if (4 * ell > x.max_length() || 4 * ell - L - 2 * K > payload.max_length())
      throw Error("length_out_of_range", "indices too short for block length search");
    BlockLengthChoice b;
    b.ell = ell;
    b.L = L;
    b.K = K;
    bool ok = true;
    for (std::size_t l = ell; l <= 4 * ell && ok; ++l) {
      Certificate cert{l, x.count(l), payload.count(l - L - 2 * K)};
      ok = cert.x_words <= cert.payloads;
      b.certificates.push_back(std::move(cert));
    }
    if (ok) return b;
  }
  return std::nullopt;
}

/// Everything the codec needs about markers and payloads.
struct MarkerKit {
  MarkerPath marker;
  EdgeMatcher matcher;
  ConnectorTable connectors;
  BlockLengthChoice block;
  std::size_t pumps = 0;
  LanguageIndex x_index;
  AvoidanceIndex payload;

  std::size_t L() const { return marker.length(); }
  std::size_t K() const { return connectors.K; }
  std::size_t ell() const { return block.ell; }
};

struct MarkerOptions {
  std::size_t max_ell = 200;
  std::size_t max_pumps = 8;
  std::size_t max_k = 32;
  double tol = 1e-12;
};

inline MarkerKit build_marker_kit(const Presentation& x, const FischerCover& y, const MarkerOptions& opt = {}) {
  auto hx = entropy_any(x, opt.tol);
  auto hy = entropy(y, opt.tol);
  if (!(hy.value - hx.value > 1e-9))
    throw Error("precondition_failed", "entropy of X (" + std::to_string(hx.value) +
                                           ") is not below entropy of Y (" + std::to_string(hy.value) + ")");
  auto marker = build_marker(y);
  for (std::size_t pumps = 0;; ++pumps) {
    EdgeMatcher matcher(marker.edges);
    std::optional<ConnectorTable> found;
    try {
      found = build_connectors(y, matcher, opt.max_k);
    } catch (const Error& e) {
      if (e.name() != "connector_search_exhausted" || pumps == opt.max_pumps) throw;
      marker = pump_marker(y, marker);
      continue;
    }
    auto conn = std::move(*found);
    const auto L = marker.length(), K = conn.K;
    const auto top = 4 * opt.max_ell;
    LanguageIndex xi(x, top);
    AvoidanceIndex payload(y.graph(), matcher, payload_start_states(y, marker, conn), top);
    if (auto b = select_block_length(xi, payload, L, K, opt.max_ell)) {
      // shrink the tables to what the codec uses
      LanguageIndex xs(x, 4 * b->ell);
      AvoidanceIndex ps(y.graph(), matcher, payload.start_states(), b->pay(4 * b->ell));
      return MarkerKit{marker, matcher, std::move(conn), std::move(*b), pumps, std::move(xs), std::move(ps)};
    }
    if (pumps == opt.max_pumps)
      throw Error("search_bound_exhausted", "no block length up to " + std::to_string(opt.max_ell) +
                                                " (h_x=" + std::to_string(hx.value) +
                                                ", h_y=" + std::to_string(hy.value) + ")");
    marker = pump_marker(y, marker);
  }
}

/// Payload injection for a word of X of length l in [ell, 4 ell].
inline EdgePath xi_encode(const MarkerKit& k, std::span<const Symbol> w) {
  const auto l = w.size();
  if (l < k.ell() || l > 4 * k.ell()) throw Error("length_out_of_range", "block length outside [ell, 4 ell]");
  auto r = k.x_index.rank(w);
  return k.payload.unrank(k.block.pay(l), r);
}

/// Inverse of xi_encode on its image; "not_in_image" otherwise.
inline Word xi_decode(const MarkerKit& k, std::size_t l, std::span<const EdgeId> p) {
  if (l < k.ell() || l > 4 * k.ell()) throw Error("length_out_of_range", "block length outside [ell, 4 ell]");
  if (p.size() != k.block.pay(l)) throw Error("wrong_length", "payload length does not match block length");
  if (!k.payload.contains(p)) throw Error("not_in_image", "payload path is not in the avoidance set");
  auto r = k.payload.rank(p);
  if (r >= k.x_index.count(l)) throw Error("not_in_image", "payload rank exceeds the word count");
  return k.x_index.unrank(l, r);
}

}  // namespace sofic

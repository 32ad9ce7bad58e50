#pragma once

// Periodic orbits as Lyndon words, and the injective matching of periodic
// orbits of X to marker-free periodic cover orbits of Y.

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sofic/marker.hpp"

namespace sofic {

/// Start index of the lexicographically least rotation (first one on ties).
inline std::size_t least_rotation(std::span<const Symbol> w) {
  const auto n = w.size();
  std::size_t best = 0;
  for (std::size_t k = 1; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      auto a = w[(k + i) % n], b = w[(best + i) % n];
      if (a != b) {
        if (a < b) best = k;
        break;
      }
    }
  return best;
}

inline Word rotate(std::span<const Symbol> w, std::size_t k) {
  Word out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[(i + k) % w.size()];
  return out;
}

inline std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  auto r = a % m;
  return r < 0 ? r + m : r;
}

/// A periodic sequence z_c = base[(c - phase) mod |base|] with base a Lyndon
/// word (primitive, least among its rotations).
struct PeriodicPattern {
  Word base;
  std::int64_t phase = 0;

  Symbol at(std::int64_t c) const {
    return base[static_cast<std::size_t>(floor_mod(c - phase, static_cast<std::int64_t>(base.size())))];
  }
};

/// The periodic pattern of a window of length 2*ell starting at coordinate
/// `start`, if it has a period <= ell.
inline std::optional<PeriodicPattern> periodic_pattern(std::span<const Symbol> window, std::int64_t start,
                                                       std::size_t ell) {
  auto q = word_period(window, ell);
  if (!q) return std::nullopt;
  std::span<const Symbol> u = window.first(*q);
  auto k = least_rotation(u);
  PeriodicPattern p;
  p.base = rotate(u, k);
  p.phase = floor_mod(start + static_cast<std::int64_t>(k), static_cast<std::int64_t>(*q));
  return p;
}

/// Lyndon words of length n over sigma symbols in lexicographic order
/// (Fredricksen-Kessler-Maiorana), descending only into prefixes the tracker
/// accepts. Tracker: bool push(Symbol), void pop(). emit returns false to stop.
template <class Tracker, class Emit>
void for_each_lyndon(std::size_t sigma, std::size_t n, Tracker& tracker, Emit&& emit) {
  if (n == 0) return;
  Word a(n + 1, 0);
  bool stop = false;
  std::function<void(std::size_t, std::size_t)> gen = [&](std::size_t t, std::size_t p) {
    if (stop) return;
    if (t > n) {
      if (p == n && !emit(Word(a.begin() + 1, a.end()))) stop = true;
      return;
    }
    for (Symbol j = a[t - p]; j < sigma && !stop; ++j) {
      a[t] = j;
      if (!tracker.push(j)) continue;
      gen(t + 1, j == a[t - p] ? p : t);
      tracker.pop();
    }
  };
  gen(1, 1);
}

namespace detail {

/// Prefix tracker over a deterministic automaton: viable iff readable.
struct LanguageTracker {
  const DetGraph* d;
  std::vector<std::int32_t> stack;

  bool push(Symbol s) {
    auto q = d->step(stack.back(), s);
    if (q == kNone) return false;
    stack.push_back(q);
    return true;
  }
  void pop() { stack.pop_back(); }
};

/// Product of the cover with the marker matcher restricted to states short of
/// a full occurrence. Node (v, s) has id v * L + s.
struct SafeProduct {
  std::size_t L = 0;
  std::size_t size = 0;
  std::vector<std::vector<std::int32_t>> next;  // [node][symbol]
  std::vector<std::vector<std::vector<bool>>> reach;  // [r][from][to], exactly r steps

  SafeProduct(const FischerCover& c, const EdgeMatcher& m, std::size_t max_r) {
    L = m.length();
    size = c.num_vertices() * L;
    next.assign(size, std::vector<std::int32_t>(c.alphabet().size(), kNone));
    for (Vertex v = 0; v < c.num_vertices(); ++v)
      for (std::size_t s = 0; s < L; ++s)
        for (auto e : c.graph().out(v)) {
          auto t = m.step(s, e);
          if (t < L) next[v * L + s][c.graph().edge(e).label] = static_cast<std::int32_t>(c.graph().edge(e).trg * L + t);
        }
    reach.assign(max_r + 1, std::vector<std::vector<bool>>(size, std::vector<bool>(size, false)));
    for (std::size_t x = 0; x < size; ++x) reach[0][x][x] = true;
    for (std::size_t r = 1; r <= max_r; ++r)
      for (std::size_t x = 0; x < size; ++x)
        for (auto y : next[x])
          if (y != kNone)
            for (std::size_t z = 0; z < size; ++z)
              if (reach[r - 1][static_cast<std::size_t>(y)][z]) reach[r][x][z] = true;
  }
};

/// Prefix tracker for label words with a closed marker-free lift of length n.
struct LiftTracker {
  const SafeProduct* h;
  std::size_t n;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> stack;  // (start, current)

  bool push(Symbol s) {
    const auto len = stack.size();  // symbols read after this push
    std::vector<std::pair<std::size_t, std::size_t>> next;
    for (auto [st, cur] : stack.back()) {
      auto t = h->next[cur][s];
      if (t == kNone) continue;
      if (!h->reach[n - len][static_cast<std::size_t>(t)][st]) continue;
      next.emplace_back(st, static_cast<std::size_t>(t));
    }
    if (next.empty()) return false;
    stack.push_back(std::move(next));
    return true;
  }
  void pop() { stack.pop_back(); }
};

}  // namespace detail

struct OrbitPair {
  std::size_t n = 0;
  Word from;       // Lyndon word of the X orbit
  EdgePath to;     // cover cycle whose label is a Lyndon word
  Word to_label;
  std::int64_t phase = 0;  // coordinate offset between the two base points
};

/// Injective, least-period preserving map from periodic X orbits of least
/// period n <= ell to marker-free periodic cover orbits.
class OrbitMatch {
 public:
  OrbitMatch() = default;

  explicit OrbitMatch(std::vector<OrbitPair> pairs) : pairs_(std::move(pairs)) { reindex(); }

  const std::vector<OrbitPair>& pairs() const noexcept { return pairs_; }

  const OrbitPair* by_source(const Word& lyndon) const {
    auto it = from_.find(lyndon);
    return it == from_.end() ? nullptr : &pairs_[it->second];
  }

  const OrbitPair* by_target_label(const Word& lyndon) const {
    auto it = to_.find(lyndon);
    return it == to_.end() ? nullptr : &pairs_[it->second];
  }

 private:
  void reindex() {
    from_.clear();
    to_.clear();
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
      from_.emplace(pairs_[i].from, i);
      // first pair wins if a (corrupted) match reuses a target
      to_.emplace(pairs_[i].to_label, i);
    }
  }

  std::vector<OrbitPair> pairs_;
  std::map<Word, std::size_t> from_;
  std::map<Word, std::size_t> to_;
};

/// True iff the cycle, entered at any of its vertices right after any
/// connector, never completes the marker.
inline bool connector_compatible(const FischerCover& c, const MarkerKit& k, const EdgePath& cycle) {
  const auto n = cycle.size();
  std::set<std::pair<std::size_t, std::size_t>> tried;  // (phase, start state)
  for (std::size_t ph = 0; ph < n; ++ph) {
    const auto v = c.graph().edge(cycle[ph]).src;
    for (Vertex u = 0; u < c.num_vertices(); ++u) {
      auto s = k.connectors.reset_state(u, v);
      if (!tried.emplace(ph, s).second) continue;
      for (std::size_t i = 0; i < n + k.L(); ++i) {
        s = k.matcher.step(s, cycle[(ph + i) % n]);
        if (s == k.L()) return false;
      }
    }
  }
  return true;
}

/// Greedy matching in lexicographic order: the i-th X orbit of least period n
/// goes to the i-th eligible target. Error "insufficient_targets" names n.
inline OrbitMatch match_periodic_orbits(const Presentation& x, const FischerCover& y, const MarkerKit& k) {
  const auto ell = k.ell();
  auto xd = language_automaton(x).dfa;
  auto xr = right_resolving_presentation(x);
  detail::SafeProduct h(y, k.matcher, ell);
  std::vector<OrbitPair> pairs;

  for (std::size_t n = 1; n <= ell; ++n) {
    std::vector<Word> sources;
    if (xd.size()) {
      detail::LanguageTracker t{&xd, {0}};
      for_each_lyndon(x.alphabet().size(), n, t, [&](const Word& w) {
        if (!stable_image(xr, w).empty()) sources.push_back(w);
        return true;
      });
    }
    if (sources.empty()) continue;

    std::vector<std::pair<Word, EdgePath>> targets;
    detail::LiftTracker lt{&h, n, {}};
    std::vector<std::pair<std::size_t, std::size_t>> init;
    for (Vertex v = 0; v < y.num_vertices(); ++v)
      for (std::size_t s = 0; s < k.L(); ++s)
        if (s == 0 || y.graph().edge(k.marker.edges[s - 1]).trg == v) init.emplace_back(v * k.L() + s, v * k.L() + s);
    lt.stack.push_back(init);
    for_each_lyndon(y.alphabet().size(), n, lt, [&](const Word& w) {
      std::set<Vertex> starts;
      for (auto [st, cur] : lt.stack.back())
        if (st == cur) starts.insert(static_cast<Vertex>(st / k.L()));
      for (auto v : starts) {
        auto cycle = y.lift(v, w);
        if (cycle && connector_compatible(y, k, *cycle)) {
          targets.emplace_back(w, *cycle);
          break;
        }
      }
      return targets.size() < sources.size();
    });
    if (targets.size() < sources.size())
      throw Error("insufficient_targets", "period " + std::to_string(n) + ": " + std::to_string(sources.size()) +
                                              " orbits of X but only " + std::to_string(targets.size()) +
                                              " eligible cover orbits");
    for (std::size_t i = 0; i < sources.size(); ++i)
      pairs.push_back(OrbitPair{n, sources[i], targets[i].second, targets[i].first, 0});
  }
  return OrbitMatch(std::move(pairs));
}

}  // namespace sofic

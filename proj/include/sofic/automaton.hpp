#pragma once

// Deterministic labeled graphs: subset construction, partition refinement,
// strongly connected components and the period of a graph.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <queue>
#include <vector>

#include "sofic/presentation.hpp"

namespace sofic {

inline constexpr std::int32_t kNone = -1;

/// Partial deterministic transition table: next[state][symbol], kNone if
/// undefined. Every state is accepting.
struct DetGraph {
  std::size_t sigma = 0;
  std::vector<std::vector<std::int32_t>> next;

  std::size_t size() const noexcept { return next.size(); }

  std::int32_t step(std::int32_t q, Symbol s) const {
    return q == kNone ? kNone : next[static_cast<std::size_t>(q)][s];
  }

  std::int32_t run(std::int32_t q, std::span<const Symbol> w) const {
    for (auto s : w) {
      q = step(q, s);
      if (q == kNone) break;
    }
    return q;
  }
};

struct SubsetAutomaton {
  DetGraph dfa;
  std::vector<std::vector<Vertex>> subsets;  // state -> sorted vertex set
};

/// Subset construction over a labeled graph starting from `initial`, in
/// breadth-first discovery order (symbols in alphabet order). State 0 is the
/// initial subset.
inline SubsetAutomaton determinize(const LabeledGraph& g, std::size_t sigma,
                                   std::vector<Vertex> initial) {
  std::sort(initial.begin(), initial.end());
  initial.erase(std::unique(initial.begin(), initial.end()), initial.end());
  SubsetAutomaton out;
  out.dfa.sigma = sigma;
  std::map<std::vector<Vertex>, std::int32_t> index;
  std::queue<std::int32_t> queue;
  auto intern = [&](std::vector<Vertex> s) {
    auto [it, fresh] = index.emplace(s, static_cast<std::int32_t>(out.subsets.size()));
    if (fresh) {
      out.subsets.push_back(std::move(s));
      out.dfa.next.emplace_back(sigma, kNone);
      queue.push(it->second);
    }
    return it->second;
  };
  if (initial.empty()) return out;
  intern(initial);
  while (!queue.empty()) {
    auto q = queue.front();
    queue.pop();
    std::vector<std::vector<Vertex>> image(sigma);
    for (auto v : out.subsets[static_cast<std::size_t>(q)])
      for (auto e : g.out(v)) image[g.edge(e).label].push_back(g.edge(e).trg);
    for (Symbol s = 0; s < sigma; ++s) {
      auto& t = image[s];
      if (t.empty()) continue;
      std::sort(t.begin(), t.end());
      t.erase(std::unique(t.begin(), t.end()), t.end());
      auto id = intern(std::move(t));
      out.dfa.next[static_cast<std::size_t>(q)][s] = id;
    }
  }
  return out;
}

/// Deterministic graph of a right-resolving labeled graph (vertex = state).
inline DetGraph as_det_graph(const LabeledGraph& g, std::size_t sigma) {
  DetGraph d;
  d.sigma = sigma;
  d.next.assign(g.num_vertices(), std::vector<std::int32_t>(sigma, kNone));
  for (const auto& e : g.edges()) {
    auto& slot = d.next[e.src][e.label];
    if (slot != kNone) throw Error("not_right_resolving", "graph is not right-resolving");
    slot = static_cast<std::int32_t>(e.trg);
  }
  return d;
}

struct Partition {
  std::vector<std::size_t> block;  // state -> block id
  std::size_t blocks = 0;
  std::size_t rounds = 0;  // refinement rounds until stable (separation depth)
};

/// Coarsest partition into states with equal follower languages (missing
/// transitions reject). Block ids are assigned in order of first state.
inline Partition follower_partition(const DetGraph& d) {
  const auto n = d.size();
  Partition p;
  p.block.assign(n, 0);
  p.blocks = n ? 1 : 0;
  for (;;) {
    std::map<std::vector<std::int64_t>, std::size_t> sig;
    std::vector<std::size_t> nb(n);
    for (std::size_t q = 0; q < n; ++q) {
      std::vector<std::int64_t> key{static_cast<std::int64_t>(p.block[q])};
      for (Symbol s = 0; s < d.sigma; ++s) {
        auto t = d.next[q][s];
        key.push_back(t == kNone ? -1 : static_cast<std::int64_t>(p.block[static_cast<std::size_t>(t)]));
      }
      auto [it, _] = sig.emplace(std::move(key), sig.size());
      nb[q] = it->second;
    }
    // renumber by first occurrence for determinism
    std::vector<std::size_t> ren(sig.size(), SIZE_MAX);
    std::size_t next_id = 0;
    for (std::size_t q = 0; q < n; ++q) {
      if (ren[nb[q]] == SIZE_MAX) ren[nb[q]] = next_id++;
      nb[q] = ren[nb[q]];
    }
    if (next_id == p.blocks) {
      p.block = std::move(nb);
      return p;
    }
    p.block = std::move(nb);
    p.blocks = next_id;
    ++p.rounds;
  }
}

/// Tarjan SCC on an adjacency list; components numbered in reverse
/// topological order of the condensation (sinks first).
inline std::vector<std::size_t> strongly_connected_components(
    const std::vector<std::vector<std::size_t>>& adj, std::size_t* count = nullptr) {
  const auto n = adj.size();
  std::vector<std::size_t> comp(n, SIZE_MAX), low(n), idx(n, SIZE_MAX);
  std::vector<bool> on(n, false);
  std::vector<std::size_t> stack;
  std::size_t counter = 0, ncomp = 0;
  // iterative Tarjan
  struct Frame {
    std::size_t v, i;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (idx[root] != SIZE_MAX) continue;
    std::vector<Frame> call{{root, 0}};
    idx[root] = low[root] = counter++;
    stack.push_back(root);
    on[root] = true;
    while (!call.empty()) {
      auto& f = call.back();
      if (f.i < adj[f.v].size()) {
        auto w = adj[f.v][f.i++];
        if (idx[w] == SIZE_MAX) {
          idx[w] = low[w] = counter++;
          stack.push_back(w);
          on[w] = true;
          call.push_back({w, 0});
        } else if (on[w]) {
          low[f.v] = std::min(low[f.v], idx[w]);
        }
      } else {
        auto v = f.v;
        call.pop_back();
        if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
        if (low[v] == idx[v]) {
          for (;;) {
            auto w = stack.back();
            stack.pop_back();
            on[w] = false;
            comp[w] = ncomp;
            if (w == v) break;
          }
          ++ncomp;
        }
      }
    }
  }
  if (count) *count = ncomp;
  return comp;
}

inline std::vector<std::vector<std::size_t>> adjacency_list(const LabeledGraph& g) {
  std::vector<std::vector<std::size_t>> adj(g.num_vertices());
  for (const auto& e : g.edges()) adj[e.src].push_back(e.trg);
  return adj;
}

inline std::vector<std::vector<std::size_t>> adjacency_list(const DetGraph& d) {
  std::vector<std::vector<std::size_t>> adj(d.size());
  for (std::size_t q = 0; q < d.size(); ++q)
    for (auto t : d.next[q])
      if (t != kNone) adj[q].push_back(static_cast<std::size_t>(t));
  return adj;
}

/// gcd of all cycle lengths of a strongly connected graph (0 if acyclic),
/// computed from BFS levels: gcd over edges u->v of level(u)+1-level(v).
inline std::size_t graph_period(const std::vector<std::vector<std::size_t>>& adj) {
  const auto n = adj.size();
  if (n == 0) return 0;
  std::vector<std::int64_t> level(n, -1);
  std::queue<std::size_t> q;
  level[0] = 0;
  q.push(0);
  std::int64_t g = 0;
  while (!q.empty()) {
    auto u = q.front();
    q.pop();
    for (auto v : adj[u]) {
      if (level[v] < 0) {
        level[v] = level[u] + 1;
        q.push(v);
      } else {
        g = std::gcd(g, std::llabs(level[u] + 1 - level[v]));
      }
    }
  }
  return static_cast<std::size_t>(g);
}

}  // namespace sofic

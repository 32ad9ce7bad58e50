#pragma once

// Exact periodic-point counting on deterministic labeled graphs.
//
// For a right-resolving presentation with transition map d, the number of
// words w of length n with w^inf in the shift is
//     sum_k (-1)^(k+1) tr((A_k)^n)
// where A_k acts on k-element vertex subsets, with entry sign(pi) whenever a
// symbol maps the subset bijectively (pi is the induced permutation).

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "sofic/automaton.hpp"

namespace sofic {

using BigMatrix = std::vector<std::vector<Count>>;

inline BigMatrix multiply(const BigMatrix& a, const BigMatrix& b) {
  const auto n = a.size();
  const auto m = b.empty() ? 0 : b[0].size();
  BigMatrix c(n, std::vector<Count>(m, Count(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < m; ++j)
        if (b[k][j] != 0) c[i][j] += a[i][k] * b[k][j];
    }
  return c;
}

/// tr(A^n) for n = 1..max_n (index 0 unused, set to dimension).
inline std::vector<Count> trace_powers(const BigMatrix& a, std::size_t max_n) {
  std::vector<Count> out(max_n + 1, Count(0));
  out[0] = static_cast<long long>(a.size());
  if (a.empty()) return out;
  BigMatrix p = a;
  for (std::size_t n = 1; n <= max_n; ++n) {
    Count t = 0;
    for (std::size_t i = 0; i < p.size(); ++i) t += p[i][i];
    out[n] = t;
    if (n < max_n) p = multiply(p, a);
  }
  return out;
}

inline BigMatrix to_big(const Matrix& a) {
  BigMatrix b(a.size(), std::vector<Count>(a.size(), Count(0)));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) b[i][j] = a[i][j];
  return b;
}

namespace detail {

inline void k_subsets(std::size_t n, std::size_t k, std::size_t from, std::vector<std::int32_t>& cur,
                      std::vector<std::vector<std::int32_t>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t v = from; v < n; ++v) {
    cur.push_back(static_cast<std::int32_t>(v));
    k_subsets(n, k, v + 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

/// Number of points of period n (fixed by the n-fold shift), n = 1..max_n,
/// for the shift presented by a right-resolving deterministic graph whose
/// states all lie on bi-infinite paths.
inline std::vector<Count> periodic_counts_right_resolving(const DetGraph& d, std::size_t max_n) {
  std::vector<Count> total(max_n + 1, Count(0));
  const auto n = d.size();
  constexpr std::size_t kMaxSubsetStates = 4096;
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<std::vector<std::int32_t>> subsets;
    std::vector<std::int32_t> cur;
    detail::k_subsets(n, k, 0, cur, subsets);
    if (subsets.size() > kMaxSubsetStates)
      throw Error("resource_bound", "subset matrix too large for periodic count");
    std::map<std::vector<std::int32_t>, std::size_t> index;
    for (std::size_t i = 0; i < subsets.size(); ++i) index.emplace(subsets[i], i);
    BigMatrix a(subsets.size(), std::vector<Count>(subsets.size(), Count(0)));
    bool any = false;
    for (std::size_t i = 0; i < subsets.size(); ++i) {
      for (Symbol s = 0; s < d.sigma; ++s) {
        std::vector<std::int32_t> img;
        bool ok = true;
        for (auto v : subsets[i]) {
          auto t = d.next[static_cast<std::size_t>(v)][s];
          if (t == kNone) {
            ok = false;
            break;
          }
          img.push_back(t);
        }
        if (!ok) continue;
        auto sorted = img;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) continue;
        // parity of the permutation i -> position of img[i] in sorted order
        std::size_t inversions = 0;
        for (std::size_t x = 0; x < img.size(); ++x)
          for (std::size_t y = x + 1; y < img.size(); ++y)
            if (img[x] > img[y]) ++inversions;
        a[i][index.at(sorted)] += (inversions % 2 ? -1 : 1);
        any = true;
      }
    }
    if (!any) continue;
    auto tr = trace_powers(a, max_n);
    for (std::size_t m = 1; m <= max_n; ++m) {
      if (k % 2 == 1)
        total[m] += tr[m];
      else
        total[m] -= tr[m];
    }
  }
  return total;
}

/// Number of words w of length n admitting a vertex v with run(v, w) == v,
/// n = 1..max_n, by inclusion-exclusion over vertex sets S of the number of
/// words fixing every vertex of S.
inline std::vector<Count> closed_lift_word_counts(const DetGraph& d, std::size_t max_n) {
  const auto n = d.size();
  if (n > 16) throw Error("resource_bound", "too many cover vertices for lift counting");
  std::vector<Count> total(max_n + 1, Count(0));
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<std::int32_t> start;
    for (std::size_t v = 0; v < n; ++v)
      if (mask & (1u << v)) start.push_back(static_cast<std::int32_t>(v));
    // walk on tuples reachable from `start`; count words returning to it
    std::map<std::vector<std::int32_t>, Count> layer{{start, Count(1)}};
    const bool odd = start.size() % 2 == 1;
    for (std::size_t m = 1; m <= max_n; ++m) {
      std::map<std::vector<std::int32_t>, Count> next;
      for (const auto& [tuple, c] : layer)
        for (Symbol s = 0; s < d.sigma; ++s) {
          std::vector<std::int32_t> t(tuple.size());
          bool ok = true;
          for (std::size_t i = 0; i < tuple.size() && ok; ++i) {
            t[i] = d.next[static_cast<std::size_t>(tuple[i])][s];
            ok = t[i] != kNone;
          }
          if (ok) next[t] += c;
        }
      layer = std::move(next);
      auto it = layer.find(start);
      if (it != layer.end()) {
        if (odd)
          total[m] += it->second;
        else
          total[m] -= it->second;
      }
      if (layer.empty()) break;
    }
  }
  return total;
}

/// Eventual image of the full state set under repeated reading of w. The
/// result is nonempty iff w^inf is a point of the presented shift, and w then
/// permutes it.
inline std::vector<std::int32_t> stable_image(const DetGraph& d, std::span<const Symbol> w) {
  std::vector<std::int32_t> cur(d.size());
  for (std::size_t v = 0; v < d.size(); ++v) cur[v] = static_cast<std::int32_t>(v);
  for (;;) {
    std::vector<std::int32_t> img;
    for (auto v : cur) {
      auto t = d.run(v, w);
      if (t != kNone) img.push_back(t);
    }
    std::sort(img.begin(), img.end());
    img.erase(std::unique(img.begin(), img.end()), img.end());
    if (img == cur) return cur;
    cur = std::move(img);
    if (cur.empty()) return cur;
  }
}

/// Möbius function.
inline int moebius(std::size_t n) {
  int mu = 1;
  for (std::size_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    mu = -mu;
  }
  if (n > 1) mu = -mu;
  return mu;
}

/// Orbit counts of least period n from fixed-point counts P_1..P_N.
inline std::vector<Count> orbit_counts(const std::vector<Count>& fixed) {
  std::vector<Count> orbits(fixed.size(), Count(0));
  for (std::size_t n = 1; n < fixed.size(); ++n) {
    Count s = 0;
    for (std::size_t d = 1; d <= n; ++d)
      if (n % d == 0) s += moebius(n / d) * fixed[d];
    if (s % n != 0 || s < 0)
      throw Error("inconsistent_census", "Moebius inversion produced a non-integer orbit count");
    orbits[n] = s / n;
  }
  return orbits;
}

/// Least period of a word read cyclically.
inline std::size_t cyclic_least_period(std::span<const Symbol> w) {
  const auto n = w.size();
  for (std::size_t p = 1; p <= n; ++p) {
    if (n % p) continue;
    bool ok = true;
    for (std::size_t i = 0; i + p < n && ok; ++i) ok = w[i] == w[i + p];
    if (ok) return p;
  }
  return n;
}

}  // namespace sofic

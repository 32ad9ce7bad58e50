#pragma once

// Periodic-point census, topological entropy and the embedding precondition.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sofic/fischer.hpp"

namespace sofic {

struct PeriodicCensus {
  std::size_t max_n = 0;
  std::vector<Count> points;       // points[n] = card P_n, index 0 unused
  std::vector<Count> orbits;       // orbits[n] = orbits of least period n
  std::vector<Count> cover_paths;  // closed cover paths of length n (empty if no cover)
  std::string method;

  json to_json() const {
    json j;
    j["max_n"] = max_n;
    j["method"] = method;
    json p = json::array(), o = json::array(), c = json::array();
    for (std::size_t n = 1; n <= max_n; ++n) {
      p.push_back(points[n].str());
      o.push_back(orbits[n].str());
      if (!cover_paths.empty()) c.push_back(cover_paths[n].str());
    }
    j["points"] = p;
    j["orbits"] = o;
    if (!cover_paths.empty()) j["cover_paths"] = c;
    return j;
  }
};

/// Right-resolving essential presentation of any presentation's shift: the
/// subset automaton of the language, trimmed to its essential part.
inline DetGraph right_resolving_presentation(const Presentation& p) {
  auto sa = language_automaton(p);
  std::vector<std::string> names;
  for (std::size_t q = 0; q < sa.dfa.size(); ++q) names.push_back(std::to_string(q));
  LabeledGraph g(names);
  for (std::size_t q = 0; q < sa.dfa.size(); ++q)
    for (Symbol s = 0; s < sa.dfa.sigma; ++s)
      if (auto t = sa.dfa.next[q][s]; t != kNone) g.add_edge(static_cast<Vertex>(q), static_cast<Vertex>(t), s);
  return as_det_graph(trim_essential(g).graph, p.alphabet().size());
}

inline PeriodicCensus periodic_census(const Presentation& p, std::size_t max_n) {
  if (max_n == 0) throw Error("invalid_argument", "census bound must be >= 1");
  PeriodicCensus c;
  c.max_n = max_n;
  if (p.kind() == Kind::LabeledSofic) {
    std::optional<FischerCover> cover;
    try {
      cover = build_fischer_cover(p);
    } catch (const Error& e) {
      if (e.name() != "reducible_presentation") throw;
    }
    if (cover) {
      c.points = periodic_counts_right_resolving(cover->delta(), max_n);
      c.cover_paths = trace_powers(to_big(adjacency_matrix(cover->graph())), max_n);
      c.method = "signed-subset-trace(cover)";
    } else {
      c.points = periodic_counts_right_resolving(right_resolving_presentation(p), max_n);
      c.method = "signed-subset-trace(subset-automaton)";
    }
  } else {
    // edge shifts and compiled block graphs: points correspond to closed paths
    c.points = trace_powers(to_big(adjacency_matrix(p.presenting_graph())), max_n);
    c.cover_paths = c.points;
    c.method = "trace";
  }
  c.points[0] = 0;
  if (!c.cover_paths.empty()) c.cover_paths[0] = 0;
  c.orbits = orbit_counts(c.points);
  return c;
}

struct EntropyEstimate {
  double value = 0;
  double residual = 0;
  std::size_t iterations = 0;

  json to_json() const {
    return json{{"value", value}, {"units", "nats"}, {"residual", residual}, {"iterations", iterations}};
  }
};

/// log of the Perron eigenvalue of an irreducible nonnegative matrix, by power
/// iteration from the all-ones vector. The Collatz-Wielandt bracket
/// [min (Av)_i/v_i, max (Av)_i/v_i] contains the eigenvalue; the residual is
/// the log-width of the bracket. Non-primitive matrices are iterated as A^p.
inline EntropyEstimate perron_log(const Matrix& a, double tol, std::size_t period = 1,
                                  std::size_t max_iterations = 1000000) {
  const auto n = a.size();
  if (n == 0) throw Error("empty_language", "empty matrix");
  std::vector<std::vector<double>> m(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i][j] = static_cast<double>(a[i][j]);
  auto apply = [&](const std::vector<double>& v) {
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out[i] += m[i][j] * v[j];
    return out;
  };
  std::vector<double> v(n, 1.0);
  EntropyEstimate e;
  for (e.iterations = 1; e.iterations <= max_iterations; ++e.iterations) {
    auto w = v;
    for (std::size_t k = 0; k < period; ++k) w = apply(w);
    double lo = INFINITY, hi = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = w[i] / v[i];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    if (lo <= 0) throw Error("not_irreducible", "matrix is not irreducible");
    e.residual = (std::log(hi) - std::log(lo)) / static_cast<double>(period);
    e.value = (std::log(hi) + std::log(lo)) / (2.0 * static_cast<double>(period));
    if (e.residual <= tol) return e;
    double norm = 0;
    for (auto x : w) norm = std::max(norm, x);
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
  }
  throw Error("no_convergence", "power iteration did not reach the tolerance");
}

inline EntropyEstimate entropy(const FischerCover& cover, double tol = 1e-12) {
  auto adj = adjacency_list(cover.graph());
  auto period = std::max<std::size_t>(1, graph_period(adj));
  return perron_log(adjacency_matrix(cover.graph()), tol, period);
}

/// Entropy of an irreducible presentation, computed on its Fischer cover.
inline EntropyEstimate entropy(const Presentation& p, double tol = 1e-12) {
  try {
    return entropy(build_fischer_cover(p), tol);
  } catch (const Error& e) {
    if (e.name() == "reducible_presentation") throw Error("not_irreducible", e.what());
    throw;
  }
}

/// Entropy of any presentation: maximum over the strongly connected
/// components of a right-resolving presentation.
inline EntropyEstimate entropy_any(const Presentation& p, double tol = 1e-12) {
  auto d = right_resolving_presentation(p);
  std::size_t ncomp = 0;
  auto comp = strongly_connected_components(adjacency_list(d), &ncomp);
  EntropyEstimate best;
  for (std::size_t k = 0; k < ncomp; ++k) {
    std::vector<std::size_t> members;
    for (std::size_t q = 0; q < d.size(); ++q)
      if (comp[q] == k) members.push_back(q);
    Matrix a(members.size(), std::vector<std::uint64_t>(members.size(), 0));
    std::vector<std::vector<std::size_t>> adj(members.size());
    bool has_edge = false;
    for (std::size_t i = 0; i < members.size(); ++i)
      for (auto t : d.next[members[i]]) {
        if (t == kNone || comp[static_cast<std::size_t>(t)] != k) continue;
        auto j = static_cast<std::size_t>(std::find(members.begin(), members.end(), t) - members.begin());
        ++a[i][j];
        adj[i].push_back(j);
        has_edge = true;
      }
    if (!has_edge) continue;
    auto e = perron_log(a, tol, std::max<std::size_t>(1, graph_period(adj)));
    if (e.value > best.value || best.iterations == 0) best = e;
  }
  if (best.iterations == 0) throw Error("empty_language", "presentation has no points");
  return best;
}

/// Hypotheses of the embedding theorem for X into Y, each as a verdict.
inline Report embeddability_precondition(const Presentation& x, const Presentation& y, std::size_t max_n,
                                         double tol = 1e-12, double margin = 1e-9) {
  Report r;
  r.subject = "embeddability_precondition";

  std::optional<FischerCover> cover;
  try {
    cover = build_fischer_cover(y);
    r.add("y_irreducible", true);
  } catch (const Error& e) {
    r.add("y_irreducible", false, json{{"error", e.name()}, {"detail", e.what()}});
  }

  auto hx = entropy_any(x, tol);
  std::optional<EntropyEstimate> hy;
  if (cover) hy = entropy(*cover, tol);
  json ew{{"h_x", hx.value}, {"h_y", hy ? json(hy->value) : json(nullptr)}, {"margin", margin}};
  r.add("entropy_strict", hy && hy->value - hx.value > margin, ew);

  auto cx = periodic_census(x, max_n);
  auto cy = periodic_census(y, max_n);
  json rows = json::array();
  std::optional<std::size_t> first_bad;
  for (std::size_t n = 1; n <= max_n; ++n) {
    rows.push_back(json{{"n", n}, {"x", cx.points[n].str()}, {"y", cy.points[n].str()}});
    if (cx.points[n] > cy.points[n] && !first_bad) first_bad = n;
  }
  json pw{{"counts", rows}};
  if (first_bad) pw["first_violation"] = *first_bad;
  r.add("periodic_counts", !first_bad, pw);

  if (cover) {
    auto s = structural_report(*cover);
    for (const auto& v : s.verdicts) r.add("y_" + v.name, v.pass, v.witness, v.required);
    auto lift = lift_hypothesis_check(*cover, max_n);
    json failed = json::array();
    for (const auto& v : lift.verdicts)
      if (!v.pass) failed.push_back(v.witness);
    r.add("lift_hypothesis", lift.pass(), json{{"max_n", max_n}, {"failures", failed}});
  }
  return r;
}

}  // namespace sofic

#include <gtest/gtest.h>

#include <cmath>

#include "oracle.hpp"
#include "sofic/invariants.hpp"

using namespace sofic;

namespace {

const std::vector<std::string> kCorpus{"golden.json", "full2.json",    "golden_graph.json",
                                       "graph1.json", "even.json",     "single_loop.json",
                                       "loopless.json", "two_state_edge.json", "fixed_point.json"};

}  // namespace

TEST(Census, SpecValues) {
  auto full = periodic_census(oracle::load("full2.json"), 4);
  for (std::size_t n = 1; n <= 4; ++n) EXPECT_EQ(full.points[n], Count(1) << n);
  auto golden = periodic_census(oracle::load("golden.json"), 4);
  EXPECT_EQ(golden.points[1], 1);
  EXPECT_EQ(golden.points[2], 3);
  EXPECT_EQ(golden.points[3], 4);
  EXPECT_EQ(golden.points[4], 7);
  auto loop = periodic_census(oracle::load("single_loop.json"), 5);
  for (std::size_t n = 1; n <= 5; ++n) EXPECT_EQ(loop.points[n], 1);
}

TEST(Census, MatchesBruteForce) {
  for (const auto& name : kCorpus) {
    auto p = oracle::load(name);
    const std::size_t top = p.alphabet().size() > 2 ? 6 : 8;
    auto c = periodic_census(p, top);
    for (std::size_t n = 1; n <= top; ++n) EXPECT_EQ(c.points[n], oracle::periodic_count(p, n)) << name << " n=" << n;
  }
}

TEST(Census, ReducibleSoficUsesSubsetAutomaton) {
  auto p = parse_presentation(R"({"alphabet":["0","1"],"kind":"labeled-sofic","vertices":["A","B"],
      "edges":[{"src":"A","trg":"A","label":"0"},{"src":"A","trg":"B","label":"1"},
               {"src":"B","trg":"B","label":"1"},{"src":"B","trg":"B","label":"0"}]})");
  auto c = periodic_census(p, 7);
  for (std::size_t n = 1; n <= 7; ++n) EXPECT_EQ(c.points[n], oracle::periodic_count(p, n));
}

TEST(Census, TraceIdentityForEdgeShifts) {
  for (const auto& name : {"single_loop.json", "two_state_edge.json", "golden.json", "full2.json"}) {
    auto p = oracle::load(name);
    auto c = periodic_census(p, 10);
    const auto& g = p.presenting_graph();
    auto a = to_big(adjacency_matrix(g));
    auto power = a;
    for (std::size_t n = 1; n <= 10; ++n) {
      Count tr = 0;
      for (std::size_t i = 0; i < power.size(); ++i) tr += power[i][i];
      EXPECT_EQ(c.points[n], tr) << name;
      if (n <= 8) EXPECT_EQ(c.points[n], oracle::closed_walks(g, n)) << name;
      power = multiply(power, a);
    }
  }
}

TEST(Census, CoverPathsCountClosedCoverWalks) {
  auto p = oracle::load("graph1.json");
  auto c = periodic_census(p, 6);
  auto cover = build_fischer_cover(p);
  for (std::size_t n = 1; n <= 6; ++n) EXPECT_EQ(c.cover_paths[n], oracle::closed_walks(cover.graph(), n));
}

TEST(Census, MoebiusConsistency) {
  for (const auto& name : kCorpus) {
    auto c = periodic_census(oracle::load(name), 12);
    for (std::size_t n = 1; n <= 12; ++n) {
      EXPECT_GE(c.orbits[n], 0);
      Count s = 0;
      for (std::size_t d = 1; d <= n; ++d)
        if (n % d == 0) s += c.orbits[d] * d;
      EXPECT_EQ(s, c.points[n]) << name;
    }
  }
}

TEST(Entropy, KnownValues) {
  auto full = entropy(oracle::load("full2.json"));
  EXPECT_NEAR(full.value, std::log(2.0), 1e-9);
  EXPECT_LE(full.residual, 1e-12);
  // root of x^2 = x + 1 by bisection
  double lo = 1, hi = 2;
  for (int i = 0; i < 200; ++i) {
    double mid = (lo + hi) / 2;
    (mid * mid > mid + 1 ? hi : lo) = mid;
  }
  EXPECT_NEAR(entropy(oracle::load("golden.json")).value, std::log(lo), 1e-9);
  EXPECT_NEAR(entropy(oracle::load("golden_graph.json")).value, std::log(lo), 1e-9);
  EXPECT_NEAR(entropy(oracle::load("single_loop.json")).value, 0.0, 1e-12);
  EXPECT_NEAR(entropy(oracle::load("even.json")).value, std::log(lo), 1e-9);
}

TEST(Entropy, PeriodicCover) {
  auto p = parse_presentation(R"({"alphabet":["0","1","2"],"kind":"labeled-sofic","vertices":["A","B"],
      "edges":[{"src":"A","trg":"B","label":"0"},{"src":"A","trg":"B","label":"1"},
               {"src":"B","trg":"A","label":"2"}]})");
  EXPECT_NEAR(entropy(p).value, std::log(2.0) / 2, 1e-9);
}

TEST(Entropy, BoundedByAlphabet) {
  for (const auto& name : kCorpus) {
    auto p = oracle::load(name);
    auto e = entropy(p);
    EXPECT_GE(e.value, -1e-12);
    EXPECT_LE(e.value, std::log(static_cast<double>(p.alphabet().size())) + 1e-12);
  }
}

TEST(Entropy, ReducibleRejected) {
  auto p = parse_presentation(R"({"alphabet":["0","1"],"kind":"labeled-sofic","vertices":["A","B"],
      "edges":[{"src":"A","trg":"A","label":"0"},{"src":"A","trg":"B","label":"1"},
               {"src":"B","trg":"B","label":"1"},{"src":"B","trg":"B","label":"0"}]})");
  try {
    entropy(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.name(), "not_irreducible");
  }
  EXPECT_NEAR(entropy_any(p).value, std::log(2.0), 1e-9);
}

TEST(Entropy, RemovingAnEdgeNeverIncreases) {
  for (const auto& name : {"graph1.json", "two_state_edge.json", "golden_graph.json"}) {
    auto p = oracle::load(name);
    auto h = entropy_any(p).value;
    const auto& g = p.graph();
    for (EdgeId drop = 0; drop < g.num_edges(); ++drop) {
      LabeledGraph h2(g.vertex_names());
      for (EdgeId e = 0; e < g.num_edges(); ++e)
        if (e != drop) h2.add_edge(g.edge(e).src, g.edge(e).trg, g.edge(e).label);
      Presentation q(p.kind(), p.alphabet(), h2);
      if (trim_essential(h2).graph.num_vertices() == 0) continue;
      EXPECT_LE(entropy_any(q).value, h + 1e-12) << name << " drop " << drop;
    }
  }
}

TEST(Entropy, GrowthRateConverges) {
  for (const auto& name : {"golden.json", "graph1.json", "even.json", "two_state_edge.json"}) {
    auto p = oracle::load(name);
    auto h = entropy(p).value;
    LanguageIndex idx(p, 12);
    double prev = INFINITY;
    for (std::size_t n : {8, 10, 12}) {
      double est = std::log(idx.count(n).convert_to<double>()) / static_cast<double>(n);
      double gap = std::abs(h - est);
      EXPECT_LT(gap, prev) << name;
      prev = gap;
    }
  }
}

TEST(Precondition, GoldenIntoFullShiftPasses) {
  auto r = embeddability_precondition(oracle::load("golden.json"), oracle::load("full2.json"), 6);
  EXPECT_TRUE(r.pass()) << r.to_json().dump(2);
  auto x = periodic_census(oracle::load("golden.json"), 6);
  for (std::size_t n = 1; n <= 6; ++n) EXPECT_LE(x.points[n], Count(1) << n);
}

TEST(Precondition, EqualShiftsFailEntropy) {
  auto r = embeddability_precondition(oracle::load("full2.json"), oracle::load("full2.json"), 6);
  EXPECT_FALSE(r.pass());
  EXPECT_FALSE(r.at("entropy_strict").pass);
  EXPECT_TRUE(r.at("periodic_counts").pass);
}

TEST(Precondition, FullShiftIntoGoldenFails) {
  auto r = embeddability_precondition(oracle::load("full2.json"), oracle::load("golden.json"), 6);
  EXPECT_FALSE(r.at("entropy_strict").pass);
  EXPECT_FALSE(r.at("periodic_counts").pass);
  EXPECT_EQ(r.at("periodic_counts").witness["first_violation"], 1);
}

TEST(Precondition, NonAlmostMarkovTargetFails) {
  auto r = embeddability_precondition(oracle::load("fixed_point.json"), oracle::load("graph1.json"), 4);
  EXPECT_TRUE(r.at("entropy_strict").pass);
  EXPECT_FALSE(r.at("y_left_resolving").pass);
  EXPECT_FALSE(r.pass());
}

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracle.hpp"
#include "sofic/embedding.hpp"

using namespace sofic;

namespace {

const EmbeddingCode& golden_code() {
  static const EmbeddingCode code = build_embedding(oracle::load("golden.json"), oracle::load("full2.json"));
  return code;
}

Word random_admissible(const Presentation& p, std::size_t n, std::mt19937_64& rng) {
  LanguageIndex idx(p, n);
  return detail::random_word(idx, n, rng);
}

/// Literal greedy: candidates sorted by (window, position), each accepted
/// unless an accepted one is within ell. Out-of-view windows do not exist.
std::set<std::int64_t> reference_markers(const PointWindow& x, std::size_t ell) {
  const auto e = static_cast<std::int64_t>(ell);
  std::vector<std::pair<Word, std::int64_t>> cands;
  for (auto i = x.begin(); i + 2 * e <= x.end(); ++i) {
    auto w = x.slice(i, i + 2 * e);
    if (!word_period(w, ell)) cands.emplace_back(Word(w.begin(), w.end()), i);
  }
  std::sort(cands.begin(), cands.end());
  std::set<std::int64_t> acc;
  for (const auto& [w, i] : cands) {
    bool near = false;
    for (auto j : acc) near = near || std::abs(j - i) <= e;
    if (!near) acc.insert(i);
  }
  return acc;
}

/// Lyndon words by brute force: primitive and strictly least among rotations.
std::vector<Word> lyndon_brute(std::size_t sigma, std::size_t n) {
  std::vector<Word> out;
  for (const auto& w : oracle::all_words(sigma, n)) {
    bool ok = true;
    for (std::size_t k = 1; k < n && ok; ++k) ok = w < rotate(w, k);
    if (ok) out.push_back(w);
  }
  return out;
}

struct AcceptAll {
  bool push(Symbol) { return true; }
  void pop() {}
};

}  // namespace

TEST(LeastRotation, MatchesBruteForceMinimum) {
  for (const auto& w : oracle::all_words(3, 6)) {
    Word best = w;
    for (std::size_t k = 1; k < w.size(); ++k) best = std::min(best, rotate(w, k));
    EXPECT_EQ(rotate(w, least_rotation(w)), best);
  }
}

TEST(PeriodicPattern, ReproducesWindow) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    std::size_t q = 1 + rng() % 6, ell = 6;
    Word u(q);
    for (auto& s : u) s = static_cast<Symbol>(rng() % 2);
    Word w(2 * ell);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = u[i % q];
    std::int64_t start = static_cast<std::int64_t>(rng() % 100) - 50;
    auto p = periodic_pattern(w, start, ell);
    ASSERT_TRUE(p);
    for (std::size_t i = 0; i < w.size(); ++i) EXPECT_EQ(p->at(start + static_cast<std::int64_t>(i)), w[i]);
    EXPECT_EQ(rotate(p->base, least_rotation(p->base)), p->base);
  }
}

TEST(Lyndon, EnumerationMatchesBruteForce) {
  for (std::size_t sigma = 1; sigma <= 3; ++sigma)
    for (std::size_t n = 1; n <= 7; ++n) {
      AcceptAll t;
      std::vector<Word> got;
      for_each_lyndon(sigma, n, t, [&](const Word& w) {
        got.push_back(w);
        return true;
      });
      EXPECT_EQ(got, lyndon_brute(sigma, n)) << sigma << " " << n;
    }
}

TEST(Lyndon, ConstrainedSourcesMatchOrbitCounts) {
  for (auto name : {"golden.json", "graph1.json", "even.json", "full2.json"}) {
    auto p = oracle::load(name);
    auto d = language_automaton(p).dfa;
    auto r = right_resolving_presentation(p);
    auto census = periodic_census(p, 10);
    for (std::size_t n = 1; n <= 10; ++n) {
      detail::LanguageTracker t{&d, {0}};
      std::size_t count = 0;
      for_each_lyndon(p.alphabet().size(), n, t, [&](const Word& w) {
        if (!stable_image(r, w).empty()) ++count;
        return true;
      });
      EXPECT_EQ(Count(count), census.orbits[n]) << name << " n=" << n;
    }
  }
}

TEST(MarkerSelection, DefinitiveStatusesAgreeWithLiteralGreedy) {
  std::mt19937_64 rng(11);
  for (auto name : {"golden.json", "full2.json", "even.json", "graph1.json"}) {
    auto p = oracle::load(name);
    for (std::size_t ell = 3; ell <= 8; ++ell)
      for (int t = 0; t < 20; ++t) {
        PointWindow x{-7, random_admissible(p, 12 * ell, rng)};
        auto ref = reference_markers(x, ell);
        MarkerSelector sel(x, ell);
        std::size_t decided = 0;
        for (auto i = x.begin(); i < x.end(); ++i) {
          auto s = sel.status(i);
          if (s == MarkerStatus::Selected) EXPECT_TRUE(ref.count(i)) << name << " " << i;
          if (s == MarkerStatus::Rejected || s == MarkerStatus::NotCandidate) EXPECT_FALSE(ref.count(i));
          if (s != MarkerStatus::Unknown) ++decided;
        }
        EXPECT_GT(decided, 0u);
      }
  }
}

TEST(MarkerSelection, SeparationAndCovering) {
  std::mt19937_64 rng(5);
  for (auto name : {"golden.json", "full2.json", "even.json"}) {
    auto p = oracle::load(name);
    for (std::size_t ell = 3; ell <= 8; ++ell)
      for (int t = 0; t < 20; ++t) {
        PointWindow x{0, random_admissible(p, 12 * ell, rng)};
        MarkerSelector sel(x, ell);
        const auto e = static_cast<std::int64_t>(ell);
        std::vector<std::int64_t> acc;
        for (auto i = x.begin(); i < x.end(); ++i)
          if (sel.status(i) == MarkerStatus::Selected) acc.push_back(i);
        for (std::size_t k = 1; k < acc.size(); ++k) EXPECT_GT(acc[k] - acc[k - 1], e);
        for (auto i = x.begin(); i < x.end(); ++i) {
          if (!sel.known(i) || !sel.candidate(i)) continue;
          bool all_known = true, covered = false;
          for (auto j = i - e; j <= i + e; ++j) {
            auto s = sel.status(j);
            all_known = all_known && s != MarkerStatus::Unknown;
            covered = covered || s == MarkerStatus::Selected;
          }
          if (all_known) EXPECT_TRUE(covered) << name << " ell=" << ell << " i=" << i;
        }
      }
  }
}

TEST(MarkerSelection, EqualCandidateWindowsAreFarApart) {
  std::mt19937_64 rng(6);
  for (auto name : {"golden.json", "full2.json", "graph1.json"}) {
    auto p = oracle::load(name);
    for (std::size_t ell = 2; ell <= 8; ++ell)
      for (int t = 0; t < 10; ++t) {
        PointWindow x{0, random_admissible(p, 12 * ell, rng)};
        MarkerSelector sel(x, ell);
        const auto e = static_cast<std::int64_t>(ell);
        for (auto i = x.begin(); i + 2 * e <= x.end(); ++i)
          for (auto j = i + 1; j <= i + e && j + 2 * e <= x.end(); ++j) {
            if (!sel.candidate(i) || !sel.candidate(j)) continue;
            auto a = x.slice(i, i + 2 * e), b = x.slice(j, j + 2 * e);
            EXPECT_FALSE(std::equal(a.begin(), a.end(), b.begin())) << name << " " << i << " " << j;
          }
      }
  }
}

TEST(MarkerSelection, MarkerFreeStretchesHaveOnePeriodicPattern) {
  std::mt19937_64 rng(12);
  auto p = oracle::load("golden.json");
  const std::size_t ell = 5;
  const auto e = static_cast<std::int64_t>(ell);
  std::size_t stretches = 0;
  for (int t = 0; t < 200; ++t) {
    // long periodic runs spliced into random context
    Word w = random_admissible(p, 30, rng);
    Word unit = rng() % 2 ? Word{0, 0, 1} : Word{0, 1, 0, 0};
    for (int r = 0; r < 8; ++r) w.insert(w.end(), unit.begin(), unit.end());
    if (w[29] == 1 && w[30] == 1) w[30] = 0;
    auto tail = random_admissible(p, 30, rng);
    if (w.back() == 1 && tail.front() == 1) tail.front() = 0;
    w.insert(w.end(), tail.begin(), tail.end());
    PointWindow x{0, w};
    MarkerSelector sel(x, ell);
    std::vector<std::int64_t> acc;
    bool all_known = true;
    for (auto i = x.begin(); i < x.end(); ++i) {
      auto s = sel.status(i);
      if (s == MarkerStatus::Selected) acc.push_back(i);
      if (s == MarkerStatus::Unknown && i + 2 * e <= x.end() && i >= 2 * e) all_known = false;
    }
    if (!all_known) continue;
    for (std::size_t k = 1; k < acc.size(); ++k) {
      auto lo = acc[k - 1] + e + 1, hi = acc[k] - e - 1;
      if (hi - lo < 1) continue;
      ++stretches;
      auto first = local_periodic_point(x, lo, ell);
      for (auto w0 = lo; w0 <= hi; ++w0) {
        auto q = local_periodic_point(x, w0, ell);
        EXPECT_EQ(q.base, first.base);
        EXPECT_EQ(q.phase, first.phase);
      }
    }
  }
  EXPECT_GT(stretches, 0u);
}

TEST(MarkerSelection, PeriodicPointsWithShortPeriodHaveNoMarkers) {
  auto p = oracle::load("golden.json");
  for (std::size_t n = 1; n <= 6; ++n)
    for (const auto& w : enumerate_words(p, n)) {
      PointWindow x{0, {}};
      for (std::size_t i = 0; i < 40; ++i) x.data.push_back(w[i % n]);
      for (auto s : marker_positions(x, 6)) EXPECT_NE(s, MarkerStatus::Selected);
    }
}

TEST(RecoverEdges, MatchesTheUniqueLift) {
  auto cover = build_fischer_cover(oracle::load("graph1.json"));
  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    // random path, then its labels
    EdgePath path;
    Vertex v = static_cast<Vertex>(rng() % cover.num_vertices());
    for (int i = 0; i < 40; ++i) {
      auto out = cover.graph().out(v);
      path.push_back(out[rng() % out.size()]);
      v = cover.graph().edge(path.back()).trg;
    }
    Window<Symbol> y{0, cover.labels(path)};
    auto got = recover_edges(cover, y);
    for (std::size_t i = 0; i < path.size(); ++i)
      if (got[i]) {
        // any recovered edge must be forced: all lifts of the label word agree there
        std::set<EdgeId> seen;
        for (Vertex u = 0; u < cover.num_vertices(); ++u)
          if (auto l = cover.lift(u, y.data)) seen.insert((*l)[i]);
        EXPECT_EQ(seen.size(), 1u);
        EXPECT_EQ(*got[i], path[i]);
      }
  }
}

TEST(OrbitMatch, GoldenIntoFullTwoIsInjectiveAndMarkerFree) {
  const auto& code = golden_code();
  const auto& pairs = code.match.pairs();
  auto census = periodic_census(code.x, code.ell());
  std::vector<std::size_t> per(code.ell() + 1, 0);
  std::set<Word> targets;
  EdgeMatcher m(code.kit.marker.edges);
  for (const auto& p : pairs) {
    ++per[p.n];
    EXPECT_TRUE(targets.insert(p.to_label).second);
    EXPECT_EQ(cyclic_least_period(p.to_label), p.n);
    EXPECT_EQ(code.cover.labels(p.to), p.to_label);
    // the cycle repeated never contains the marker
    EdgePath twice = p.to;
    for (int r = 0; r < 3; ++r) twice.insert(twice.end(), p.to.begin(), p.to.end());
    EXPECT_TRUE(m.occurrences(twice).empty());
  }
  for (std::size_t n = 1; n <= code.ell(); ++n) EXPECT_EQ(Count(per[n]), census.orbits[n]) << n;
}

TEST(Codec, BlockParametersForGoldenIntoFullTwo) {
  const auto& code = golden_code();
  EXPECT_EQ(code.ell(), 29u);
  EXPECT_EQ(code.kit.L(), 4u);
  EXPECT_EQ(code.kit.K(), 1u);
  EXPECT_EQ(code.reach(), 3 * 29 + 1 + 1u);
  EXPECT_GE(code.window, code.reach() + 2 * code.ell());
}

TEST(Codec, RoundTripOnRandomWindows) {
  const auto& code = golden_code();
  std::mt19937_64 rng(7);
  const auto W = static_cast<std::int64_t>(3 * code.window), D = static_cast<std::int64_t>(code.decode_window());
  for (int t = 0; t < 50; ++t) {
    PointWindow x{-(W + D), random_admissible(code.x, static_cast<std::size_t>(100 + 2 * (W + D)), rng)};
    auto img = encode_point(code, x, -D, 100 + D);
    ASSERT_TRUE(code.cover.graph().is_path(img.data));
    Window<Symbol> y{-D, code.cover.labels(img.data)};
    auto back = decode_point(code, y, 0, 100);
    EXPECT_EQ(back.data, Word(x.slice(0, 100).begin(), x.slice(0, 100).end()));
  }
}

TEST(Codec, MarkersAppearOnlyAtSelectedPositions) {
  const auto& code = golden_code();
  std::mt19937_64 rng(8);
  const auto W = static_cast<std::int64_t>(3 * code.window);
  const auto L = static_cast<std::int64_t>(code.kit.L());
  std::size_t total = 0;
  for (int t = 0; t < 30; ++t) {
    PointWindow x{-W, random_admissible(code.x, static_cast<std::size_t>(200 + 2 * W), rng)};
    Encoder enc(code, x);
    auto img = enc.run(0, 200);
    std::set<std::int64_t> sel, occ;
    for (std::int64_t m = 0; m + L <= 200; ++m)
      if (enc.selector().status(m) == MarkerStatus::Selected) sel.insert(m);
    for (std::int64_t m = 0; m + L <= 200; ++m) {
      bool hit = true;
      for (std::int64_t i = 0; i < L && hit; ++i)
        hit = img.at(m + i) == code.kit.marker.edges[static_cast<std::size_t>(i)];
      if (hit) occ.insert(m);
    }
    EXPECT_EQ(sel, occ);
    total += sel.size();
  }
  EXPECT_GT(total, 0u);
}

TEST(Codec, DecoderRejectsLabelsOutsideTheImage) {
  const auto& code = golden_code();
  std::mt19937_64 rng(9);
  const auto D = static_cast<std::int64_t>(code.decode_window());
  std::size_t rejected = 0;
  for (int t = 0; t < 20; ++t) {
    Window<Symbol> y{-D, random_admissible(oracle::load("full2.json"), static_cast<std::size_t>(2 * D + 40), rng)};
    try {
      decode_point(code, y, 0, 40);
    } catch (const Error& e) {
      EXPECT_EQ(e.name(), "not_in_image");
      ++rejected;
    }
  }
  EXPECT_EQ(rejected, 20u);
}

TEST(Codec, EncoderNeedsContext) {
  const auto& code = golden_code();
  std::mt19937_64 rng(10);
  PointWindow x{0, random_admissible(code.x, 300, rng)};
  try {
    encode_point(code, x, 0, 300);
    FAIL() << "edges of the view cannot be encoded";
  } catch (const Error& e) {
    EXPECT_TRUE(e.name() == "unstable_marker" || e.name() == "insufficient_context") << e.name();
  }
}

TEST(Codec, JsonRoundTripPreservesTheCode) {
  auto x = oracle::load("fixed_point.json");
  auto code = build_embedding(x, oracle::load("two_state_edge.json"));
  auto back = code_from_json(json::parse(code_to_json(code).dump()));
  EXPECT_EQ(code_to_json(back).dump(), code_to_json(code).dump());
  auto j = code_to_json(code);
  j["connectors"]["K"] = 7;
  EXPECT_THROW(code_from_json(j), Error);
}

TEST(Codec, PeriodicInputUsesOnlyOrbitTargets) {
  auto code = build_embedding(oracle::load("fixed_point.json"), oracle::load("full2.json"));
  ASSERT_EQ(code.match.pairs().size(), 1u);
  const auto W = static_cast<std::int64_t>(code.window);
  PointWindow x{-W, Word(static_cast<std::size_t>(2 * W + 10), 0)};
  auto img = encode_point(code, x, 0, 10);
  for (auto e : img.data) EXPECT_EQ(e, code.match.pairs()[0].to[0]);
}

TEST(Verify, GoldenIntoFullTwoPasses) {
  auto r = verify_embedding(golden_code(), {8, 100, 1, 64});
  EXPECT_TRUE(r.pass()) << r.to_json().dump(1);
  EXPECT_EQ(r.at("injective_on_periodic_points").witness["points"], 100);
}

TEST(Verify, CorruptedOrbitMatchIsCaught) {
  auto code = golden_code();
  auto pairs = code.match.pairs();
  // send the second period-5 orbit to the first one's target
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (pairs[i].n == 5) idx.push_back(i);
  ASSERT_GE(idx.size(), 2u);
  pairs[idx[1]].to = pairs[idx[0]].to;
  pairs[idx[1]].to_label = pairs[idx[0]].to_label;
  code.match = OrbitMatch(pairs);
  auto r = verify_embedding(code, {8, 5, 0, 32});
  EXPECT_FALSE(r.at("injective_on_periodic_points").pass);
  const auto& w = r.at("injective_on_periodic_points").witness["witness"];
  EXPECT_TRUE(w.contains("first") && w.contains("second"));
}

TEST(Build, PreconditionFailuresAreNamed) {
  try {
    build_embedding(oracle::load("full2.json"), oracle::load("golden.json"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.name(), "precondition_failed");
    EXPECT_NE(std::string(e.what()).find("entropy_strict"), std::string::npos);
  }
  EXPECT_THROW(build_embedding(oracle::load("full2.json"), oracle::load("full2.json")), Error);
}

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "sofic/fischer.hpp"
#include "sofic/language.hpp"

using namespace sofic;

namespace {

const std::vector<std::string> kCorpus{"golden.json", "full2.json",    "golden_graph.json",
                                       "graph1.json", "even.json",     "single_loop.json",
                                       "loopless.json", "two_state_edge.json"};

Word w01(const std::string& s) {
  Word w;
  for (char c : s) w.push_back(static_cast<Symbol>(c - '0'));
  return w;
}

}  // namespace

TEST(Count, SpecValues) {
  EXPECT_EQ(count_words(oracle::load("full2.json"), 3), 8);
  EXPECT_EQ(count_words(oracle::load("golden.json"), 3), 5);
  EXPECT_EQ(count_words(oracle::load("graph1.json"), 1), 4);
  EXPECT_EQ(count_words(oracle::load("golden.json"), 0), 1);
}

TEST(Count, MatchesBruteForce) {
  for (const auto& name : kCorpus) {
    auto p = oracle::load(name);
    LanguageIndex idx(p, 12);
    const std::size_t top = p.alphabet().size() > 2 ? 7 : 12;
    for (std::size_t n = 0; n <= top; ++n) EXPECT_EQ(idx.count(n), oracle::language(p, n).size()) << name << " n=" << n;
  }
}

TEST(Rank, GoldenMeanExamples) {
  LanguageIndex idx(oracle::load("golden.json"), 3);
  EXPECT_EQ(idx.rank(w01("000")), 0);
  EXPECT_EQ(idx.unrank(3, 4), w01("101"));
  LanguageIndex full(oracle::load("full2.json"), 2);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(full.rank(full.unrank(2, i)), i);
}

TEST(Rank, BijectiveWithLexicographicOrder) {
  for (const auto& name : kCorpus) {
    auto p = oracle::load(name);
    LanguageIndex idx(p, 12);
    const std::size_t top = p.alphabet().size() > 2 ? 7 : 12;
    for (std::size_t n = 0; n <= top; ++n) {
      Count i = 0;
      for (const auto& w : oracle::language(p, n)) {
        EXPECT_EQ(idx.rank(w), i) << name;
        EXPECT_EQ(idx.unrank(n, i), w) << name;
        ++i;
      }
    }
  }
}

TEST(Rank, Errors) {
  LanguageIndex idx(oracle::load("golden.json"), 4);
  try {
    idx.rank(w01("011"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.name(), "inadmissible_word");
  }
  try {
    idx.unrank(3, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.name(), "index_out_of_range");
  }
}

TEST(Period, Examples) {
  EXPECT_EQ(word_period(w01("0101"), 2), 2u);
  EXPECT_EQ(word_period(w01("0000"), 2), 1u);
  EXPECT_EQ(word_period(w01("0010"), 2), std::nullopt);
  EXPECT_THROW(word_period(w01("010"), 2), Error);
}

TEST(Period, ReportedPeriodHoldsAndIsLeast) {
  for (std::size_t ell = 1; ell <= 5; ++ell)
    for (const auto& w : oracle::all_words(2, 2 * ell)) {
      auto q = word_period(w, ell);
      std::optional<std::size_t> expect;
      for (std::size_t c = 1; c <= ell && !expect; ++c) {
        bool ok = true;
        for (std::size_t i = 0; i + c < w.size(); ++i) ok = ok && w[i] == w[i + c];
        if (ok) expect = c;
      }
      EXPECT_EQ(q, expect);
    }
}

TEST(Period, WindowsOfPeriodicWordsInheritPeriod) {
  for (std::size_t q = 1; q <= 4; ++q)
    for (const auto& base : oracle::all_words(2, q)) {
      Word long_word;
      for (int k = 0; k < 6; ++k) long_word.insert(long_word.end(), base.begin(), base.end());
      const std::size_t ell = 4;
      for (std::size_t s = 0; s + 2 * ell <= long_word.size(); ++s) {
        Word win(long_word.begin() + static_cast<std::ptrdiff_t>(s),
                 long_word.begin() + static_cast<std::ptrdiff_t>(s + 2 * ell));
        auto r = word_period(win, ell);
        ASSERT_TRUE(r.has_value());
        EXPECT_EQ(q % *r, 0u);
      }
    }
}

TEST(Follower, Examples) {
  auto golden = oracle::load("golden.json");
  EXPECT_EQ(follower_words(golden, w01("1"), 1), (std::vector<Word>{w01("0")}));
  EXPECT_EQ(follower_words(oracle::load("full2.json"), w01("0"), 1), (std::vector<Word>{w01("0"), w01("1")}));
  EXPECT_EQ(follower_words(golden, w01("0"), 2), (std::vector<Word>{w01("00"), w01("01"), w01("10")}));
  EXPECT_EQ(predecessor_words(golden, w01("1"), 1), (std::vector<Word>{w01("0")}));
  EXPECT_THROW(follower_words(golden, w01("11"), 1), Error);
}

TEST(Follower, MatchesBruteForceExtensions) {
  for (const auto& name : {"golden.json", "even.json", "graph1.json"}) {
    auto p = oracle::load(name);
    const auto sigma = p.alphabet().size();
    auto lang3 = oracle::language(p, 3);
    auto lang2 = oracle::language(p, 2);
    for (const auto& a : lang2) {
      std::vector<Word> expect, expect_pre;
      for (const auto& u : oracle::all_words(sigma, 1)) {
        Word au = a, ua = u;
        au.insert(au.end(), u.begin(), u.end());
        ua.insert(ua.end(), a.begin(), a.end());
        if (lang3.count(au)) expect.push_back(u);
        if (lang3.count(ua)) expect_pre.push_back(u);
      }
      EXPECT_EQ(follower_words(p, a, 1), expect) << name;
      EXPECT_EQ(predecessor_words(p, a, 1), expect_pre) << name;
    }
  }
}

namespace {

/// u- c u+ admissible for every admissible u- c and c u+ of length r.
bool sync_brute(const Presentation& p, const Word& c, std::size_t r) {
  auto big = oracle::language(p, 2 * r + c.size());
  auto mid = oracle::language(p, r + c.size());
  for (const auto& left : mid) {
    if (!std::equal(c.begin(), c.end(), left.end() - static_cast<std::ptrdiff_t>(c.size()))) continue;
    for (const auto& right : mid) {
      if (!std::equal(c.begin(), c.end(), right.begin())) continue;
      Word whole = left;
      whole.insert(whole.end(), right.begin() + static_cast<std::ptrdiff_t>(c.size()), right.end());
      if (!big.count(whole)) return false;
    }
  }
  return true;
}

}  // namespace

TEST(Synchronizing, Examples) {
  auto golden = oracle::load("golden.json");
  EXPECT_TRUE(is_synchronizing(golden, w01("1")));
  EXPECT_TRUE(sync_brute(golden, w01("1"), 4));
  EXPECT_TRUE(is_synchronizing(oracle::load("full2.json"), Word{}));
  auto even = oracle::load("even.json");
  EXPECT_FALSE(is_synchronizing(even, w01("0")));
  EXPECT_FALSE(sync_brute(even, w01("0"), 4));
  EXPECT_THROW(is_synchronizing(golden, w01("11")), Error);
}

TEST(Synchronizing, AgreesWithExtensionSearch) {
  for (const auto& name : {"golden.json", "even.json", "golden_graph.json"}) {
    auto p = oracle::load(name);
    auto cover = build_fischer_cover(p);
    for (std::size_t n = 1; n <= 3; ++n)
      for (const auto& c : oracle::language(p, n)) EXPECT_EQ(is_synchronizing(cover, c), sync_brute(p, c, 4)) << name;
  }
}

TEST(Synchronizing, ClosedUnderExtension) {
  for (const auto& name : {"golden.json", "even.json", "graph1.json"}) {
    auto p = oracle::load(name);
    auto cover = build_fischer_cover(p);
    const std::size_t top = name == std::string("graph1.json") ? 5 : 8;
    for (std::size_t n = 1; n <= top; ++n)
      for (const auto& w : oracle::language(p, n)) {
        if (!is_synchronizing(cover, w)) continue;
        // every admissible extension of a synchronizing word is synchronizing
        for (const auto& u : follower_words(p, w, 1)) {
          Word wu = w;
          wu.insert(wu.end(), u.begin(), u.end());
          EXPECT_TRUE(is_synchronizing(cover, wu));
        }
        for (const auto& u : predecessor_words(p, w, 1)) {
          Word uw = u;
          uw.insert(uw.end(), w.begin(), w.end());
          EXPECT_TRUE(is_synchronizing(cover, uw));
        }
      }
  }
}

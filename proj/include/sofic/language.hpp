#pragma once

// Finite languages of presentations: exact counting, lexicographic
// rank/unrank, word periods and finite-horizon follower sets.

#include <optional>
#include <set>
#include <vector>

#include "sofic/automaton.hpp"

namespace sofic {

/// Counting table over a deterministic graph: completions(r, q) is the number
/// of words of length r readable from q. Ranks are lexicographic with symbols
/// ordered by index.
class RankTable {
 public:
  RankTable() = default;

  RankTable(DetGraph dfa, std::int32_t start, std::size_t max_length)
      : dfa_(std::move(dfa)), start_(start), max_length_(max_length) {
    const auto n = dfa_.size();
    table_.assign(max_length_ + 1, std::vector<Count>(n, Count(0)));
    for (std::size_t q = 0; q < n; ++q) table_[0][q] = 1;
    for (std::size_t r = 1; r <= max_length_; ++r)
      for (std::size_t q = 0; q < n; ++q) {
        Count c = 0;
        for (auto t : dfa_.next[q])
          if (t != kNone) c += table_[r - 1][static_cast<std::size_t>(t)];
        table_[r][q] = std::move(c);
      }
  }

  std::size_t max_length() const noexcept { return max_length_; }
  const DetGraph& dfa() const noexcept { return dfa_; }
  std::int32_t start() const noexcept { return start_; }

  Count completions(std::size_t r, std::int32_t q) const {
    check_length(r);
    if (q == kNone) return 0;
    return table_[r][static_cast<std::size_t>(q)];
  }

  Count count(std::size_t n) const { return completions(n, start_); }

  bool contains(std::span<const Symbol> w) const {
    for (auto s : w)
      if (s >= dfa_.sigma) return false;
    return start_ != kNone && dfa_.run(start_, w) != kNone;
  }

  Count rank(std::span<const Symbol> w) const {
    check_length(w.size());
    if (!contains(w)) throw Error("inadmissible_word", "word is not in the language");
    Count r = 0;
    auto q = start_;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const auto rest = w.size() - i - 1;
      for (Symbol c = 0; c < w[i]; ++c) {
        auto t = dfa_.step(q, c);
        if (t != kNone) r += table_[rest][static_cast<std::size_t>(t)];
      }
      q = dfa_.step(q, w[i]);
    }
    return r;
  }

  Word unrank(std::size_t n, Count i) const {
    check_length(n);
    if (i < 0 || i >= count(n))
      throw Error("index_out_of_range", "rank " + i.str() + " out of range [0, " + count(n).str() + ")");
    Word w;
    w.reserve(n);
    auto q = start_;
    for (std::size_t pos = 0; pos < n; ++pos) {
      const auto rest = n - pos - 1;
      for (Symbol c = 0; c < dfa_.sigma; ++c) {
        auto t = dfa_.step(q, c);
        if (t == kNone) continue;
        const auto& block = table_[rest][static_cast<std::size_t>(t)];
        if (i < block) {
          w.push_back(c);
          q = t;
          break;
        }
        i -= block;
      }
    }
    return w;
  }

 private:
  void check_length(std::size_t n) const {
    if (n > max_length_)
      throw Error("length_out_of_range",
                  "length " + std::to_string(n) + " exceeds table bound " + std::to_string(max_length_));
  }

  DetGraph dfa_;
  std::int32_t start_ = kNone;
  std::size_t max_length_ = 0;
  std::vector<std::vector<Count>> table_;
};

/// Deterministic automaton of the language: subset construction of the
/// essential presenting graph, started from all of its vertices.
inline SubsetAutomaton language_automaton(const Presentation& p) {
  auto trimmed = trim_essential(p.presenting_graph());
  std::vector<Vertex> all(trimmed.graph.num_vertices());
  for (Vertex v = 0; v < all.size(); ++v) all[v] = v;
  return determinize(trimmed.graph, p.alphabet().size(), all);
}

/// Counting/ranking structure for the admissible words of lengths up to a
/// bound.
class LanguageIndex {
 public:
  LanguageIndex(const Presentation& p, std::size_t max_length)
      : alphabet_(p.alphabet()) {
    auto sa = language_automaton(p);
    auto start = sa.dfa.size() ? 0 : kNone;
    table_ = RankTable(std::move(sa.dfa), start, max_length);
  }

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t max_length() const noexcept { return table_.max_length(); }
  const RankTable& table() const noexcept { return table_; }

  Count count(std::size_t n) const {
    if (table_.start() == kNone) return 0;
    return table_.count(n);
  }
  bool admissible(std::span<const Symbol> w) const { return table_.contains(w); }
  Count rank(std::span<const Symbol> w) const { return table_.rank(w); }
  Word unrank(std::size_t n, const Count& i) const { return table_.unrank(n, i); }

 private:
  Alphabet alphabet_;
  RankTable table_;
};

inline Count count_words(const Presentation& p, std::size_t n) {
  return LanguageIndex(p, n).count(n);
}

/// Least Q in [1, ell] with w[i] == w[i + Q] for all 0 <= i < 2*ell - Q;
/// nullopt when the word is non-periodic.
inline std::optional<std::size_t> word_period(std::span<const Symbol> w, std::size_t ell) {
  if (ell == 0 || w.size() != 2 * ell)
    throw Error("wrong_length", "period test needs a word of length 2*ell");
  for (std::size_t q = 1; q <= ell; ++q) {
    bool ok = true;
    for (std::size_t i = 0; i + q < w.size() && ok; ++i) ok = w[i] == w[i + q];
    if (ok) return q;
  }
  return std::nullopt;
}

namespace detail {

inline void enumerate_from(const DetGraph& d, std::int32_t q, std::size_t m, Word& cur,
                           std::vector<Word>& out) {
  if (cur.size() == m) {
    out.push_back(cur);
    return;
  }
  for (Symbol s = 0; s < d.sigma; ++s) {
    auto t = d.step(q, s);
    if (t == kNone) continue;
    cur.push_back(s);
    enumerate_from(d, t, m, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

/// Admissible words of length n in lexicographic order (exhaustive).
inline std::vector<Word> enumerate_words(const Presentation& p, std::size_t n) {
  auto sa = language_automaton(p);
  std::vector<Word> out;
  if (sa.dfa.size() == 0) return out;
  Word cur;
  detail::enumerate_from(sa.dfa, 0, n, cur, out);
  return out;
}

/// Length-m words u with a.u admissible (finite-horizon right follower set).
inline std::vector<Word> follower_words(const Presentation& p, std::span<const Symbol> a, std::size_t m) {
  auto sa = language_automaton(p);
  auto q = sa.dfa.size() ? sa.dfa.run(0, a) : kNone;
  if (q == kNone) throw Error("inadmissible_word", "follower set of an inadmissible word");
  std::vector<Word> out;
  Word cur;
  detail::enumerate_from(sa.dfa, q, m, cur, out);
  return out;
}

/// Length-m words u with u.a admissible (finite-horizon left follower set).
inline std::vector<Word> predecessor_words(const Presentation& p, std::span<const Symbol> a,
                                           std::size_t m) {
  auto sa = language_automaton(p);
  if (sa.dfa.size() == 0 || sa.dfa.run(0, a) == kNone)
    throw Error("inadmissible_word", "predecessor set of an inadmissible word");
  std::vector<Word> candidates, out;
  Word cur;
  detail::enumerate_from(sa.dfa, 0, m, cur, candidates);
  for (auto& u : candidates) {
    auto q = sa.dfa.run(0, u);
    if (sa.dfa.run(q, a) != kNone) out.push_back(std::move(u));
  }
  return out;
}

}  // namespace sofic

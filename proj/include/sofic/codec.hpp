#pragma once

// Marker selection on points of X and the sliding block encoder/decoder of
// the embedding into the Fischer cover of Y.

#include <map>
#include <string>
#include <vector>

#include "sofic/orbit.hpp"

namespace sofic {

/// A finite view of a point: symbols on coordinates [origin, origin + size).
template <class T>
struct Window {
  std::int64_t origin = 0;
  std::vector<T> data;

  std::int64_t begin() const { return origin; }
  std::int64_t end() const { return origin + static_cast<std::int64_t>(data.size()); }
  bool covers(std::int64_t lo, std::int64_t hi) const { return lo >= begin() && hi <= end(); }
  const T& at(std::int64_t c) const { return data.at(static_cast<std::size_t>(c - origin)); }
  std::span<const T> slice(std::int64_t lo, std::int64_t hi) const {
    return std::span<const T>(data).subspan(static_cast<std::size_t>(lo - origin), static_cast<std::size_t>(hi - lo));
  }
};

using PointWindow = Window<Symbol>;
using PathWindow = Window<EdgeId>;

enum class MarkerStatus : std::uint8_t { Unknown, NotCandidate, Selected, Rejected };

inline std::string to_string(MarkerStatus s) {
  switch (s) {
    case MarkerStatus::NotCandidate: return "not_candidate";
    case MarkerStatus::Selected: return "selected";
    case MarkerStatus::Rejected: return "rejected";
    default: return "unknown";
  }
}

/// Greedy marker set. A coordinate i is a candidate when the window
/// x[i, i + 2 ell) has no period <= ell. Candidates are taken in increasing
/// lexicographic order of their windows and accepted unless an accepted one
/// lies within distance ell. Equivalently, i is selected iff no selected
/// candidate within distance ell has a smaller window. Decisions that depend
/// on symbols outside the view come out as Unknown.
class MarkerSelector {
 public:
  MarkerSelector(const PointWindow& x, std::size_t ell)
      : x_(&x), ell_(static_cast<std::int64_t>(ell)), memo_(x.data.size(), kUnset), cand_(x.data.size(), kUnset) {}

  MarkerStatus status(std::int64_t i) {
    if (!known(i)) return MarkerStatus::Unknown;
    auto& m = memo_[index(i)];
    if (m != kUnset) return static_cast<MarkerStatus>(m);
    MarkerStatus out;
    if (!candidate(i)) {
      out = MarkerStatus::NotCandidate;
    } else {
      bool unknown = false;
      out = MarkerStatus::Selected;
      for (auto j = i - ell_; j <= i + ell_; ++j) {
        if (j == i) continue;
        if (!known(j)) {
          unknown = true;
          continue;
        }
        if (!candidate(j) || !smaller(j, i)) continue;
        auto s = status(j);
        if (s == MarkerStatus::Selected) {
          out = MarkerStatus::Rejected;
          break;
        }
        if (s == MarkerStatus::Unknown) unknown = true;
      }
      if (out == MarkerStatus::Selected && unknown) out = MarkerStatus::Unknown;
    }
    m = static_cast<std::uint8_t>(out);
    return out;
  }

  bool known(std::int64_t i) const { return x_->covers(i, i + 2 * ell_); }

  bool candidate(std::int64_t i) {
    auto& c = cand_[index(i)];
    if (c == kUnset) c = word_period(x_->slice(i, i + 2 * ell_), static_cast<std::size_t>(ell_)) ? 0 : 1;
    return c == 1;
  }

 private:
  static constexpr std::uint8_t kUnset = 255;

  std::size_t index(std::int64_t i) const { return static_cast<std::size_t>(i - x_->origin); }

  bool smaller(std::int64_t j, std::int64_t i) const {
    auto a = x_->slice(j, j + 2 * ell_), b = x_->slice(i, i + 2 * ell_);
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }

  const PointWindow* x_;
  std::int64_t ell_;
  std::vector<std::uint8_t> memo_;
  std::vector<std::uint8_t> cand_;
};

/// Statuses of every coordinate of the view.
inline std::vector<MarkerStatus> marker_positions(const PointWindow& x, std::size_t ell) {
  MarkerSelector sel(x, ell);
  std::vector<MarkerStatus> out;
  for (auto i = x.begin(); i < x.end(); ++i) out.push_back(sel.status(i));
  return out;
}

/// The periodic pattern of x around coordinate w0: the window x[w0, w0 + 2 ell)
/// must be in view and periodic.
inline PeriodicPattern local_periodic_point(const PointWindow& x, std::int64_t w0, std::size_t ell) {
  const auto e = static_cast<std::int64_t>(ell);
  if (!x.covers(w0, w0 + 2 * e)) throw Error("insufficient_context", "periodic window at " + std::to_string(w0) + " is out of view");
  auto p = periodic_pattern(x.slice(w0, w0 + 2 * e), w0, ell);
  if (!p) throw Error("internal", "window at " + std::to_string(w0) + " is not periodic");
  return *p;
}

struct EmbeddingCode {
  Presentation x;
  FischerCover cover;
  MarkerKit kit;
  OrbitMatch match;
  std::size_t window = 0;  // encoder radius
  json certificates;

  std::size_t ell() const { return kit.ell(); }
  /// Markers that decide a coordinate lie within this distance.
  std::size_t reach() const { return 3 * kit.ell() + kit.K() + 1; }
  /// Longest gap coded as one block.
  std::size_t short_gap() const { return 3 * kit.ell() + kit.K(); }
  /// Decoder radius.
  std::size_t decode_window() const { return reach() + kit.L(); }
};

namespace detail {

struct Segment {
  enum Kind { Short, Head, Exit, Body } kind = Body;
  std::optional<std::int64_t> prev, next;  // nearest markers at or before / after the coordinate
};

inline Segment classify(const EmbeddingCode& code, std::int64_t j, std::optional<std::int64_t> m,
                        std::optional<std::int64_t> mn) {
  const auto ell = static_cast<std::int64_t>(code.ell());
  const auto K = static_cast<std::int64_t>(code.kit.K());
  const auto gap = static_cast<std::int64_t>(code.short_gap());
  Segment s{Segment::Body, m, mn};
  if (m && mn && *mn - *m <= gap)
    s.kind = Segment::Short;
  else if (m && j <= *m + ell)
    s.kind = Segment::Head;
  else if (mn && j >= *mn - K)
    s.kind = Segment::Exit;
  return s;
}

/// Start coordinate of the periodic window that fixes the body pattern.
inline std::int64_t body_anchor(const EmbeddingCode& code, std::int64_t j, const Segment& s) {
  const auto ell = static_cast<std::int64_t>(code.ell());
  auto w0 = j;
  if (s.next) w0 = std::min(w0, *s.next - ell - 1);
  if (s.prev) w0 = std::max(w0, *s.prev + ell + 1);
  return w0;
}

}  // namespace detail

/// Encoder over a view of a point. Output coordinates whose value depends on
/// symbols outside the view raise "unstable_marker" or "insufficient_context".
class Encoder {
 public:
  Encoder(const EmbeddingCode& code, const PointWindow& x) : code_(&code), x_(&x), sel_(x, code.ell()) {}

  EdgeId at(std::int64_t j) {
    const auto& k = code_->kit;
    const auto R = static_cast<std::int64_t>(code_->reach());
    const auto ell = static_cast<std::int64_t>(code_->ell());
    const auto K = static_cast<std::int64_t>(k.K());
    auto m = scan(j, j - R, -1);
    auto mn = scan(j + 1, j + R, +1);
    auto seg = detail::classify(*code_, j, m, mn);
    const auto& g = code_->cover.graph();
    const auto a_src = g.edge(k.marker.edges.front()).src;
    switch (seg.kind) {
      case detail::Segment::Short:
        return block(*m, *mn - *m, a_src)[static_cast<std::size_t>(j - *m)];
      case detail::Segment::Head: {
        auto [p, pair] = body(*m + ell + 1, seg);
        auto entry = pair->to[static_cast<std::size_t>(floor_mod(*m + ell + 1 - p.phase, static_cast<std::int64_t>(pair->n)))];
        return block(*m, ell + 1, g.edge(entry).src)[static_cast<std::size_t>(j - *m)];
      }
      case detail::Segment::Exit: {
        auto [p, pair] = body(*mn - K, seg);
        auto entry = pair->to[static_cast<std::size_t>(floor_mod(*mn - K - p.phase, static_cast<std::int64_t>(pair->n)))];
        return k.connectors.at(g.edge(entry).src, a_src)[static_cast<std::size_t>(j - (*mn - K))];
      }
      default: {
        auto [p, pair] = body(j, seg);
        return pair->to[static_cast<std::size_t>(floor_mod(j - p.phase, static_cast<std::int64_t>(pair->n)))];
      }
    }
  }

  PathWindow run(std::int64_t s, std::int64_t t) {
    PathWindow out{s, {}};
    for (auto j = s; j < t; ++j) out.data.push_back(at(j));
    return out;
  }

  MarkerSelector& selector() { return sel_; }

 private:
  /// First selected marker scanning from `from` toward `to` (inclusive).
  std::optional<std::int64_t> scan(std::int64_t from, std::int64_t to, int dir) {
    for (auto i = from; dir < 0 ? i >= to : i <= to; i += dir) {
      auto s = sel_.status(i);
      if (s == MarkerStatus::Selected) return i;
      if (s == MarkerStatus::Unknown)
        throw Error("unstable_marker", "marker decision at " + std::to_string(i) + " depends on symbols out of view");
    }
    return std::nullopt;
  }

  std::pair<PeriodicPattern, const OrbitPair*> body(std::int64_t j, const detail::Segment& seg) {
    auto p = local_periodic_point(*x_, detail::body_anchor(*code_, j, seg), code_->ell());
    auto pair = code_->match.by_source(p.base);
    if (!pair) throw Error("unmatched_orbit", "periodic orbit " + code_->x.alphabet().format(p.base, " ") + " has no target");
    return {p, pair};
  }

  /// a . c . payload . c over [m, m + g), closing at vertex `exit`.
  const EdgePath& block(std::int64_t m, std::int64_t g, Vertex exit) {
    auto key = std::make_pair(m, g);
    if (auto it = blocks_.find(key); it != blocks_.end()) return it->second;
    const auto& k = code_->kit;
    const auto& gr = code_->cover.graph();
    if (!x_->covers(m, m + g)) throw Error("insufficient_context", "block at " + std::to_string(m) + " is out of view");
    auto xi = xi_encode(k, x_->slice(m, m + g));
    EdgePath out = k.marker.edges;
    auto after = gr.edge(out.back()).trg;
    auto c1 = k.connectors.at(after, gr.edge(xi.front()).src);
    out.insert(out.end(), c1.begin(), c1.end());
    out.insert(out.end(), xi.begin(), xi.end());
    auto c2 = k.connectors.at(gr.edge(xi.back()).trg, exit);
    out.insert(out.end(), c2.begin(), c2.end());
    return blocks_.emplace(key, std::move(out)).first->second;
  }

  const EmbeddingCode* code_;
  const PointWindow* x_;
  MarkerSelector sel_;
  std::map<std::pair<std::int64_t, std::int64_t>, EdgePath> blocks_;
};

/// Image of coordinates [s, t) of the point viewed by x.
inline PathWindow encode_point(const EmbeddingCode& code, const PointWindow& x, std::int64_t s, std::int64_t t) {
  Encoder e(code, x);
  return e.run(s, t);
}

/// Recovers cover edges from labels. Vertices are fixed forward from the first
/// coordinate where the reachable set is a singleton, and backward by
/// intersecting with the reachable sets.
inline std::vector<std::optional<EdgeId>> recover_edges(const FischerCover& c, const Window<Symbol>& y) {
  const auto n = y.data.size(), nv = c.num_vertices();
  std::vector<std::vector<bool>> fwd(n + 1, std::vector<bool>(nv, false));
  fwd[0].assign(nv, true);
  std::optional<std::size_t> sync;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t cnt = 0;
    for (Vertex v = 0; v < nv; ++v)
      if (fwd[i][v]) ++cnt;
    if (cnt == 0) throw Error("not_in_image", "label window is not a word of Y");
    if (cnt == 1 && !sync) sync = i;
    for (Vertex v = 0; v < nv; ++v)
      if (fwd[i][v])
        if (auto t = c.step(v, y.data[i])) fwd[i + 1][*t] = true;
  }
  if (std::none_of(fwd[n].begin(), fwd[n].end(), [](bool b) { return b; }))
    throw Error("not_in_image", "label window is not a word of Y");
  std::vector<std::optional<EdgeId>> out(n);
  if (!sync) return out;
  std::vector<std::optional<Vertex>> vert(n + 1);
  for (Vertex v = 0; v < nv; ++v)
    if (fwd[*sync][v]) vert[*sync] = v;
  for (auto i = *sync; i < n; ++i) vert[i + 1] = c.step(*vert[i], y.data[i]);
  std::vector<bool> cur(nv, false);
  cur[*vert[*sync]] = true;
  for (auto i = *sync; i-- > 0;) {
    std::vector<bool> prev(nv, false);
    std::size_t cnt = 0;
    Vertex last = 0;
    for (Vertex v = 0; v < nv; ++v)
      if (fwd[i][v])
        if (auto t = c.step(v, y.data[i]); t && cur[*t]) {
          prev[v] = true;
          ++cnt;
          last = v;
        }
    if (cnt == 1) vert[i] = last;
    cur = prev;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (vert[i]) out[i] = c.edge(*vert[i], y.data[i]);
  return out;
}

/// Decoder over a view of a label sequence. Anything outside the image of the
/// encoder raises "not_in_image".
class Decoder {
 public:
  Decoder(const EmbeddingCode& code, const Window<Symbol>& y)
      : code_(&code), y_(&y), edges_(recover_edges(code.cover, y)) {
    synced_ = std::any_of(edges_.begin(), edges_.end(), [](const auto& e) { return e.has_value(); });
  }

  Symbol at(std::int64_t j) {
    const auto& k = code_->kit;
    const auto R = static_cast<std::int64_t>(code_->reach());
    const auto ell = static_cast<std::int64_t>(code_->ell());
    const auto K = static_cast<std::int64_t>(k.K());
    const auto L = static_cast<std::int64_t>(k.L());
    if (!y_->covers(j - R, j + R + L))
      throw Error("insufficient_context", "coordinate " + std::to_string(j) + " lacks decoding context");
    std::optional<std::int64_t> m, mn;
    if (synced_) {
      for (auto i = j - R; i < j + R + L; ++i)
        if (!edges_[index(i)]) throw Error("insufficient_context", "cover path unknown at " + std::to_string(i));
      for (auto i = j; i >= j - R && !m; --i)
        if (marker_at(i)) m = i;
      for (auto i = j + 1; i <= j + R && !mn; ++i)
        if (marker_at(i)) mn = i;
    }
    if (m && mn && *mn - *m <= ell) throw Error("not_in_image", "markers closer than the block length at " + std::to_string(*m));
    auto seg = detail::classify(*code_, j, m, mn);
    const auto& g = code_->cover.graph();
    const auto a_src = g.edge(k.marker.edges.front()).src;
    switch (seg.kind) {
      case detail::Segment::Short:
        return block(*m, *mn - *m, std::optional<Vertex>(a_src))[static_cast<std::size_t>(j - *m)];
      case detail::Segment::Head:
        return block(*m, ell + 1, edge(*m + ell + 1) ? std::optional<Vertex>(g.edge(*edge(*m + ell + 1)).src)
                                                     : std::nullopt)[static_cast<std::size_t>(j - *m)];
      default: {
        auto lo = m ? *m + ell + 1 : j - R;
        auto hi = mn ? *mn - K : j + R;
        auto w0 = std::max(lo, std::min(j, hi - 2 * ell));
        if (seg.kind == detail::Segment::Exit) {
          auto expect = k.connectors.at(g.edge(*edge(*mn - K)).src, a_src);
          for (std::int64_t i = 0; i < K; ++i)
            if (*edge(*mn - K + i) != expect[static_cast<std::size_t>(i)])
              throw Error("not_in_image", "exit connector mismatch before " + std::to_string(*mn));
        }
        auto p = periodic_pattern(y_->slice(w0, w0 + 2 * ell), w0, code_->ell());
        if (!p) throw Error("not_in_image", "label window at " + std::to_string(w0) + " is not periodic");
        auto pair = code_->match.by_target_label(p->base);
        if (!pair) throw Error("not_in_image", "periodic label orbit is not a target");
        auto ph = static_cast<std::size_t>(floor_mod(j - p->phase, static_cast<std::int64_t>(pair->n)));
        if (seg.kind == detail::Segment::Body && edge(j) && *edge(j) != pair->to[ph])
          throw Error("not_in_image", "body path differs from the target cycle at " + std::to_string(j));
        return pair->from[ph];
      }
    }
  }

  PointWindow run(std::int64_t s, std::int64_t t) {
    PointWindow out{s, {}};
    for (auto j = s; j < t; ++j) out.data.push_back(at(j));
    return out;
  }

 private:
  std::size_t index(std::int64_t i) const { return static_cast<std::size_t>(i - y_->origin); }

  std::optional<EdgeId> edge(std::int64_t i) const { return edges_[index(i)]; }

  bool marker_at(std::int64_t i) const {
    const auto& a = code_->kit.marker.edges;
    for (std::size_t t = 0; t < a.size(); ++t)
      if (edge(i + static_cast<std::int64_t>(t)) != a[t]) return false;
    return true;
  }

  const Word& block(std::int64_t m, std::int64_t g, std::optional<Vertex> exit) {
    auto key = std::make_pair(m, g);
    if (auto it = blocks_.find(key); it != blocks_.end()) return it->second;
    const auto& k = code_->kit;
    const auto& gr = code_->cover.graph();
    const auto L = static_cast<std::int64_t>(k.L()), K = static_cast<std::int64_t>(k.K());
    EdgePath xi;
    for (auto i = m + L + K; i < m + g - K; ++i) xi.push_back(*edge(i));
    auto check = [&](std::int64_t from, const EdgePath& c) {
      for (std::size_t i = 0; i < c.size(); ++i)
        if (*edge(from + static_cast<std::int64_t>(i)) != c[i])
          throw Error("not_in_image", "connector mismatch in block at " + std::to_string(m));
    };
    if (xi.empty() || !exit) throw Error("not_in_image", "malformed block at " + std::to_string(m));
    check(m + L, k.connectors.at(gr.edge(k.marker.edges.back()).trg, gr.edge(xi.front()).src));
    check(m + g - K, k.connectors.at(gr.edge(xi.back()).trg, *exit));
    Word w;
    try {
      w = xi_decode(k, static_cast<std::size_t>(g), xi);
    } catch (const Error& e) {
      throw Error("not_in_image", "block at " + std::to_string(m) + ": " + e.what());
    }
    return blocks_.emplace(key, std::move(w)).first->second;
  }

  const EmbeddingCode* code_;
  const Window<Symbol>* y_;
  std::vector<std::optional<EdgeId>> edges_;
  bool synced_ = false;
  std::map<std::pair<std::int64_t, std::int64_t>, Word> blocks_;
};

/// Recovers coordinates [s, t) of the point from a view of its image labels.
inline PointWindow decode_point(const EmbeddingCode& code, const Window<Symbol>& y, std::int64_t s, std::int64_t t) {
  Decoder d(code, y);
  return d.run(s, t);
}

}  // namespace sofic

#pragma once

// Building, serializing and verifying an embedding code.

#include <random>
#include <set>
#include <string>
#include <vector>

#include <boost/random/uniform_int_distribution.hpp>

#include "sofic/codec.hpp"

namespace sofic {

struct EmbeddingOptions {
  MarkerOptions marker;
  std::size_t max_n = 8;               // precondition census bound
  std::size_t calibration_samples = 1024;
  std::size_t max_window_factor = 40;  // window search stops at this many ell
  std::uint64_t seed = 0;
};

namespace detail {

inline Word random_word(const LanguageIndex& idx, std::size_t n, std::mt19937_64& rng) {
  auto total = idx.count(n);
  if (total == 0) throw Error("empty_language", "no words of length " + std::to_string(n));
  boost::random::uniform_int_distribution<Count> pick(0, total - 1);
  return idx.unrank(n, pick(rng));
}

/// True iff the encoder decides coordinate j from x[j - w, j + w] alone.
inline bool decided_within(const EmbeddingCode& code, const PointWindow& x, std::int64_t j, std::size_t w) {
  const auto r = static_cast<std::int64_t>(w);
  PointWindow slice{j - r, Word(x.slice(j - r, j + r + 1).begin(), x.slice(j - r, j + r + 1).end())};
  try {
    Encoder e(code, slice);
    e.at(j);
    return true;
  } catch (const Error& err) {
    if (err.name() == "unstable_marker" || err.name() == "insufficient_context") return false;
    throw;
  }
}

inline std::size_t reset_after(const EdgeMatcher& m, const LabeledGraph& g, Vertex u, const EdgePath& c) {
  std::optional<std::size_t> common;
  std::vector<std::size_t> start{0};
  for (std::size_t s = 1; s < m.length(); ++s)
    if (g.edge(m.pattern()[s - 1]).trg == u) start.push_back(s);
  for (auto s : start) {
    auto end = m.run_safe(s, c);
    if (!end || (common && *common != *end)) throw Error("invalid_code", "connector does not reset the matcher");
    common = end;
  }
  return *common;
}

}  // namespace detail

/// Smallest radius, in steps of one, for which every calibration sample
/// decides its centre coordinate. Decisions are sound when made, so a
/// per-sample binary search over the radius is exact.
inline std::pair<std::size_t, json> calibrate_window(const EmbeddingCode& code, const EmbeddingOptions& opt) {
  const auto lo = code.reach() + 2 * code.ell();
  const auto hi = std::max(lo, opt.max_window_factor * code.ell());
  LanguageIndex idx(code.x, 2 * hi + 1);
  std::mt19937_64 rng(opt.seed);
  std::size_t best = lo, worst_sample = 0;
  for (std::size_t s = 0; s < opt.calibration_samples; ++s) {
    PointWindow x{-static_cast<std::int64_t>(hi), detail::random_word(idx, 2 * hi + 1, rng)};
    if (!detail::decided_within(code, x, 0, hi))
      throw Error("window_calibration_failed", "sample " + std::to_string(s) + " is undecided within radius " +
                                                   std::to_string(hi));
    std::size_t a = lo, b = hi;
    while (a < b) {
      auto mid = (a + b) / 2;
      if (detail::decided_within(code, x, 0, mid))
        b = mid;
      else
        a = mid + 1;
    }
    if (a > best) {
      best = a;
      worst_sample = s;
    }
  }
  json cert{{"samples", opt.calibration_samples},
            {"seed", opt.seed},
            {"floor", lo},
            {"ceiling", hi},
            {"measured", best},
            {"worst_sample", worst_sample}};
  return {best, cert};
}

inline EmbeddingCode build_embedding(const Presentation& x, const Presentation& y, const EmbeddingOptions& opt = {}) {
  auto pre = embeddability_precondition(x, y, opt.max_n, opt.marker.tol);
  if (!pre.pass()) {
    std::string failed;
    for (const auto& v : pre.verdicts)
      if (v.required && !v.pass) failed += (failed.empty() ? "" : ", ") + v.name;
    throw Error("precondition_failed", "failed checks: " + failed);
  }
  auto stage = [](const char* name, auto&& f) {
    try {
      return f();
    } catch (const Error& e) {
      throw Error(e.name(), std::string(name) + ": " + e.what());
    }
  };
  auto cover = stage("cover", [&] { return build_fischer_cover(y); });
  auto kit = stage("marker", [&] { return build_marker_kit(x, cover, opt.marker); });
  auto match = stage("orbit_match", [&] { return match_periodic_orbits(x, cover, kit); });
  EmbeddingCode code{x, cover, std::move(kit), std::move(match), 0, json::object()};
  auto [w, wcert] = stage("window", [&] { return calibrate_window(code, opt); });
  // slack on top of the largest radius the calibration runs needed
  const auto slack = 3 * code.ell() + code.kit.L() + 2 * code.kit.K();
  code.window = w + slack;
  wcert["slack"] = slack;

  json blocks = json::array();
  for (const auto& c : code.kit.block.certificates)
    blocks.push_back(json{{"l", c.l}, {"x_words", c.x_words.str()}, {"payloads", c.payloads.str()}});
  auto cx = periodic_census(x, code.ell());
  json orbits = json::array();
  for (std::size_t n = 1; n <= code.ell(); ++n) orbits.push_back(cx.orbits[n].str());
  code.certificates = json{{"precondition", pre.to_json()},
                           {"block_length", blocks},
                           {"x_orbits", orbits},
                           {"matched_orbits", code.match.pairs().size()},
                           {"window", wcert}};
  return code;
}

inline json code_to_json(const EmbeddingCode& c) {
  const auto& k = c.kit;
  const auto& g = c.cover.graph();
  json j;
  j["x"] = to_json(c.x);
  j["cover"] = cover_to_json(c.cover);
  j["marker"] = json{{"edges", k.marker.edges},
                     {"label", c.cover.alphabet().format(k.marker.label)},
                     {"L", k.L()},
                     {"construction", k.marker.construction},
                     {"pumps", k.pumps}};
  json table = json::object();
  for (Vertex u = 0; u < g.num_vertices(); ++u)
    for (Vertex w = 0; w < g.num_vertices(); ++w) table[g.name(u) + "|" + g.name(w)] = k.connectors.at(u, w);
  j["connectors"] = json{{"K", k.K()}, {"table", table}};
  j["ell"] = k.ell();
  json om = json::array();
  for (const auto& p : c.match.pairs()) {
    json from = json::array();
    for (auto s : p.from) from.push_back(c.x.alphabet().token(s));
    om.push_back(json{{"n", p.n}, {"from", from}, {"to", p.to}, {"phase", p.phase}});
  }
  j["orbit_match"] = om;
  j["window"] = c.window;
  j["certificates"] = c.certificates;
  return j;
}

/// Rebuilds a code and re-checks the block-length certificates, the connector
/// resets and the orbit pairs. Error "invalid_code" otherwise.
inline EmbeddingCode code_from_json(const json& doc) {
  try {
    auto x = presentation_from_json(doc.at("x"));
    auto cover = cover_from_json(doc.at("cover"));
    const auto& g = cover.graph();
    const auto& jm = doc.at("marker");
    auto edges = jm.at("edges").get<EdgePath>();
    for (auto e : edges)
      if (e >= g.num_edges()) throw Error("invalid_code", "marker edge out of range");
    if (edges.empty() || !g.is_path(edges)) throw Error("invalid_code", "marker is not a path");
    auto marker = detail::assemble_marker(cover, jm.at("construction").get<std::string>(), edges, {}, 0);
    if (!marker.border_free || !marker.synchronizing) throw Error("invalid_code", "marker is not a marker");
    EdgeMatcher matcher(marker.edges);

    ConnectorTable conn;
    conn.K = doc.at("connectors").at("K").get<std::size_t>();
    const auto nv = g.num_vertices();
    conn.table.assign(nv, std::vector<EdgePath>(nv));
    conn.reset.assign(nv, std::vector<std::size_t>(nv, 0));
    for (Vertex u = 0; u < nv; ++u)
      for (Vertex w = 0; w < nv; ++w) {
        auto c = doc.at("connectors").at("table").at(g.name(u) + "|" + g.name(w)).get<EdgePath>();
        if (c.size() != conn.K || !g.is_path(c) || g.edge(c.front()).src != u || g.edge(c.back()).trg != w)
          throw Error("invalid_code", "bad connector " + g.name(u) + "|" + g.name(w));
        conn.reset[u][w] = detail::reset_after(matcher, g, u, c);
        conn.table[u][w] = std::move(c);
      }

    const auto ell = doc.at("ell").get<std::size_t>();
    const auto L = marker.length(), K = conn.K;
    if (ell <= 2 * (L + K)) throw Error("invalid_code", "block length too small");
    LanguageIndex xs(x, 4 * ell);
    AvoidanceIndex ps(g, matcher, payload_start_states(cover, marker, conn), 4 * ell - L - 2 * K);
    BlockLengthChoice b{ell, L, K, {}};
    for (auto l = ell; l <= 4 * ell; ++l) {
      Certificate cert{l, xs.count(l), ps.count(b.pay(l))};
      if (cert.x_words > cert.payloads) throw Error("invalid_code", "payloads too few at l=" + std::to_string(l));
      b.certificates.push_back(std::move(cert));
    }
    MarkerKit kit{marker, matcher, std::move(conn), std::move(b), jm.value("pumps", std::size_t{0}), std::move(xs),
                  std::move(ps)};

    std::vector<OrbitPair> pairs;
    for (const auto& e : doc.at("orbit_match")) {
      OrbitPair p;
      p.n = e.at("n").get<std::size_t>();
      for (const auto& t : e.at("from")) p.from.push_back(x.alphabet().at(t.get<std::string>()));
      p.to = e.at("to").get<EdgePath>();
      p.phase = e.value("phase", std::int64_t{0});
      if (p.from.size() != p.n || p.to.size() != p.n || p.phase != 0 || !g.is_path(p.to) ||
          g.edge(p.to.back()).trg != g.edge(p.to.front()).src)
        throw Error("invalid_code", "malformed orbit pair");
      p.to_label = cover.labels(p.to);
      pairs.push_back(std::move(p));
    }
    EmbeddingCode code{std::move(x), std::move(cover), std::move(kit), OrbitMatch(std::move(pairs)),
                       doc.at("window").get<std::size_t>(), doc.value("certificates", json::object())};
    return code;
  } catch (const json::exception& e) {
    throw Error("invalid_code", e.what());
  }
}

struct VerifyOptions {
  std::size_t periods = 8;
  std::size_t samples = 100;
  std::uint64_t seed = 0;
  std::size_t span = 64;  // coordinates checked per sample
  std::size_t context_factor = 3;  // sample context in multiples of the window
};

namespace detail {

/// Periodic points of X of period dividing some n <= max_n, one word per
/// point: its values on [0, q) for the least period q.
inline std::vector<Word> periodic_points(const Presentation& x, std::size_t max_n) {
  auto d = right_resolving_presentation(x);
  std::vector<Word> out;
  for (std::size_t n = 1; n <= max_n; ++n)
    for (const auto& w : enumerate_words(x, n))
      if (cyclic_least_period(w) == n && !stable_image(d, w).empty()) out.push_back(w);
  return out;
}

}  // namespace detail

/// Image of a periodic point as its values on [0, q) for the least period q.
inline EdgePath periodic_image(const EmbeddingCode& code, const Word& w) {
  const auto n = static_cast<std::int64_t>(w.size());
  const auto r = static_cast<std::int64_t>(code.window);
  PointWindow x{-r, {}};
  for (auto c = -r; c < n + r; ++c) x.data.push_back(w[static_cast<std::size_t>(floor_mod(c, n))]);
  auto img = encode_point(code, x, 0, n).data;
  return EdgePath(img.begin(), img.begin() + static_cast<std::ptrdiff_t>(cyclic_least_period(img)));
}

/// Checks of the embedding: admissible image, injectivity and least periods on
/// periodic points, decoding, shift-equivariance, marker occurrences exactly at
/// the selected positions, and the sliding window radius.
inline Report verify_embedding(const EmbeddingCode& code, const VerifyOptions& opt = {}) {
  Report r;
  r.subject = "verify_embedding";
  const auto& g = code.cover.graph();
  const auto W = static_cast<std::int64_t>(code.window);
  const auto C = W * static_cast<std::int64_t>(opt.context_factor);
  const auto D = static_cast<std::int64_t>(code.decode_window());
  const auto span = static_cast<std::int64_t>(opt.span);
  const auto L = code.kit.L();

  std::size_t probes = 0, undecided = 0;
  json admissible_fail = nullptr, round_fail = nullptr, shift_fail = nullptr, marker_fail = nullptr,
       sliding_fail = nullptr;
  auto note = [](json& slot, json w) {
    if (slot.is_null()) slot = std::move(w);
  };

  // periodic points
  std::map<EdgePath, Word> images;
  json injective_fail = nullptr, period_fail = nullptr;
  auto points = detail::periodic_points(code.x, opt.periods);
  for (const auto& w : points) {
    EdgePath img;
    try {
      img = periodic_image(code, w);
    } catch (const Error& e) {
      note(admissible_fail, json{{"point", code.x.alphabet().format(w, " ")}, {"error", e.name()}, {"detail", e.what()}});
      continue;
    }
    if (!g.is_path(img) || g.edge(img.back()).trg != g.edge(img.front()).src)
      note(admissible_fail, json{{"point", code.x.alphabet().format(w, " ")}});
    if (img.size() != w.size() && w.size() <= code.ell())
      note(period_fail, json{{"point", code.x.alphabet().format(w, " ")}, {"image_period", img.size()}});
    auto [it, fresh] = images.emplace(img, w);
    if (!fresh)
      note(injective_fail, json{{"first", code.x.alphabet().format(it->second, " ")},
                                {"second", code.x.alphabet().format(w, " ")},
                                {"image", img}});
    // decode the periodic image back
    const auto n = static_cast<std::int64_t>(img.size());
    Window<Symbol> y{-D, {}};
    for (auto c = -D; c < n + D; ++c) y.data.push_back(g.edge(img[static_cast<std::size_t>(floor_mod(c, n))]).label);
    try {
      auto back = decode_point(code, y, 0, static_cast<std::int64_t>(w.size()));
      if (back.data != w) note(round_fail, json{{"point", code.x.alphabet().format(w, " ")}});
    } catch (const Error& e) {
      note(round_fail, json{{"point", code.x.alphabet().format(w, " ")}, {"error", e.name()}, {"detail", e.what()}});
    }
  }

  // random windows
  const auto len = static_cast<std::size_t>(span + 2 * (C + D) + 2);
  LanguageIndex idx(code.x, len);
  std::mt19937_64 rng(opt.seed);
  for (std::size_t s = 0; s < opt.samples; ++s) {
    PointWindow x{-(C + D), detail::random_word(idx, len, rng)};
    const std::int64_t lo = -D, hi = span + D;
    try {
      auto img = encode_point(code, x, lo, hi);
      if (!g.is_path(img.data)) note(admissible_fail, json{{"sample", s}});

      Window<Symbol> y{lo, {}};
      for (auto e : img.data) y.data.push_back(g.edge(e).label);
      auto back = decode_point(code, y, 0, span);
      if (back.data != Word(x.slice(0, span).begin(), x.slice(0, span).end()))
        note(round_fail, json{{"sample", s}});

      // same view one step later
      PointWindow shifted{x.origin - 1, x.data};
      auto img2 = encode_point(code, shifted, lo - 1, hi - 1);
      if (img2.data != img.data) note(shift_fail, json{{"sample", s}});

      Encoder enc(code, x);
      std::set<std::int64_t> selected, found;
      for (auto m = lo; m + static_cast<std::int64_t>(L) <= hi; ++m)
        if (enc.selector().status(m) == MarkerStatus::Selected) selected.insert(m);
      EdgeMatcher finder(code.kit.marker.edges);
      for (auto p : finder.occurrences(img.data)) found.insert(lo + static_cast<std::int64_t>(p - L));
      if (selected != found)
        note(marker_fail, json{{"sample", s}, {"selected", selected.size()}, {"occurrences", found.size()}});

      for (std::int64_t j = 0; j < span; j += std::max<std::int64_t>(1, span / 4)) {
        ++probes;
        if (!detail::decided_within(code, x, j, code.window)) {
          ++undecided;
          continue;
        }
        PointWindow slice{j - W, Word(x.slice(j - W, j + W + 1).begin(), x.slice(j - W, j + W + 1).end())};
        if (Encoder(code, slice).at(j) != img.at(j)) note(sliding_fail, json{{"sample", s}, {"coordinate", j}});
      }
    } catch (const Error& e) {
      note(round_fail, json{{"sample", s}, {"error", e.name()}, {"detail", e.what()}});
    }
  }

  auto add = [&](const std::string& name, const json& fail, json info) {
    if (!fail.is_null()) info["witness"] = fail;
    r.add(name, fail.is_null(), info);
  };
  json pinfo{{"periods", opt.periods}, {"points", points.size()}};
  json sinfo{{"samples", opt.samples}, {"seed", opt.seed}, {"span", opt.span}};
  add("admissible", admissible_fail, sinfo);
  add("injective_on_periodic_points", injective_fail, pinfo);
  add("least_period_preserved", period_fail, pinfo);
  add("round_trip", round_fail, sinfo);
  add("shift_equivariant", shift_fail, sinfo);
  add("markers_exact", marker_fail, sinfo);
  add("sliding_window", sliding_fail, json{{"window", code.window}, {"context", C}});
  // the calibrated radius is empirical: coordinates it leaves undecided are counted, not failed
  r.add("window_coverage", undecided == 0,
        json{{"window", code.window}, {"probes", probes}, {"undecided", undecided}}, false);
  return r;
}

}  // namespace sofic

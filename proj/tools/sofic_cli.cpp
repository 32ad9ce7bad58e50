// sofic: command-line front end. Every run prints exactly one JSON report on
// stdout. Exit status 0 on success, 1 on a failed check, 2 on usage or I/O
// errors.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sofic/sofic.hpp"

using namespace sofic;

namespace {

struct UsageError : std::runtime_error {
  std::string name;
  UsageError(std::string n, const std::string& what) : std::runtime_error(what), name(std::move(n)) {}
};

std::string read_input(const std::string& path) {
  std::stringstream ss;
  if (path == "-") {
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream f(path);
  if (!f) throw UsageError("io_error", "cannot read " + path);
  ss << f.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f || !(f << text)) throw UsageError("io_error", "cannot write " + path);
}

Presentation load_presentation(const std::string& path) {
  auto text = read_input(path);
  try {
    return parse_presentation(text);
  } catch (const Error& e) {
    throw UsageError(e.name(), path + ": " + e.what());
  }
}

EmbeddingCode load_code(const std::string& path) {
  auto text = read_input(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw UsageError("invalid_json", path + ": " + e.what());
  }
  try {
    return code_from_json(doc);
  } catch (const Error& e) {
    throw UsageError(e.name(), path + ": " + e.what());
  }
}

std::vector<std::string> read_tokens(const std::string& path) {
  std::istringstream in(read_input(path));
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

Word tokens_to_word(const Alphabet& a, const std::vector<std::string>& tokens) {
  Word w;
  for (const auto& t : tokens) {
    auto s = a.find(t);
    if (!s) throw UsageError("unknown_symbol", "symbol '" + t + "' is not in the alphabet");
    w.push_back(*s);
  }
  return w;
}

std::string join(const Alphabet& a, const Word& w) { return a.format(w, " "); }

struct Options {
  std::string in, x, y, out, code, word;
  std::size_t max_n = 8, periods = 8, samples = 100;
  std::uint64_t seed = 0;
  double tol = 1e-12;
};

int cmd_cover(const Options& o, json& r) {
  auto p = load_presentation(o.in);
  auto c = build_fischer_cover(p);
  auto s = structural_report(c);
  auto lift = lift_hypothesis_check(c, o.max_n);
  r["cover"] = cover_to_json(c);
  r["structure"] = s.to_json();
  r["lift_hypothesis"] = lift.to_json();
  return 0;
}

int cmd_invariants(const Options& o, json& r) {
  auto p = load_presentation(o.in);
  r["census"] = periodic_census(p, o.max_n).to_json();
  try {
    auto c = build_fischer_cover(p);
    r["irreducible"] = true;
    r["entropy"] = entropy(c, o.tol).to_json();
    r["structure"] = structural_report(c).to_json();
  } catch (const Error& e) {
    if (e.name() != "reducible_presentation") throw;
    r["irreducible"] = false;
    r["entropy"] = entropy_any(p, o.tol).to_json();
  }
  return 0;
}

int cmd_check(const Options& o, json& r) {
  auto rep = embeddability_precondition(load_presentation(o.x), load_presentation(o.y), o.max_n, o.tol);
  r["precondition"] = rep.to_json();
  return rep.pass() ? 0 : 1;
}

int cmd_build(const Options& o, json& r) {
  EmbeddingOptions eo;
  eo.max_n = o.max_n;
  eo.seed = o.seed;
  eo.marker.tol = o.tol;
  auto x = load_presentation(o.x), y = load_presentation(o.y);
  auto code = [&] {
    try {
      return build_embedding(x, y, eo);
    } catch (const Error& e) {
      if (e.name() == "precondition_failed")
        r["precondition"] = embeddability_precondition(x, y, o.max_n, o.tol).to_json();
      throw;
    }
  }();
  auto doc = code_to_json(code);
  json summary{{"ell", code.ell()},
               {"L", code.kit.L()},
               {"K", code.kit.K()},
               {"marker", doc["marker"]},
               {"window", code.window},
               {"decode_window", code.decode_window()},
               {"orbit_pairs", code.match.pairs().size()}};
  r["code_summary"] = summary;
  if (o.out.empty())
    r["code"] = doc;
  else {
    write_output(o.out, doc.dump());
    r["out"] = o.out;
  }
  return 0;
}

int cmd_encode(const Options& o, json& r) {
  auto code = load_code(o.code);
  auto x = tokens_to_word(code.x.alphabet(), read_tokens(o.word));
  const auto W = static_cast<std::int64_t>(code.window);
  const auto n = static_cast<std::int64_t>(x.size());
  if (n <= 2 * W) throw UsageError("word_too_short", "encoding needs more than 2*" + std::to_string(W) + " symbols");
  // coordinates run from 1
  PointWindow view{1, x};
  auto img = encode_point(code, view, 1 + W, 1 + n - W);
  auto labels = code.cover.labels(img.data);
  r["first_coordinate"] = 1 + W;
  r["last_coordinate"] = n - W;
  r["output"] = join(code.cover.alphabet(), labels);
  r["edges"] = img.data;
  if (!o.out.empty()) {
    write_output(o.out, join(code.cover.alphabet(), labels) + "\n");
    r["out"] = o.out;
  }
  return 0;
}

int cmd_decode(const Options& o, json& r) {
  auto code = load_code(o.code);
  auto y = tokens_to_word(code.cover.alphabet(), read_tokens(o.word));
  const auto D = static_cast<std::int64_t>(code.decode_window());
  const auto n = static_cast<std::int64_t>(y.size());
  if (n <= 2 * D) throw UsageError("word_too_short", "decoding needs more than 2*" + std::to_string(D) + " symbols");
  Window<Symbol> view{1, y};
  auto x = decode_point(code, view, 1 + D, 1 + n - D);
  r["first_coordinate"] = 1 + D;
  r["last_coordinate"] = n - D;
  r["output"] = join(code.x.alphabet(), x.data);
  if (!o.out.empty()) {
    write_output(o.out, join(code.x.alphabet(), x.data) + "\n");
    r["out"] = o.out;
  }
  return 0;
}

int cmd_verify(const Options& o, json& r) {
  auto code = load_code(o.code);
  auto rep = verify_embedding(code, VerifyOptions{o.periods, o.samples, o.seed});
  r["verify"] = rep.to_json();
  return rep.pass() ? 0 : 1;
}

void emit(const json& r) { std::cout << r.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sofic shifts: covers, invariants and marker embeddings"};
  app.require_subcommand(1);
  Options o;

  auto file_opt = [](CLI::App* s, const char* flag, std::string& dst, const char* help) {
    return s->add_option(flag, dst, help)->required();
  };
  auto* cover = app.add_subcommand("cover", "Fischer cover, structural report and lift check");
  file_opt(cover, "--in", o.in, "presentation JSON");
  cover->add_option("--max-n", o.max_n, "lift check bound")->check(CLI::PositiveNumber);

  auto* inv = app.add_subcommand("invariants", "periodic census and entropy");
  file_opt(inv, "--in", o.in, "presentation JSON");
  inv->add_option("--max-n", o.max_n, "census bound")->check(CLI::PositiveNumber);
  inv->add_option("--tol", o.tol, "entropy tolerance")->check(CLI::PositiveNumber);

  auto* check = app.add_subcommand("check-embed", "embedding precondition for X into Y");
  file_opt(check, "--x", o.x, "source presentation");
  file_opt(check, "--y", o.y, "target presentation");
  check->add_option("--max-n", o.max_n, "census bound")->check(CLI::PositiveNumber);
  check->add_option("--tol", o.tol, "entropy tolerance")->check(CLI::PositiveNumber);

  auto* build = app.add_subcommand("build-embed", "construct an embedding code");
  file_opt(build, "--x", o.x, "source presentation");
  file_opt(build, "--y", o.y, "target presentation");
  build->add_option("--out", o.out, "write the code here instead of into the report");
  build->add_option("--max-n", o.max_n, "precondition census bound")->check(CLI::PositiveNumber);
  build->add_option("--seed", o.seed, "calibration seed");
  build->add_option("--tol", o.tol, "entropy tolerance")->check(CLI::PositiveNumber);

  auto* enc = app.add_subcommand("encode", "encode a word of X");
  file_opt(enc, "--code", o.code, "embedding code JSON");
  file_opt(enc, "--word", o.word, "word file, '-' for stdin");
  enc->add_option("--out", o.out, "also write the output word here");

  auto* dec = app.add_subcommand("decode", "decode a label word of Y");
  file_opt(dec, "--code", o.code, "embedding code JSON");
  file_opt(dec, "--word", o.word, "word file, '-' for stdin");
  dec->add_option("--out", o.out, "also write the output word here");

  auto* ver = app.add_subcommand("verify", "verify an embedding code");
  file_opt(ver, "--code", o.code, "embedding code JSON");
  ver->add_option("--periods", o.periods, "period bound for periodic points")->check(CLI::PositiveNumber);
  ver->add_option("--samples", o.samples, "random windows");
  ver->add_option("--seed", o.seed, "sampling seed");

  json r;
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cerr << app.help();
    emit(json{{"status", "help"}});
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    emit(json{{"status", "error"}, {"error", {{"name", "usage"}, {"detail", e.what()}}}});
    return 2;
  }

  auto* sub = app.get_subcommands().front();
  r["command"] = sub->get_name();
  int code = 0;
  try {
    if (sub == cover) code = cmd_cover(o, r);
    else if (sub == inv) code = cmd_invariants(o, r);
    else if (sub == check) code = cmd_check(o, r);
    else if (sub == build) code = cmd_build(o, r);
    else if (sub == enc) code = cmd_encode(o, r);
    else if (sub == dec) code = cmd_decode(o, r);
    else code = cmd_verify(o, r);
    r["status"] = code == 0 ? "pass" : "fail";
  } catch (const UsageError& e) {
    r["status"] = "error";
    r["error"] = json{{"name", e.name}, {"detail", e.what()}};
    code = 2;
  } catch (const Error& e) {
    r["status"] = "fail";
    r["error"] = json{{"name", e.name()}, {"detail", e.what()}};
    code = 1;
  }
  emit(r);
  return code;
}

#pragma once

// Basic vocabulary shared by every module: symbol/vertex ids, exact counts,
// the named error type and the verdict report.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "json.hpp"

namespace sofic {

using Symbol = std::uint32_t;
using Vertex = std::uint32_t;
using EdgeId = std::uint32_t;

/// A finite word over an alphabet, stored as symbol indices.
using Word = std::vector<Symbol>;

/// A finite path, stored as edge ids of some graph.
using EdgePath = std::vector<EdgeId>;

/// Exact counts and ranks. Word counts grow like |alphabet|^n.
using Count = boost::multiprecision::cpp_int;

using json = nlohmann::ordered_json;

/// Error carrying a stable machine-readable name (e.g. "inadmissible_word").
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& what)
      : std::runtime_error(what), name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

struct Verdict {
  std::string name;
  bool pass = false;
  json witness = json::object();
  // informational verdicts are reported but do not affect Report::pass()
  bool required = true;
};

/// Structured pass/fail verdicts with witnesses.
struct Report {
  std::string subject;
  std::vector<Verdict> verdicts;

  Verdict& add(std::string name, bool pass, json witness = json::object(),
               bool required = true) {
    verdicts.push_back({std::move(name), pass, std::move(witness), required});
    return verdicts.back();
  }

  bool pass() const {
    for (const auto& v : verdicts)
      if (v.required && !v.pass) return false;
    return true;
  }

  bool has(const std::string& name) const {
    for (const auto& v : verdicts)
      if (v.name == name) return true;
    return false;
  }

  const Verdict& at(const std::string& name) const {
    for (const auto& v : verdicts)
      if (v.name == name) return v;
    throw Error("unknown_verdict", "no verdict named '" + name + "'");
  }

  json to_json() const {
    json out;
    out["subject"] = subject;
    out["pass"] = pass();
    json arr = json::array();
    for (const auto& v : verdicts) {
      json j;
      j["name"] = v.name;
      j["pass"] = v.pass;
      j["required"] = v.required;
      j["witness"] = v.witness;
      arr.push_back(std::move(j));
    }
    out["verdicts"] = std::move(arr);
    return out;
  }
};

inline std::string to_string(const Count& c) { return c.str(); }

}  // namespace sofic

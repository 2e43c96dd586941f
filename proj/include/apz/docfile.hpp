#pragma once

/// @file docfile.hpp
/// JSON description files for exponential sums: parsing (strict — unknown keys
/// rejected), validation via validate_sum, and canonical re-serialization.
///
/// Document shape:
/// {
///   "basis":   [{"name": "log2", "value": 0.693...}, ...],        // optional
///   "terms":   [{"coeff": {"re": 1.0, "im": 0.0},
///                "exponent": -0.693...,
///                "coords": ["-1", "0"]}, ...],                    // coords optional
///   "strip":   {"alpha": -3.0 | "-inf", "beta": 3.0 | "inf"},
///   "tail":    {"epsilon": 0.06, "alpha": -1.0, "beta": 0.0},     // optional
///   "independent": true                                            // optional
/// }

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "core.hpp"

namespace apz::docfile {

using nlohmann::json;

struct SumDocument {
  ExponentialSum sum;    // validated
  VerticalStrip strip;
};

namespace detail {

inline void require_keys(const json& obj, const char* where,
                         std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        ok = true;
        break;
      }
    if (!ok)
      throw ValidationError(std::string(where) + ": unknown key \"" + item.key() + "\"");
  }
}

inline double finite_number(const json& v, const char* what) {
  if (!v.is_number())
    throw ValidationError(std::string(what) + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ValidationError(std::string(what) + " must be finite");
  return x;
}

inline double strip_edge(const json& v, bool low) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (low && s == "-inf") return -kInf;
    if (!low && s == "inf") return kInf;
    throw ValidationError(std::string("strip.") + (low ? "alpha" : "beta") +
                          ": expected a number or \"" + (low ? "-inf" : "inf") + "\"");
  }
  return finite_number(v, low ? "strip.alpha" : "strip.beta");
}

}  // namespace detail

inline SumDocument parse(const json& doc) {
  if (!doc.is_object()) throw ValidationError("document must be a JSON object");
  detail::require_keys(doc, "document", {"basis", "terms", "strip", "tail", "independent"});

  ExponentialSum sum;

  if (doc.contains("basis")) {
    const json& basis = doc.at("basis");
    if (!basis.is_array()) throw ValidationError("\"basis\" must be an array");
    for (const json& g : basis) {
      if (!g.is_object()) throw ValidationError("basis entry must be an object");
      detail::require_keys(g, "basis entry", {"name", "value"});
      if (!g.contains("name") || !g.at("name").is_string())
        throw ValidationError("basis entry needs a string \"name\"");
      sum.basis_symbols.push_back(
          {g.at("name").get<std::string>(), detail::finite_number(g.at("value"), "basis value")});
    }
  }

  if (!doc.contains("terms") || !doc.at("terms").is_array() || doc.at("terms").empty())
    throw ValidationError("\"terms\" must be a non-empty array");
  for (const json& t : doc.at("terms")) {
    if (!t.is_object()) throw ValidationError("term must be an object");
    detail::require_keys(t, "term", {"coeff", "exponent", "coords"});
    if (!t.contains("coeff") || !t.at("coeff").is_object())
      throw ValidationError("term needs a \"coeff\" object");
    detail::require_keys(t.at("coeff"), "coeff", {"re", "im"});
    if (!t.at("coeff").contains("re") || !t.at("coeff").contains("im"))
      throw ValidationError("coeff needs \"re\" and \"im\"");
    Term term;
    term.coeff = {detail::finite_number(t.at("coeff").at("re"), "coeff.re"),
                  detail::finite_number(t.at("coeff").at("im"), "coeff.im")};
    if (!t.contains("exponent"))
      throw ValidationError("term needs an \"exponent\"");
    term.exponent = detail::finite_number(t.at("exponent"), "exponent");
    if (t.contains("coords")) {
      if (!t.at("coords").is_array()) throw ValidationError("\"coords\" must be an array");
      RationalVector coords;
      for (const json& c : t.at("coords")) {
        if (!c.is_string()) throw ValidationError("coords entries must be \"p/q\" strings");
        try {
          coords.push_back(parse_rational(c.get<std::string>()));
        } catch (const std::invalid_argument& e) {
          throw ValidationError(e.what());
        }
      }
      term.coords = std::move(coords);
    }
    sum.terms.push_back(std::move(term));
  }

  if (!doc.contains("strip") || !doc.at("strip").is_object())
    throw ValidationError("document needs a \"strip\" object");
  detail::require_keys(doc.at("strip"), "strip", {"alpha", "beta"});
  if (!doc.at("strip").contains("alpha") || !doc.at("strip").contains("beta"))
    throw ValidationError("strip needs \"alpha\" and \"beta\"");
  VerticalStrip strip{detail::strip_edge(doc.at("strip").at("alpha"), true),
                      detail::strip_edge(doc.at("strip").at("beta"), false)};
  if (!(strip.alpha < strip.beta)) throw ValidationError("strip must satisfy alpha < beta");

  if (doc.contains("tail")) {
    const json& t = doc.at("tail");
    if (!t.is_object()) throw ValidationError("\"tail\" must be an object");
    detail::require_keys(t, "tail", {"epsilon", "alpha", "beta"});
    if (!t.contains("epsilon") || !t.contains("alpha") || !t.contains("beta"))
      throw ValidationError("tail needs \"epsilon\", \"alpha\", \"beta\"");
    TailBound tb;
    tb.epsilon = detail::finite_number(t.at("epsilon"), "tail.epsilon");
    tb.valid_on = {detail::finite_number(t.at("alpha"), "tail.alpha"),
                   detail::finite_number(t.at("beta"), "tail.beta")};
    sum.tail = tb;
  }

  if (doc.contains("independent")) {
    if (!doc.at("independent").is_boolean())
      throw ValidationError("\"independent\" must be a boolean");
    sum.independence_declared = doc.at("independent").get<bool>();
  }

  return {validate_sum(std::move(sum)), strip};
}

inline SumDocument load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open \"" + path + "\"");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("JSON parse error in \"" + path + "\": " + e.what());
  }
  return parse(doc);
}

/// Canonical serialization, re-parseable by parse(). Terms appear in the
/// validated (sorted) order.
inline json to_json(const ExponentialSum& sum, const VerticalStrip& strip) {
  json doc;
  if (!sum.basis_symbols.empty()) {
    json basis = json::array();
    for (const BasisSymbol& g : sum.basis_symbols)
      basis.push_back({{"name", g.name}, {"value", g.value}});
    doc["basis"] = std::move(basis);
  }
  json terms = json::array();
  for (const Term& t : sum.terms) {
    json jt;
    jt["coeff"] = {{"re", t.coeff.real()}, {"im", t.coeff.imag()}};
    jt["exponent"] = t.exponent;
    if (t.coords) {
      json coords = json::array();
      for (const Rational& c : *t.coords) coords.push_back(format_rational(c));
      jt["coords"] = std::move(coords);
    }
    terms.push_back(std::move(jt));
  }
  doc["terms"] = std::move(terms);
  doc["strip"] = {
      {"alpha", std::isfinite(strip.alpha) ? json(strip.alpha) : json("-inf")},
      {"beta", std::isfinite(strip.beta) ? json(strip.beta) : json("inf")},
  };
  if (sum.tail)
    doc["tail"] = {{"epsilon", sum.tail->epsilon},
                   {"alpha", sum.tail->valid_on.alpha},
                   {"beta", sum.tail->valid_on.beta}};
  if (sum.independence_declared) doc["independent"] = true;
  return doc;
}

}  // namespace apz::docfile

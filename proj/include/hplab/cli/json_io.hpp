#pragma once

#include <json.hpp>

#include <cctype>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "hplab/germ.hpp"

namespace hplab::cli {

using json = nlohmann::ordered_json;

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Output precision for decimal strings.
inline constexpr int kOutputDigits = 30;

inline std::string dec(const BigReal& x) { return to_decimal(x, kOutputDigits); }
inline json dec(const BigComplex& z) { return json::array({dec(z.real()), dec(z.imag())}); }
inline std::string dec(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
inline std::string dec(long x) { return std::to_string(x); }
inline std::string dec(int x) { return std::to_string(x); }
inline std::string dec(std::size_t x) { return std::to_string(x); }

inline json dec(const Poly& p) {
  json a = json::array();
  for (const auto& c : p.coeffs()) a.push_back(dec(c));
  return a;
}

// "re" or ["re", "im"].
inline Num num_from_json(const json& j) {
  if (j.is_string()) return Num(j.get<std::string>());
  if (j.is_array() && j.size() == 2 && j[0].is_string() && j[1].is_string())
    return Num(j[0].get<std::string>(), j[1].get<std::string>());
  throw ConfigError("numbers are decimal strings or [re, im] string pairs, got " + j.dump());
}

// Inverse of num_from_json_any; an integer multiplier is kept as a field.
inline json num_to_json(const Num& n) {
  json v = n.is_real() ? json(n.re) : json::array({n.re, n.im});
  if (n.mult == 1) return v;
  return {{"value", json::array({n.re, n.im})}, {"mult", std::to_string(n.mult)}};
}

inline Num num_from_json_any(const json& j) {
  if (j.is_object()) {
    Num n = num_from_json(j.at("value"));
    n.mult = std::stol(j.at("mult").get<std::string>());
    return n;
  }
  return num_from_json(j);
}

inline Factor factor_from_json(const json& j) {
  return {num_from_json_any(j.at("point")), num_from_json_any(j.at("exponent"))};
}

inline ProductTerm product_from_json(const json& j) {
  ProductTerm t;
  if (j.contains("scale")) t.scale = num_from_json_any(j["scale"]);
  if (j.contains("power")) t.power = std::stol(j["power"].get<std::string>());
  for (const auto& f : j.at("factors")) t.factors.push_back(factor_from_json(f));
  if (j.contains("anchor")) {
    const auto& a = j["anchor"];
    Anchor an{num_from_json_any(a.at("point")), num_from_json_any(a.at("value"))};
    if (a.contains("exponent")) an.exponent = num_from_json_any(a["exponent"]);
    t.anchor = an;
  }
  return t;
}

// {"label": ..., "terms": [{"weight": w, "product"|"log"|"constant": ...}]}
// or the shorthand {"factors": [...]} for a single product term.
inline Germ germ_from_json(const json& j) {
  try {
    Germ g;
    if (j.contains("label")) g.label = j["label"].get<std::string>();
    if (j.contains("factors")) {
      g.terms.push_back({"1", product_from_json(j)});
      return g;
    }
    for (const auto& t : j.at("terms")) {
      WeightedTerm w;
      if (t.contains("weight")) w.weight = num_from_json_any(t["weight"]);
      if (t.contains("product"))
        w.term = product_from_json(t["product"]);
      else if (t.contains("log"))
        w.term = LogTerm{num_from_json_any(t["log"].at("a")), num_from_json_any(t["log"].at("b"))};
      else if (t.contains("constant"))
        w.term = ConstantTerm{num_from_json_any(t["constant"])};
      else
        throw ConfigError("term needs one of product, log, constant: " + t.dump());
      g.terms.push_back(std::move(w));
    }
    if (g.terms.empty()) throw ConfigError("germ has no terms");
    return g;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed germ: ") + e.what());
  }
}

inline json germ_to_json(const Germ& g) {
  json out;
  if (!g.label.empty()) out["label"] = g.label;
  json terms = json::array();
  for (const auto& w : g.terms) {
    json t;
    t["weight"] = num_to_json(w.weight);
    if (const auto* p = std::get_if<ProductTerm>(&w.term)) {
      json pj;
      pj["scale"] = num_to_json(p->scale);
      pj["power"] = std::to_string(p->power);
      json fs = json::array();
      for (const auto& f : p->factors) fs.push_back({{"point", num_to_json(f.point)}, {"exponent", num_to_json(f.exponent)}});
      pj["factors"] = fs;
      if (p->anchor)
        pj["anchor"] = {{"point", num_to_json(p->anchor->point)},
                        {"value", num_to_json(p->anchor->value)},
                        {"exponent", num_to_json(p->anchor->exponent)}};
      t["product"] = pj;
    } else if (const auto* l = std::get_if<LogTerm>(&w.term)) {
      t["log"] = {{"a", num_to_json(l->a)}, {"b", num_to_json(l->b)}};
    } else {
      t["constant"] = num_to_json(std::get<ConstantTerm>(w.term).value);
    }
    terms.push_back(t);
  }
  out["terms"] = terms;
  return out;
}

namespace detail {

inline std::string trim(std::string s) {
  auto b = s.find_first_not_of(" \t\n");
  auto e = s.find_last_not_of(" \t\n");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

}  // namespace detail

// Shorthand "p1^e1 p2^e2 ...", a point being "re" or "[re,im]":
//   "-1^1/3 1^-1/3"   "[-1.2,0.8]^1/3 [0.9,1.5]^1/3 [0.5,-1.2]^-2/3"
inline Germ germ_from_shorthand(const std::string& text) {
  std::vector<Factor> fs;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    Num point;
    if (text[i] == '[') {
      auto close = text.find(']', i);
      if (close == std::string::npos) throw ConfigError("unclosed '[' in germ shorthand");
      std::string inner = text.substr(i + 1, close - i - 1);
      auto comma = inner.find(',');
      if (comma == std::string::npos) throw ConfigError("complex point needs [re,im]");
      point = Num(detail::trim(inner.substr(0, comma)), detail::trim(inner.substr(comma + 1)));
      i = close + 1;
    } else {
      auto caret = text.find('^', i);
      if (caret == std::string::npos) throw ConfigError("factor without '^' in germ shorthand");
      point = Num(detail::trim(text.substr(i, caret - i)));
      i = caret;
    }
    if (i >= text.size() || text[i] != '^') throw ConfigError("expected '^' after the point in germ shorthand");
    auto end = text.find_first_of(" \t\n", i + 1);
    if (end == std::string::npos) end = text.size();
    std::string ex = text.substr(i + 1, end - i - 1);
    if (ex.empty()) throw ConfigError("missing exponent in germ shorthand");
    fs.push_back({point, Num(ex)});
    i = end;
  }
  if (fs.empty()) throw ConfigError("empty germ shorthand");
  try {
    for (const auto& f : fs) {
      (void)f.point.value();
      (void)f.exponent.value();
    }
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad number in germ shorthand: ") + e.what());
  }
  return Germ::product(std::move(fs));
}

}  // namespace hplab::cli

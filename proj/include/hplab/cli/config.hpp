#pragma once

#include <algorithm>
#include <complex>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hplab/cli/json_io.hpp"
#include "hplab/hermite.hpp"
#include "hplab/pade.hpp"
#include "hplab/policy.hpp"

namespace hplab::cli {

inline const std::set<std::string>& task_names() {
  static const std::set<std::string> t{"expand", "pade",        "pade2", "mpade", "jfrac",   "hp",       "roots", "zdist",
                                       "froissart", "nodes", "alternation", "rates", "ortho", "stahlgeo", "preset"};
  return t;
}

struct ExperimentConfig {
  std::string task;
  std::optional<Germ> germ;   // expansion at infinity
  std::optional<Germ> germ0;  // expansion at 0 (pade2)
  json nodes = json::array(); // mpade: [{"point": null | num, "germ": {...}, "multiplicity": k}]
  std::vector<std::string> poly;  // roots: ascending coefficients
  std::vector<int> n_list;
  PrecisionPolicy policy;
  std::string out_dir = "hplab-out";
  std::vector<std::string> formats{"json"};
  bool paper_scale = false;
  SignConvention convention = SignConvention::theorem1;
  TwoPointConvention two_point = TwoPointConvention::displayed;
  double window = std::numeric_limits<double>::infinity();
  double budget_seconds = 600;
  std::string preset;
  std::string which;      // task variant: pade | hp | q0 | q1 | q2
  std::string predictor = "none";
  std::vector<std::complex<double>> points;
  double theta = 0.1;
  double radius = 1e-3;   // Froissart matching radius
  double margin = 0.05;   // exclusion band around the limit set
  double eps = 0.05;      // disks around spurious points

  int n() const { return n_list.empty() ? 0 : n_list.back(); }
};

namespace detail {

inline double number(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    try {
      return std::stod(s);
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("expected a number, got " + j.dump());
}

inline int integer(const json& j) {
  double v = number(j);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("expected an integer, got " + j.dump());
  return static_cast<int>(v);
}

inline std::complex<double> point(const json& j) {
  if (j.is_array() && j.size() == 2) return {number(j[0]), number(j[1])};
  return {number(j), 0.0};
}

}  // namespace detail

inline void validate(const ExperimentConfig& c) {
  if (!task_names().count(c.task)) throw ConfigError("unknown task '" + c.task + "'");
  for (const auto& f : c.formats)
    if (f != "json" && f != "csv" && f != "svg") throw ConfigError("unknown format '" + f + "'");
  for (int n : c.n_list)
    if (n < 1) throw ConfigError("n must be at least 1");
  const std::set<std::string> germless{"preset", "roots", "mpade"};
  if (!germless.count(c.task) && !c.germ) throw ConfigError("task '" + c.task + "' needs a germ");
  const std::set<std::string> n_free{"preset", "roots", "stahlgeo"};
  if (!n_free.count(c.task) && c.n_list.empty()) throw ConfigError("task '" + c.task + "' needs n");
  if (c.task == "pade2" && !c.germ0) throw ConfigError("pade2 needs germ0, the expansion at 0");
  if (c.task == "mpade" && c.nodes.empty()) throw ConfigError("mpade needs nodes");
  if (c.task == "roots" && c.poly.size() < 2) throw ConfigError("roots needs a polynomial of degree at least 1");
  if (c.task == "preset" && c.preset.empty()) throw ConfigError("preset needs an id");
  if (c.task == "rates" && c.n_list.size() < 2) throw ConfigError("rates needs at least two n values");
  if (c.task == "alternation" && !(c.theta > 0 && c.theta < 1)) throw ConfigError("theta must lie in (0, 1)");
  if (!(c.budget_seconds > 0)) throw ConfigError("budget must be positive");
  if (!(c.radius > 0) || !(c.eps > 0) || c.margin < 0) throw ConfigError("radius and eps must be positive");
  const std::set<std::string> predictors{"none", "stahl_gE", "theorem1_GF", "buslaev_green"};
  if (!predictors.count(c.predictor)) throw ConfigError("unknown predictor '" + c.predictor + "'");
}

inline ExperimentConfig config_from_json(const json& j) {
  using detail::number;
  ExperimentConfig c;
  try {
    if (j.contains("task")) c.task = j["task"].get<std::string>();
    if (j.contains("germ")) c.germ = germ_from_json(j["germ"]);
    if (j.contains("germ0")) c.germ0 = germ_from_json(j["germ0"]);
    if (j.contains("nodes")) c.nodes = j["nodes"];
    if (j.contains("poly"))
      for (const auto& p : j["poly"]) c.poly.push_back(p.is_string() ? p.get<std::string>() : p.dump());
    if (j.contains("n")) c.n_list = {detail::integer(j["n"])};
    if (j.contains("n_list")) {
      c.n_list.clear();
      for (const auto& v : j["n_list"]) c.n_list.push_back(detail::integer(v));
    }
    if (j.contains("precision")) {
      const auto& p = j["precision"];
      if (p.contains("base")) c.policy.base = static_cast<unsigned>(detail::integer(p["base"]));
      if (p.contains("slope")) c.policy.slope = static_cast<unsigned>(detail::integer(p["slope"]));
      if (p.contains("retries")) c.policy.max_retries = detail::integer(p["retries"]);
    }
    if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
    if (j.contains("format")) c.formats = j["format"].get<std::vector<std::string>>();
    if (j.contains("paper_scale")) c.paper_scale = j["paper_scale"].get<bool>();
    if (j.contains("sign_convention")) {
      auto s = j["sign_convention"].get<std::string>();
      if (s == "theorem1")
        c.convention = SignConvention::theorem1;
      else if (s == "definition")
        c.convention = SignConvention::definition;
      else
        throw ConfigError("sign_convention is theorem1 or definition");
    }
    if (j.contains("two_point")) {
      auto s = j["two_point"].get<std::string>();
      if (s == "displayed")
        c.two_point = TwoPointConvention::displayed;
      else if (s == "footnote")
        c.two_point = TwoPointConvention::footnote;
      else
        throw ConfigError("two_point is displayed or footnote");
    }
    if (j.contains("window")) c.window = number(j["window"]);
    if (j.contains("budget_seconds")) c.budget_seconds = number(j["budget_seconds"]);
    if (j.contains("preset")) c.preset = j["preset"].get<std::string>();
    if (j.contains("which")) c.which = j["which"].get<std::string>();
    if (j.contains("predictor")) c.predictor = j["predictor"].get<std::string>();
    if (j.contains("points"))
      for (const auto& p : j["points"]) c.points.push_back(detail::point(p));
    if (j.contains("theta")) c.theta = number(j["theta"]);
    if (j.contains("radius")) c.radius = number(j["radius"]);
    if (j.contains("margin")) c.margin = number(j["margin"]);
    if (j.contains("eps")) c.eps = number(j["eps"]);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return c;
}

// Echo of the inputs; numbers as strings.
inline json config_to_json(const ExperimentConfig& c) {
  json j;
  j["task"] = c.task;
  if (c.germ) j["germ"] = germ_to_json(*c.germ);
  if (c.germ0) j["germ0"] = germ_to_json(*c.germ0);
  if (!c.nodes.empty()) j["nodes"] = c.nodes;
  if (!c.poly.empty()) j["poly"] = c.poly;
  json ns = json::array();
  for (int n : c.n_list) ns.push_back(std::to_string(n));
  j["n_list"] = ns;
  j["precision"] = {{"base", std::to_string(c.policy.base)},
                    {"slope", std::to_string(c.policy.slope)},
                    {"retries", std::to_string(c.policy.max_retries)}};
  j["paper_scale"] = c.paper_scale;
  j["sign_convention"] = c.convention == SignConvention::theorem1 ? "theorem1" : "definition";
  j["two_point"] = c.two_point == TwoPointConvention::displayed ? "displayed" : "footnote";
  j["window"] = dec(c.window);
  if (!c.preset.empty()) j["preset"] = c.preset;
  if (!c.which.empty()) j["which"] = c.which;
  j["predictor"] = c.predictor;
  json pts = json::array();
  for (auto z : c.points) pts.push_back(json::array({dec(z.real()), dec(z.imag())}));
  j["points"] = pts;
  j["theta"] = dec(c.theta);
  j["radius"] = dec(c.radius);
  j["margin"] = dec(c.margin);
  j["eps"] = dec(c.eps);
  return j;
}

}  // namespace hplab::cli

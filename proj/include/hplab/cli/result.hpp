#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "hplab/cli/json_io.hpp"
#include "hplab/cli/svg.hpp"
#include "hplab/roots.hpp"

namespace hplab::cli {

// Decimal string to double; values beyond double range saturate to 0 or inf.
inline double to_double(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

// kind is one of zero-Q0, zero-Q1, zero-Q2, zero-P, pole, node.
struct PointRecord {
  std::string kind, re, im, residual;
  friend bool operator==(const PointRecord&, const PointRecord&) = default;
};

inline const std::set<std::string>& point_kinds() {
  static const std::set<std::string> k{"zero-Q0", "zero-Q1", "zero-Q2", "zero-P", "pole", "node"};
  return k;
}

struct ExperimentResult {
  json inputs = json::object();
  json polynomials = json::object();  // name -> coefficient list
  std::vector<PointRecord> points;
  json measures = json::object();
  json metrics = json::object();       // name -> claim
  json certificates = json::object();
  json overlays = json::object();      // segments, arcs, viewport [xmin, xmax, ymin, ymax]
  json notes = json::array();
  unsigned digits = 0;
  bool partial = false;
  int achieved_n = 0;

  void add_zeros(const std::string& kind, const ZeroSet& zs) {
    for (std::size_t i = 0; i < zs.size(); ++i)
      points.push_back({kind, dec(zs.roots[i].real()), dec(zs.roots[i].imag()), dec(zs.residual[i])});
  }
  void add_point(const std::string& kind, double re, double im, const std::string& residual = "0") {
    points.push_back({kind, dec(re), dec(im), residual});
  }
  std::vector<cplx> points_of(const std::string& kind) const {
    std::vector<cplx> out;
    for (const auto& p : points)
      if (p.kind == kind) out.emplace_back(to_double(p.re), to_double(p.im));
    return out;
  }
};

// A numeric claim with the tolerance it is judged against and its precision.
inline json claim(const std::string& value, const std::string& tolerance, unsigned digits) {
  return {{"value", value}, {"tolerance", tolerance}, {"digits", std::to_string(digits)}};
}

inline json to_json(const ExperimentResult& r) {
  json j;
  j["inputs"] = r.inputs;
  j["digits"] = std::to_string(r.digits);
  j["partial"] = r.partial ? "true" : "false";
  j["achieved_n"] = std::to_string(r.achieved_n);
  j["polynomials"] = r.polynomials;
  json pts = json::array();
  for (const auto& p : r.points) pts.push_back({{"kind", p.kind}, {"re", p.re}, {"im", p.im}, {"residual", p.residual}});
  j["points"] = pts;
  j["measures"] = r.measures;
  j["metrics"] = r.metrics;
  j["certificates"] = r.certificates;
  j["overlays"] = r.overlays;
  j["notes"] = r.notes;
  return j;
}

inline ExperimentResult result_from_json(const json& j) {
  ExperimentResult r;
  r.inputs = j.at("inputs");
  r.digits = static_cast<unsigned>(std::stoul(j.at("digits").get<std::string>()));
  r.partial = j.at("partial").get<std::string>() == "true";
  r.achieved_n = std::stoi(j.at("achieved_n").get<std::string>());
  r.polynomials = j.at("polynomials");
  for (const auto& p : j.at("points"))
    r.points.push_back({p.at("kind"), p.at("re"), p.at("im"), p.at("residual")});
  r.measures = j.at("measures");
  r.metrics = j.at("metrics");
  r.certificates = j.at("certificates");
  r.overlays = j.at("overlays");
  r.notes = j.at("notes");
  return r;
}

inline std::string to_csv(const ExperimentResult& r) {
  std::string out = "kind,re,im,residual\n";
  for (const auto& p : r.points) out += p.kind + "," + p.re + "," + p.im + "," + p.residual + "\n";
  return out;
}

// Point sets in first-appearance order, blue/red/black as in the figures.
inline SvgScene scene_of(const ExperimentResult& r, const std::string& title) {
  static const std::vector<std::pair<std::string, std::string>> colors{
      {"zero-P", "blue"}, {"zero-Q0", "blue"}, {"pole", "red"}, {"zero-Q1", "red"}, {"zero-Q2", "black"}, {"node", "green"}};
  SvgScene s;
  s.title = title;
  for (const auto& p : r.points) {
    auto it = std::find_if(s.sets.begin(), s.sets.end(), [&](const PointSet& ps) { return ps.label == p.kind; });
    if (it == s.sets.end()) {
      std::string color = "gray";
      for (const auto& [k, c] : colors)
        if (k == p.kind) color = c;
      s.sets.push_back({p.kind, color, {}});
      it = s.sets.end() - 1;
    }
    it->points.emplace_back(to_double(p.re), to_double(p.im));
  }
  if (r.overlays.contains("segments"))
    for (const auto& seg : r.overlays["segments"])
      s.segments.push_back({to_double(seg[0].get<std::string>()), to_double(seg[1].get<std::string>())});
  if (r.overlays.contains("viewport")) {
    const auto& v = r.overlays["viewport"];
    s.viewport = Viewport{to_double(v[0].get<std::string>()), to_double(v[1].get<std::string>()),
                          to_double(v[2].get<std::string>()), to_double(v[3].get<std::string>())};
  }
  if (r.overlays.contains("arcs"))
    for (const auto& arc : r.overlays["arcs"]) {
      Polyline pl{"arc", "darkorange", {}};
      for (const auto& z : arc) pl.points.emplace_back(to_double(z[0].get<std::string>()), to_double(z[1].get<std::string>()));
      s.arcs.push_back(std::move(pl));
    }
  return s;
}

struct WrittenFiles {
  std::vector<std::filesystem::path> files;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
  if (!f) throw std::runtime_error("cannot write " + p.string());
}

// Writes <stem>.json / <stem>.csv / <stem>.svg per format into dir, plus the
// wall-clock sidecar <stem>.timing.json, which is the only run-dependent file.
inline WrittenFiles export_result(const ExperimentResult& r, const std::filesystem::path& dir, const std::string& stem,
                                  const std::vector<std::string>& formats, double seconds) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  WrittenFiles w;
  for (const auto& f : formats) {
    auto p = dir / (stem + "." + f);
    if (f == "json")
      write_text(p, to_json(r).dump(2) + "\n");
    else if (f == "csv")
      write_text(p, to_csv(r));
    else if (f == "svg")
      write_text(p, render_svg(scene_of(r, stem)));
    else
      throw ConfigError("unknown format '" + f + "'");
    w.files.push_back(p);
  }
  auto t = dir / (stem + ".timing.json");
  write_text(t, json{{"seconds", dec(seconds)}, {"digits", std::to_string(r.digits)}}.dump(2) + "\n");
  w.files.push_back(t);
  return w;
}

}  // namespace hplab::cli

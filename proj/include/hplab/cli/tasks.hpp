#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hplab/analysis.hpp"
#include "hplab/cli/config.hpp"
#include "hplab/cli/presets.hpp"
#include "hplab/cli/result.hpp"
#include "hplab/density.hpp"
#include "hplab/potential.hpp"

namespace hplab::cli {

struct TaskOutput {
  ExperimentResult result;
  std::string stem;  // file name stem
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

inline ZeroSet zeros_of(const Poly& p) {
  if (p.degree() < 1) return {};
  return find_roots(p);
}

inline std::string sci(double x) { return dec(x); }
inline std::string sci(const BigReal& x) { return to_decimal(x, 6); }

inline json certificate_json(const ResidualCertificate& c) {
  return {{"from_power", std::to_string(c.from_power)},
          {"to_power", std::to_string(c.to_power)},
          {"digits", std::to_string(c.digits)},
          {"verify_digits", std::to_string(c.verify_digits)},
          {"max_residual", sci(c.max_residual)},
          {"threshold", sci(c.threshold)},
          {"retries", std::to_string(c.retries)},
          {"ok", c.ok ? "true" : "false"}};
}

inline json root_summary(const ZeroSet& z) {
  BigReal worst = 0;
  for (const auto& r : z.residual) worst = std::max(worst, r);
  return {{"count", std::to_string(z.size())},
          {"max_residual", sci(worst)},
          {"digits", std::to_string(z.digits)},
          {"converged", z.ok ? "true" : "false"}};
}

inline std::vector<Interval> intervals(const std::vector<Segment>& E) {
  std::vector<Interval> v;
  for (const auto& s : E) v.push_back({s.lo, s.hi});
  return v;
}

inline json segments_json(const std::vector<Segment>& E) {
  json a = json::array();
  for (const auto& s : E) a.push_back(json::array({dec(s.lo), dec(s.hi)}));
  return a;
}

inline json arcs_json(const StahlGeometry& g) {
  json arcs = json::array();
  for (const auto& arc : g.arcs) {
    json a = json::array();
    // every 10th vertex keeps the overlay small; ends always kept
    for (std::size_t i = 0; i < arc.size(); ++i)
      if (i % 10 == 0 || i + 1 == arc.size()) a.push_back(json::array({dec(arc[i].real()), dec(arc[i].imag())}));
    arcs.push_back(a);
  }
  return arcs;
}

// Three distinct finite branch points of a single product, when present.
inline std::optional<std::array<BigComplex, 3>> three_branch_points(const Germ& g) {
  if (!g.is_single_product()) return std::nullopt;
  const auto& t = g.single_product();
  if (t.factors.size() != 3) return std::nullopt;
  std::array<BigComplex, 3> a;
  for (int k = 0; k < 3; ++k) a[k] = t.factors[k].point.value();
  return a;
}

inline StahlGeometry stahl_geometry(const std::array<BigComplex, 3>& a, unsigned digits, double* residual = nullptr) {
  auto ch = chebotarev_point(a, digits);
  if (residual) *residual = ch.residual.convert_to<double>();
  std::array<std::complex<double>, 3> ad;
  for (int k = 0; k < 3; ++k) ad[k] = a[k].to_cdouble();
  return trace_stahl_arcs(ad, ch.v.to_cdouble());
}

// Where zeros and poles accumulate: the cuts for a real-subclass germ, the
// Stahl arcs for three branch points, nothing otherwise.
inline LimitSet limit_set_of(const Germ& g) {
  if (is_real_subclass(g)) return LimitSet::segments(intervals(cut_system(g).E));
  if (auto a = three_branch_points(g)) {
    PrecisionScope scope(Precision{60});
    auto geo = stahl_geometry(*a, 60);
    LimitSet l;
    for (const auto& arc : geo.arcs) l.curves.push_back(arc);
    return l;
  }
  return {};
}

// Distance from z to the closure of R minus the open cuts.
inline double distance_to_complement(std::complex<double> z, const std::vector<Segment>& E) {
  double y = std::abs(z.imag()), x = z.real();
  for (const auto& s : E)
    if (x > s.lo && x < s.hi) return std::hypot(y, std::min(x - s.lo, s.hi - x));
  return y;
}

// Square window around the finite branch points, padded by half its size.
inline json viewport_of(const Germ& g, bool with_origin) {
  std::vector<cplx> pts;
  if (with_origin) pts.emplace_back(0, 0);
  for (const auto& w : g.terms) {
    if (const auto* p = std::get_if<ProductTerm>(&w.term))
      for (const auto& f : p->factors) pts.push_back(f.point.value().to_cdouble());
    else if (const auto* l = std::get_if<LogTerm>(&w.term))
      pts.push_back(l->a.value().to_cdouble()), pts.push_back(l->b.value().to_cdouble());
  }
  if (pts.empty()) return nullptr;
  double x0 = pts[0].real(), x1 = x0, y0 = pts[0].imag(), y1 = y0;
  for (auto z : pts) {
    x0 = std::min(x0, z.real()), x1 = std::max(x1, z.real());
    y0 = std::min(y0, z.imag()), y1 = std::max(y1, z.imag());
  }
  double half = std::max({x1 - x0, y1 - y0, 1.0}) * 0.75, cx = (x0 + x1) / 2, cy = (y0 + y1) / 2;
  return json::array({dec(cx - half), dec(cx + half), dec(cy - half), dec(cy + half)});
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Time budget: a quarter-size probe predicts the full cost with exponent 4
// (measured growth is about n^3.6); when the prediction exceeds the budget the
// largest n that fits is run instead and the result is marked partial.

template <class Run>
ExperimentResult run_within_budget(const ExperimentConfig& c, int n, Run&& run) {
  using detail::Clock;
  const int probe_from = 60;
  if (n >= probe_from && std::isfinite(c.budget_seconds)) {
    int np = std::max(10, n / 4);
    auto t0 = Clock::now();
    ExperimentResult probe = run(np);
    double tp = std::max(detail::seconds_since(t0), 1e-3);
    double predicted = tp * std::pow(static_cast<double>(n) / np, 4);
    if (predicted > c.budget_seconds) {
      int fit = static_cast<int>(np * std::pow(0.8 * c.budget_seconds / tp, 0.25));
      ExperimentResult r = fit > np ? run(std::min(fit, n - 1)) : std::move(probe);
      r.partial = true;
      r.achieved_n = fit > np ? std::min(fit, n - 1) : np;
      r.notes.push_back("time budget " + dec(c.budget_seconds) + " s: predicted " + dec(std::round(predicted)) +
                        " s at n = " + std::to_string(n) + ", ran n = " + std::to_string(r.achieved_n));
      return r;
    }
  }
  ExperimentResult r = run(n);
  r.achieved_n = n;
  return r;
}

// ---------------------------------------------------------------------------
// Individual tasks. Each fills result fields; inputs and file stems are set
// by run_task.

namespace tasks {

inline ExperimentResult expand(const ExperimentConfig& c) {
  ExperimentResult r;
  int n = c.n();
  r.digits = c.policy.digits(n);
  PrecisionScope scope(Precision{r.digits});
  r.polynomials["laurent_at_infinity"] = dec(Poly(expand_at_infinity(*c.germ, n).c));
  if (c.germ0) r.polynomials["taylor_at_0"] = dec(Poly(expand_at_point(*c.germ0, BigComplex(0), n).d));
  r.achieved_n = n;
  return r;
}

inline ExperimentResult pade_at(const ExperimentConfig& c, const Germ& g, int n) {
  ExperimentResult r;
  auto pp = pade_from_germ(g, n, c.policy);
  r.digits = pp.cert.digits;
  PrecisionScope scope(Precision{r.digits});
  r.polynomials["P0"] = dec(pp.p0);
  r.polynomials["P1"] = dec(pp.p1);
  r.certificates["pade"] = detail::certificate_json(pp.cert);
  r.metrics["effective_n"] = claim(std::to_string(pp.effective_n), "0", r.digits);
  r.metrics["nullity"] = claim(std::to_string(pp.nullity), "0", r.digits);
  auto z = detail::zeros_of(pp.p0), p = detail::zeros_of(pp.p1);
  r.add_zeros("zero-P", z);
  r.add_zeros("pole", p);
  r.certificates["roots_P0"] = detail::root_summary(z);
  r.certificates["roots_P1"] = detail::root_summary(p);
  auto pairs = froissart_pairs(z.as_cdouble(), p.as_cdouble(), c.radius, detail::limit_set_of(g), c.margin);
  r.metrics["froissart_doublets"] = claim(std::to_string(pairs.size()), "0", r.digits);
  r.achieved_n = n;
  return r;
}

inline ExperimentResult pade(const ExperimentConfig& c) {
  return run_within_budget(c, c.n(), [&](int n) { return pade_at(c, *c.germ, n); });
}

inline ExperimentResult multipoint_at(const ExperimentConfig& c, const MultipointSpec& spec, int n) {
  ExperimentResult r;
  auto mp = multipoint_pade(spec, n, c.policy);
  r.digits = mp.cert.digits;
  PrecisionScope scope(Precision{r.digits});
  r.polynomials["P"] = dec(mp.P);
  r.polynomials["Q"] = dec(mp.Q);
  r.certificates["multipoint"] = detail::certificate_json(mp.cert);
  json orders = json::array();
  for (const auto& node : spec.nodes)
    orders.push_back({{"point", node.point ? num_to_json(*node.point) : json("infinity")},
                      {"conditions", std::to_string(node.multiplicity)}});
  r.certificates["interpolation_orders"] = orders;
  auto z = detail::zeros_of(mp.P), p = detail::zeros_of(mp.Q);
  r.add_zeros("zero-P", z);
  r.add_zeros("pole", p);
  r.certificates["roots_P"] = detail::root_summary(z);
  r.certificates["roots_Q"] = detail::root_summary(p);
  auto pairs = froissart_pairs(z.as_cdouble(), p.as_cdouble(), c.radius, LimitSet{}, c.margin);
  r.metrics["froissart_doublets"] = claim(std::to_string(pairs.size()), "0", r.digits);
  r.achieved_n = n;
  return r;
}

inline ExperimentResult pade2(const ExperimentConfig& c) {
  return run_within_budget(c, c.n(), [&](int n) {
    return multipoint_at(c, two_point_spec(*c.germ0, *c.germ, n, c.two_point), n);
  });
}

inline MultipointSpec multipoint_spec_from_json(const json& nodes) {
  MultipointSpec spec;
  try {
    for (const auto& j : nodes) {
      MultipointNode node;
      if (j.contains("point") && !j["point"].is_null()) node.point = num_from_json_any(j["point"]);
      node.germ = germ_from_json(j.at("germ"));
      node.multiplicity = detail::integer(j.at("multiplicity"));
      detail::require(node.multiplicity >= 1, "node multiplicity must be at least 1");
      spec.nodes.push_back(std::move(node));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed nodes: ") + e.what());
  }
  return spec;
}

inline ExperimentResult mpade(const ExperimentConfig& c) {
  auto spec = multipoint_spec_from_json(c.nodes);
  int total = 0;
  for (const auto& node : spec.nodes) total += node.multiplicity;
  detail::require(total == 2 * c.n() + 1, "node multiplicities must add up to 2n + 1 = " + std::to_string(2 * c.n() + 1));
  return multipoint_at(c, spec, c.n());
}

inline ExperimentResult jfrac(const ExperimentConfig& c) {
  ExperimentResult r;
  int K = c.n();
  r.digits = c.policy.digits(K);
  PrecisionScope scope(Precision{r.digits});
  auto jf = jfraction_coeffs(expand_at_infinity(*c.germ, 2 * K + 1), K);
  json A = json::array(), B = json::array();
  for (const auto& a : jf.A) A.push_back(dec(a));
  for (const auto& b : jf.B) B.push_back(dec(b));
  r.measures["c0"] = dec(jf.c0);
  r.measures["A"] = A;
  r.measures["B"] = B;
  r.metrics["depth"] = claim(std::to_string(jf.depth()), "0", r.digits);
  r.metrics["terminated"] = claim(jf.terminated ? "true" : "false", "0", r.digits);
  auto q = jfraction_denominators(jf, K);
  r.polynomials["denominator"] = dec(q.back());
  r.add_zeros("pole", detail::zeros_of(q.back()));
  r.achieved_n = K;
  return r;
}

struct HpComputation {
  HermiteTriple t;
  std::array<ZeroSet, 3> zeros;
};

inline HpComputation hp_solve(const ExperimentConfig& c, const Germ& g, int n, bool roots = true) {
  HpComputation h{hp_from_germ(g, n, c.policy), {}};
  if (roots) {
    PrecisionScope scope(Precision{h.t.cert.digits});
    h.zeros = {detail::zeros_of(h.t.q0), detail::zeros_of(h.t.q1), detail::zeros_of(h.t.q2)};
  }
  return h;
}

// Zero statistics of Q_{n,0..2}: realness, nearness to the complement of the
// cuts, non-real (membrane) fraction, Froissart triplets.
inline void hp_zero_metrics(ExperimentResult& r, const ExperimentConfig& c, const HpComputation& h,
                            const std::vector<Segment>& E) {
  std::array<std::vector<cplx>, 3> z;
  std::size_t total = 0, nonreal = 0, near = 0;
  for (int k = 0; k < 3; ++k) {
    z[k] = h.zeros[k].as_cdouble();
    for (auto w : z[k]) {
      ++total;
      if (std::abs(w.imag()) > 1e-6 * (1 + std::abs(w))) ++nonreal;
      if (!E.empty() && detail::distance_to_complement(w, E) <= 0.02) ++near;
    }
  }
  const std::string tol = "0";
  r.metrics["zero_count"] = claim(std::to_string(total), tol, r.digits);
  r.metrics["nonreal_zeros"] = claim(std::to_string(nonreal), tol, r.digits);
  r.metrics["nonreal_fraction"] = claim(dec(total ? double(nonreal) / total : 0.0), "1e-15", r.digits);
  if (!E.empty()) {
    r.metrics["near_complement_fraction"] = claim(dec(total ? double(near) / total : 0.0), "1e-15", r.digits);
    LimitSet line;
    line.curves.push_back({cplx(-1e6, 0), cplx(1e6, 0)});
    auto tr = froissart_triplets(z[0], z[1], z[2], c.radius, line, c.margin);
    r.metrics["froissart_triplets"] = claim(std::to_string(tr.size()), "0", r.digits);
    json centers = json::array();
    for (const auto& t : tr) centers.push_back(json::array({dec(z[2][t.i2].real()), dec(z[2][t.i2].imag())}));
    r.measures["froissart_triplet_centers"] = centers;
  }
  // pairwise distances between the real zero distributions of Q0, Q1, Q2
  double nn = static_cast<double>(h.t.n);
  json kd = json::object();
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b)
      kd["Q" + std::to_string(a) + "_Q" + std::to_string(b)] =
          claim(dec(kolmogorov_distance(counting_measure(z[a], nn), counting_measure(z[b], nn))), "1e-15", r.digits);
  r.measures["kolmogorov_between_Q"] = kd;
}

inline void hp_fill(ExperimentResult& r, const ExperimentConfig& c, const HpComputation& h, const Germ& g,
                    const std::vector<int>& show) {
  r.digits = h.t.cert.digits;
  r.polynomials["Q0"] = dec(h.t.q0);
  r.polynomials["Q1"] = dec(h.t.q1);
  r.polynomials["Q2"] = dec(h.t.q2);
  r.certificates["hermite_pade"] = detail::certificate_json(h.t.cert);
  r.certificates["nullity"] = std::to_string(h.t.nullity);
  for (int k : show) {
    r.add_zeros("zero-Q" + std::to_string(k), h.zeros[k]);
    r.certificates["roots_Q" + std::to_string(k)] = detail::root_summary(h.zeros[k]);
  }
  std::vector<Segment> E;
  if (is_real_subclass(g)) E = cut_system(g).E;
  hp_zero_metrics(r, c, h, E);
  if (!E.empty()) r.overlays["segments"] = detail::segments_json(E);
}

inline ExperimentResult hp_trends(const ExperimentConfig& c) {
  detail::require(!c.points.empty(), "trends need evaluation points");
  ExperimentResult r;
  std::vector<BigComplex> pts;
  r.digits = c.policy.digits(*std::max_element(c.n_list.begin(), c.n_list.end()));
  PrecisionScope scope(Precision{r.digits});
  for (auto z : c.points) pts.emplace_back(z.real(), z.imag());
  auto tr = conjecture_trends(*c.germ, c.n_list, pts, c.policy);
  json rows = json::array();
  for (std::size_t i = 0; i < tr.n.size(); ++i) {
    json e1 = json::array(), e2 = json::array();
    for (double v : tr.conj1_error[i]) e1.push_back(dec(v));
    for (double v : tr.conj2_error[i]) e2.push_back(dec(v));
    rows.push_back({{"n", std::to_string(tr.n[i])}, {"conjecture1_error", e1}, {"conjecture2_error", e2}});
  }
  r.measures["trends"] = rows;
  r.metrics["conjecture1_constant"] = claim(to_decimal(tr.conj1_constant.real(), 12), "1e-10", r.digits);
  r.metrics["conjecture2_constant_re"] = claim(to_decimal(tr.conj2_constant.real(), 12), "1e-10", r.digits);
  r.metrics["conjecture2_constant_im"] = claim(to_decimal(tr.conj2_constant.imag(), 12), "1e-10", r.digits);
  r.metrics["single_alpha_regime"] = claim(tr.single_alpha_regime ? "true" : "false", "0", r.digits);
  r.achieved_n = tr.n.back();
  return r;
}

inline ExperimentResult hp(const ExperimentConfig& c) {
  if (c.which == "trends") return hp_trends(c);
  return run_within_budget(c, c.n(), [&](int n) {
    ExperimentResult r;
    auto h = hp_solve(c, *c.germ, n);
    PrecisionScope scope(Precision{h.t.cert.digits});
    hp_fill(r, c, h, *c.germ, {0, 1, 2});
    return r;
  });
}

inline ExperimentResult roots(const ExperimentConfig& c) {
  ExperimentResult r;
  int deg = static_cast<int>(c.poly.size()) - 1;
  r.digits = c.policy.digits(deg);
  PrecisionScope scope(Precision{r.digits});
  std::vector<BigComplex> coeffs;
  for (const auto& s : c.poly) {
    json j = json::parse(s, nullptr, false);
    coeffs.push_back((j.is_array() ? num_from_json(j) : Num(s)).value());
  }
  Poly p(coeffs);
  detail::require(p.degree() >= 1, "polynomial is constant");
  auto z = find_roots(p);
  r.add_zeros("zero-P", z);
  r.certificates["roots"] = detail::root_summary(z);
  r.achieved_n = deg;
  return r;
}

// Interpolation nodes of H_{n,1} = -Q1/Q2 on the cuts.
inline NodeSet node_set(const HpComputation& h, const Germ& g, SignConvention conv) {
  auto H = hermite_approximants(h.t, conv);
  return interpolation_nodes(H, g, cut_system(g).E, h.t.n);
}

// Explicit reference measures for a single cut [lo, hi] and |alpha| = 1/3.
inline std::optional<PaperDensities> condenser_densities(const Germ& g) {
  if (!is_real_subclass(g)) return std::nullopt;
  auto E = cut_system(g).E;
  if (E.size() != 1) return std::nullopt;
  try {
    auto sb = second_branch(g);
    if (abs(sb.alpha - BigReal(1) / 3) > eps_digits(10)) return std::nullopt;
  } catch (const std::exception&) {
    return std::nullopt;
  }
  auto d = paper_densities(BigReal(1) / 3);
  return PaperDensities{affine_image(d.eta_E, E[0].lo, E[0].hi), affine_image(d.eta_F, E[0].lo, E[0].hi)};
}

inline json kolmogorov_json(const KolmogorovReport& k, const std::string& ref, double window, unsigned digits) {
  return {{"reference", ref},
          {"window", dec(window)},
          {"distance", claim(dec(k.distance), "1e-10", digits)},
          {"nonreal_mass", dec(k.nonreal_mass)},
          {"outside_mass", dec(k.outside_mass)},
          {"reference_outside_mass", dec(k.ref_outside_mass)}};
}

inline ExperimentResult zdist(const ExperimentConfig& c) {
  const std::string which = c.which.empty() ? "pade" : c.which;
  const Germ& g = *c.germ;
  int n = c.n();
  ExperimentResult r;
  if (which == "pade") {
    r = pade_at(c, g, n);
    if (is_real_subclass(g)) {
      auto E = cut_system(g).E;
      if (E.size() == 1) {
        auto ref = arcsine_density(E[0].lo, E[0].hi);
        auto k = kolmogorov_distance(counting_measure(r.points_of("zero-P"), n), ref, c.window);
        r.measures["zero_distribution"] = kolmogorov_json(k, "arcsine", c.window, r.digits);
      }
    }
  } else if (which == "q0" || which == "q1" || which == "q2" || which == "nodes") {
    auto h = hp_solve(c, g, n, which != "nodes");
    PrecisionScope scope(Precision{h.t.cert.digits});
    r.digits = h.t.cert.digits;
    r.certificates["hermite_pade"] = detail::certificate_json(h.t.cert);
    auto dens = condenser_densities(g);
    if (which == "nodes") {
      auto ns = node_set(h, g, c.convention);
      for (double x : ns.nodes) r.add_point("node", x, 0);
      r.metrics["node_count"] = claim(std::to_string(ns.count), "0", r.digits);
      if (dens) {
        std::vector<cplx> pts(ns.nodes.begin(), ns.nodes.end());
        auto k = kolmogorov_distance(counting_measure(pts, 2.0 * n), dens->eta_E, c.window);
        r.measures["zero_distribution"] = kolmogorov_json(k, "eta_E", c.window, r.digits);
      }
    } else {
      int idx = which[1] - '0';
      r.add_zeros("zero-Q" + std::to_string(idx), h.zeros[idx]);
      r.polynomials["Q" + std::to_string(idx)] = dec(idx == 0 ? h.t.q0 : idx == 1 ? h.t.q1 : h.t.q2);
      if (dens) {
        auto k = kolmogorov_distance(counting_measure(h.zeros[idx], n), dens->eta_F, c.window);
        r.measures["zero_distribution"] = kolmogorov_json(k, "eta_F", c.window, r.digits);
      }
    }
  } else {
    throw ConfigError("zdist which is pade, q0, q1, q2 or nodes");
  }
  if (!r.measures.contains("zero_distribution"))
    r.notes.push_back("no explicit reference measure for this germ; zeros only");
  r.achieved_n = n;
  return r;
}

inline ExperimentResult froissart(const ExperimentConfig& c) {
  const std::string which = c.which.empty() ? "pade" : c.which;
  if (which == "pade") return pade_at(c, *c.germ, c.n());
  if (which == "pade2") {
    detail::require(c.germ0.has_value(), "froissart pade2 needs germ0");
    return multipoint_at(c, two_point_spec(*c.germ0, *c.germ, c.n(), c.two_point), c.n());
  }
  if (which == "hp") {
    ExperimentResult r;
    auto h = hp_solve(c, *c.germ, c.n());
    PrecisionScope scope(Precision{h.t.cert.digits});
    hp_fill(r, c, h, *c.germ, {0, 1, 2});
    r.achieved_n = c.n();
    return r;
  }
  throw ConfigError("froissart which is pade, pade2 or hp");
}

inline ExperimentResult nodes(const ExperimentConfig& c) {
  ExperimentConfig d = c;
  d.which = "nodes";
  auto r = zdist(d);
  int n = c.n();
  long count = static_cast<long>(r.points_of("node").size());
  r.metrics["deficit"] = claim(std::to_string(2L * n - count), "0", r.digits);
  return r;
}

inline ExperimentResult alternation(const ExperimentConfig& c) {
  ExperimentResult r;
  int n = c.n();
  auto h = hp_solve(c, *c.germ, n, false);
  r.digits = h.t.cert.digits;
  PrecisionScope scope(Precision{r.digits});
  r.certificates["hermite_pade"] = detail::certificate_json(h.t.cert);
  auto rep = alternation_check(hermite_approximants(h.t, c.convention), *c.germ, n, c.theta);
  for (double x : rep.nodes.nodes) r.add_point("node", x, 0);
  json xs = json::array(), ws = json::array();
  for (std::size_t i = 0; i < rep.x.size(); ++i) xs.push_back(dec(rep.x[i])), ws.push_back(dec(rep.weighted[i]));
  r.measures["extrema_x"] = xs;
  r.measures["weighted_error"] = ws;
  r.metrics["required_run"] = claim(std::to_string(rep.required), "0", r.digits);
  r.metrics["alternating_run"] = claim(std::to_string(rep.run_length), "0", r.digits);
  r.metrics["central_min"] = claim(dec(rep.central_min), "1e-6", r.digits);
  r.metrics["central_max"] = claim(dec(rep.central_max), "1e-6", r.digits);
  r.achieved_n = n;
  return r;
}

inline Predictor predictor_of(const std::string& s) {
  if (s == "stahl_gE") return Predictor::stahl_gE;
  if (s == "theorem1_GF") return Predictor::theorem1_GF;
  if (s == "buslaev_green") return Predictor::buslaev_green;
  return Predictor::none;
}

inline ExperimentResult rates(const ExperimentConfig& c) {
  detail::require(!c.points.empty(), "rates need evaluation points");
  const std::string which = c.which.empty() ? "pade" : c.which;
  const Germ& g = *c.germ;
  ExperimentResult r;
  r.digits = c.policy.digits(*std::max_element(c.n_list.begin(), c.n_list.end()));
  ErrorFn err;
  std::map<int, PadePair> pades;
  std::map<int, HermiteTriple> hps;
  std::map<int, MultipointResult> mps;
  std::optional<SecondBranchTarget> target;
  if (which == "pade") {
    err = [&](int n, const BigComplex& z) {
      if (!pades.count(n)) pades.emplace(n, pade_from_germ(g, n, c.policy));
      const auto& pp = pades.at(n);
      PrecisionScope s(Precision{pp.cert.digits});
      return abs(eval_germ(g, z) - pade_eval(pp, z));
    };
  } else if (which == "hp") {
    err = [&](int n, const BigComplex& z) {
      if (!hps.count(n)) hps.emplace(n, hp_from_germ(g, n, c.policy));
      const auto& t = hps.at(n);
      PrecisionScope s(Precision{t.cert.digits});
      target = second_branch_target(g, c.convention);
      return abs(target->at(z) - hermite_approximants(t, c.convention).h1(z));
    };
  } else if (which == "pade2") {
    detail::require(c.germ0.has_value(), "rates pade2 needs germ0");
    err = [&](int n, const BigComplex& z) {
      if (!mps.count(n)) mps.emplace(n, multipoint_pade(two_point_spec(*c.germ0, g, n, c.two_point), n, c.policy));
      const auto& m = mps.at(n);
      PrecisionScope s(Precision{m.cert.digits});
      return abs(eval_germ(g, z) - multipoint_eval(m, z));
    };
  } else {
    throw ConfigError("rates which is pade, hp or pade2");
  }
  RatePredictor pred{predictor_of(c.predictor), {}, 0.0};
  if (pred.kind != Predictor::none) pred.E = cut_system(g).E;
  auto map = rate_map(err, c.n_list, c.points, pred);
  json pts = json::array();
  for (const auto& p : map.points) {
    json e{{"z", json::array({dec(p.z.real()), dec(p.z.imag())})},
           {"observed", dec(p.observed)},
           {"cross_check", dec(p.cross_check)},
           {"predicted", dec(p.predicted)},
           {"ratio", claim(dec(p.ratio), "1e-6", r.digits)},
           {"dropped", p.dropped ? "true" : "false"}};
    if (!p.note.empty()) e["note"] = p.note;
    pts.push_back(e);
  }
  r.measures["rate_map"] = pts;
  r.measures["predictor"] = c.predictor;
  r.achieved_n = map.n.back();
  return r;
}

inline ExperimentResult ortho(const ExperimentConfig& c) {
  const std::string which = c.which.empty() ? "pade" : c.which;
  const Germ& g = *c.germ;
  int n = c.n();
  ExperimentResult r;
  std::vector<int> ks;
  OrthogonalityReport rep;
  if (which == "pade") {
    auto pp = pade_from_germ(g, n, c.policy);
    r.digits = pp.cert.digits;
    for (int k = 0; k <= n; ++k) ks.push_back(k);
    rep = orthogonality_residual(pp.p1, g, ks, Orthogonality::pade_eq65);
  } else if (which == "hp") {
    auto t = hp_from_germ(g, n, c.policy);
    r.digits = t.cert.digits;
    std::vector<Poly> aux;
    for (int k = 1; k <= n + 1; ++k) {
      ks.push_back(k);
      aux.push_back(pade_from_germ(g, n + k, c.policy).p1);
    }
    rep = orthogonality_residual(t.q2, g, ks, Orthogonality::hp_eq69, aux, r.digits);
  } else {
    throw ConfigError("ortho which is pade or hp");
  }
  // the last k lies outside the orthogonality range and serves as the control
  const std::string tol = "1e-" + std::to_string(r.digits / 4);
  json rows = json::array();
  for (std::size_t i = 0; i < rep.k.size(); ++i)
    rows.push_back({{"k", std::to_string(rep.k[i])},
                    {"residual", claim(dec(rep.residual[i]), tol, rep.digits)},
                    {"control", i + 1 == rep.k.size() ? "true" : "false"}});
  r.measures["orthogonality"] = rows;
  double worst = 0;
  for (std::size_t i = 0; i + 1 < rep.residual.size(); ++i) worst = std::max(worst, rep.residual[i]);
  r.metrics["max_residual_in_range"] = claim(dec(worst), tol, rep.digits);
  r.metrics["control_residual"] = claim(dec(rep.residual.back()), tol, rep.digits);
  r.achieved_n = n;
  return r;
}

inline ExperimentResult stahlgeo(const ExperimentConfig& c) {
  auto a = detail::three_branch_points(*c.germ);
  detail::require(a.has_value(), "stahlgeo needs a product germ with three branch points");
  ExperimentResult r;
  r.digits = 100;
  PrecisionScope scope(Precision{r.digits});
  auto ch = chebotarev_point(*a, r.digits);
  r.measures["chebotarev_point"] = dec(ch.v);
  r.metrics["period_residual"] = claim(detail::sci(ch.residual), "1e-20", r.digits);
  std::array<std::complex<double>, 3> ad;
  for (int k = 0; k < 3; ++k) ad[k] = (*a)[k].to_cdouble();
  auto geo = trace_stahl_arcs(ad, ch.v.to_cdouble());
  double worst = 0;
  for (int j = 0; j < 3; ++j)
    for (double v : abelian_real_part(geo, j)) worst = std::max(worst, std::abs(v));
  r.metrics["arc_real_part"] = claim(dec(worst), "1e-8", 16);
  r.metrics["arcs_consistent"] = claim(geo.consistent ? "true" : "false", "0", 16);
  if (!geo.note.empty()) r.notes.push_back(geo.note);
  r.overlays["arcs"] = detail::arcs_json(geo);
  if (c.n() > 0) {
    auto pr = pade_at(c, *c.germ, c.n());
    LimitSet arcs;
    for (const auto& arc : geo.arcs) arcs.curves.push_back(arc);
    auto zeros = pr.points_of("zero-P");
    // poles away from the arcs mark Froissart doublets; their disks are skipped
    std::vector<cplx> centers;
    for (auto z : pr.points_of("pole"))
      if (arcs.distance(z) > c.margin) centers.push_back(z);
    std::size_t kept = 0;
    double sup = 0;
    for (auto z : zeros) {
      if (std::any_of(centers.begin(), centers.end(), [&](cplx w) { return std::abs(z - w) < c.eps; })) continue;
      sup = std::max(sup, arcs.distance(z));
      ++kept;
    }
    pr.metrics.update(r.metrics);
    pr.measures.update(r.measures);
    pr.overlays["arcs"] = r.overlays["arcs"];
    pr.notes = r.notes;
    pr.metrics["max_zero_to_arc_distance"] = claim(dec(sup), "1e-12", pr.digits);
    pr.metrics["zeros_compared"] = claim(std::to_string(kept), "0", pr.digits);
    return pr;
  }
  return r;
}

// Explicit n wins; otherwise the printed n at paper scale and half of it at desk scale.
inline int preset_order(const Preset& p, const ExperimentConfig& c) {
  if (!c.n_list.empty()) return c.n();
  return c.paper_scale ? p.paper_n : p.desk_n();
}

inline ExperimentResult preset(const ExperimentConfig& c) {
  const Preset& p = find_preset(c.preset);
  int n = preset_order(p, c);
  auto run = [&](int m) {
    ExperimentResult r;
    switch (p.kind) {
      case PresetKind::pade:
        r = pade_at(c, p.germ, m);
        break;
      case PresetKind::two_point:
        r = multipoint_at(c, two_point_spec(*p.germ0, p.germ, m, c.two_point), m);
        break;
      case PresetKind::hermite: {
        auto h = hp_solve(c, p.germ, m);
        PrecisionScope scope(Precision{h.t.cert.digits});
        hp_fill(r, c, h, p.germ, p.show);
        break;
      }
    }
    return r;
  };
  ExperimentResult r = run_within_budget(c, n, run);
  if (p.stahl_arcs) {
    PrecisionScope scope(Precision{60});
    auto geo = detail::stahl_geometry(*detail::three_branch_points(p.germ), 60);
    r.overlays["arcs"] = detail::arcs_json(geo);
  }
  if (!p.segments.empty()) r.overlays["segments"] = detail::segments_json(p.segments);
  r.overlays["viewport"] = detail::viewport_of(p.germ, p.kind == PresetKind::two_point);
  r.measures["preset"] = {{"id", p.id},
                          {"formula", p.formula},
                          {"germ", germ_to_json(p.germ)},
                          {"caption", p.caption},
                          {"paper_n", std::to_string(p.paper_n)},
                          {"n", std::to_string(r.achieved_n)}};
  return r;
}

}  // namespace tasks

inline std::string stem_of(const ExperimentConfig& c, int achieved_n) {
  std::string base = c.task == "preset" ? c.preset : c.task;
  if (!c.which.empty()) base += "_" + c.which;
  return base + "_n" + std::to_string(achieved_n);
}

inline TaskOutput run_task(const ExperimentConfig& c) {
  validate(c);
  static const std::map<std::string, std::function<ExperimentResult(const ExperimentConfig&)>> table{
      {"expand", tasks::expand},     {"pade", tasks::pade},         {"pade2", tasks::pade2},
      {"mpade", tasks::mpade},       {"jfrac", tasks::jfrac},       {"hp", tasks::hp},
      {"roots", tasks::roots},       {"zdist", tasks::zdist},       {"froissart", tasks::froissart},
      {"nodes", tasks::nodes},       {"alternation", tasks::alternation}, {"rates", tasks::rates},
      {"ortho", tasks::ortho},       {"stahlgeo", tasks::stahlgeo}, {"preset", tasks::preset}};
  TaskOutput out;
  out.result = table.at(c.task)(c);
  out.result.inputs = config_to_json(c);
  out.stem = stem_of(c, out.result.achieved_n);
  return out;
}

}  // namespace hplab::cli

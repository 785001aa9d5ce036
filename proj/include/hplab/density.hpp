#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hplab/quadrature.hpp"

namespace hplab {

struct Interval {
  double lo, hi;  // either end may be infinite
  bool contains(double x) const { return x >= lo && x <= hi; }
};

// A point handed to a density: x together with its distances to the ends of
// its support interval, accurate even when x rounds onto an endpoint.
struct DensityPoint {
  double x;
  double dlo;  // x - lo
  double dhi;  // hi - x
  std::size_t interval;
  double offset = std::numeric_limits<double>::quiet_NaN();  // x - nearest break, when integrating
};

// Absolutely continuous measure on a finite union of real intervals.
class DensityRef {
 public:
  using Fn = std::function<double(const DensityPoint&)>;

  DensityRef() = default;
  DensityRef(std::vector<Interval> support, Fn density, std::string label = {})
      : support_(std::move(support)), density_(std::move(density)), label_(std::move(label)) {
    for (std::size_t i = 0; i < support_.size(); ++i) {
      if (!(support_[i].lo < support_[i].hi)) throw std::invalid_argument("empty support interval");
      if (i > 0 && support_[i].lo < support_[i - 1].hi)
        throw std::invalid_argument("support intervals overlap or are unordered");
    }
  }

  const std::vector<Interval>& support() const { return support_; }
  const std::string& label() const { return label_; }

  // Pointwise density; 0 off the support, error at an endpoint.
  double operator()(double x) const {
    for (std::size_t i = 0; i < support_.size(); ++i) {
      const auto& s = support_[i];
      if (x == s.lo || x == s.hi) throw std::domain_error("density evaluated at a support endpoint");
      if (x > s.lo && x < s.hi) return density_({x, x - s.lo, s.hi - x, i});
    }
    return 0;
  }

  // Density at a point given with its endpoint distances (no support check).
  double at(const DensityPoint& p) const { return density_(p); }

  // Integral of k(p) * density over [a, b]. Each point in `breaks` splits the
  // integration, and p.offset carries the exact signed distance to the nearest
  // break, so kernels with a singularity there stay accurate.
  template <class K>
  double integrate(K&& k, double a = -kInf, double b = kInf, std::vector<double> breaks = {}) const {
    std::sort(breaks.begin(), breaks.end());
    double total = 0;
    for (std::size_t i = 0; i < support_.size(); ++i) {
      double lo = std::max(a, support_[i].lo), hi = std::min(b, support_[i].hi);
      if (!(lo < hi)) continue;
      std::vector<double> cuts{lo};
      for (double x : breaks)
        if (x > lo && x < hi) cuts.push_back(x);
      cuts.push_back(hi);
      if (!std::isfinite(lo) && !std::isfinite(hi) && cuts.size() == 2) cuts.insert(cuts.begin() + 1, 0.0);
      auto is_break = [&](double x) { return std::binary_search(breaks.begin(), breaks.end(), x); };
      for (std::size_t j = 0; j + 1 < cuts.size(); ++j)
        total += piece(i, cuts[j], cuts[j + 1], is_break(cuts[j]), is_break(cuts[j + 1]), k);
    }
    return total;
  }

  // Mass of [a, b] (a may be -inf, b may be +inf).
  double mass_in(double a, double b) const {
    return integrate([](const DensityPoint&) { return 1.0; }, a, b);
  }
  double mass() const { return mass_in(-kInf, kInf); }
  double cdf(double x) const { return mass_in(-kInf, x); }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  static const TanhSinh<double>& rule() {
    static const TanhSinh<double> r(8);
    return r;
  }

  // Integral over [lo, hi] inside support interval i; at most one end infinite.
  template <class K>
  double piece(std::size_t i, double lo, double hi, bool lo_break, bool hi_break, K& k) const {
    const Interval& s = support_[i];
    const double tol = 1e-13;
    double off_lo = lo - s.lo, off_hi = s.hi - hi;  // inf when the support end is infinite
    auto eval = [&](double x, double da, double db) {
      DensityPoint p{x, std::isfinite(off_lo) ? off_lo + da : kInf, std::isfinite(off_hi) ? off_hi + db : kInf, i};
      if (lo_break && (!hi_break || da <= db)) p.offset = da;
      else if (hi_break) p.offset = -db;
      return k(p) * density_(p);
    };
    if (std::isfinite(lo) && std::isfinite(hi)) return rule().integrate(eval, lo, hi, tol).value;
    if (std::isfinite(lo)) {
      // x = lo - 1 + 1/t, t in (0, 1]
      auto f = [&](double t, double, double dt) {
        if (t < 1e-150) return 0.0;
        return eval(lo - 1 + 1 / t, dt / t, kInf) / (t * t);
      };
      return rule().integrate(f, 0.0, 1.0, tol).value;
    }
    auto f = [&](double t, double, double dt) {
      if (t < 1e-150) return 0.0;
      return eval(hi + 1 - 1 / t, kInf, dt / t) / (t * t);
    };
    return rule().integrate(f, 0.0, 1.0, tol).value;
  }

  std::vector<Interval> support_;
  Fn density_;
  std::string label_;
};

// Equilibrium (arcsine) measure of a segment.
inline DensityRef arcsine_density(double lo, double hi) {
  const double pi = 3.14159265358979323846;
  return DensityRef({{lo, hi}}, [pi](const DensityPoint& p) { return 1 / (pi * std::sqrt(p.dlo * p.dhi)); }, "arcsine");
}

// Push-forward of a measure given on a [-1, 1] model under the increasing
// affine map taking [-1, 1] onto [lo, hi].
inline DensityRef affine_image(const DensityRef& ref, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("empty target segment");
  const double c = (lo + hi) / 2, s = (hi - lo) / 2;
  std::vector<Interval> sup;
  for (const auto& iv : ref.support()) sup.push_back({c + s * iv.lo, c + s * iv.hi});
  return DensityRef(std::move(sup), [ref, c, s](const DensityPoint& p) {
    DensityPoint q{(p.x - c) / s, p.dlo / s, p.dhi / s, p.interval, p.offset / s};
    return ref.at(q) / s;
  }, ref.label());
}

}  // namespace hplab

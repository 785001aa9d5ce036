#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hplab/germ.hpp"

namespace hplab::cli {

enum class PresetKind { pade, two_point, hermite };

struct Preset {
  std::string id;
  std::string formula;  // germ as printed with the figure or case (LaTeX, verbatim)
  std::string caption;  // what the figure shows
  PresetKind kind = PresetKind::pade;
  Germ germ;                   // expansion at infinity
  std::optional<Germ> germ0;   // expansion at 0 (two-point)
  int paper_n = 0;
  std::vector<int> show;       // Hermite-Padé polynomials drawn (0, 1, 2)
  std::vector<Segment> segments;
  bool stahl_arcs = false;     // three branch points: overlay the critical arcs

  int desk_n() const { return paper_n / 2; }
};

namespace detail {

inline Germ three_cuts(const char* mid_lo, const char* mid_hi, const char* a1, const char* a2, const char* a3) {
  Num e1(a1), e2(a2), e3(a3);
  return Germ::product({{"-2.5", e1},
                        {"-1.3", e1.scaled(-1)},
                        {mid_lo, e2},
                        {mid_hi, e2.scaled(-1)},
                        {"1.3", e3},
                        {"2.5", e3.scaled(-1)}});
}

inline std::vector<Preset> build_presets() {
  std::vector<Preset> v;
  const std::vector<Segment> cuts_08{{-2.5, -1.3}, {-0.8, 0.8}, {1.3, 2.5}};
  const std::vector<Segment> cuts_03{{-2.5, -1.3}, {-0.3, 0.3}, {1.3, 2.5}};

  {
    Preset p;
    p.id = "figure1";
    p.formula = "f(z) = (z - (-1.2 + 0.8i))^{1/3} (z - (0.9 + 1.5i))^{1/3} (z - (0.5 - 1.2i))^{-2/3}";
    p.caption = "Zeros (blue) and poles (red) of the diagonal Padé approximant; elliptic Stahl surface, at most one "
                "Froissart doublet.";
    p.germ = Germ::product({{{"-1.2", "0.8"}, "1/3"}, {{"0.9", "1.5"}, "1/3"}, {{"0.5", "-1.2"}, "-2/3"}});
    p.paper_n = 130;
    p.stahl_arcs = true;
    v.push_back(p);
  }
  {
    Preset p;
    p.id = "figure2";
    p.formula = R"(f(z) = \{(z + (4.3 + 1.0i))(z - (2.0 + 0.5i))(z + (2.0 + 2.0i))(z + (1.0 - 3.0i))(z - (4.0 + 2.0i))(z - (3.0 + 5.0i))\}^{-1/6})";
    p.caption = "Zeros (blue) and poles (red) of the diagonal Padé approximant; genus 4, up to 4 Froissart doublets.";
    p.germ = Germ::product({{{"-4.3", "-1.0"}, "-1/6"},
                            {{"2.0", "0.5"}, "-1/6"},
                            {{"-2.0", "-2.0"}, "-1/6"},
                            {{"-1.0", "3.0"}, "-1/6"},
                            {{"4.0", "2.0"}, "-1/6"},
                            {{"3.0", "5.0"}, "-1/6"}});
    p.paper_n = 267;
    v.push_back(p);
  }
  {
    Preset p;
    p.id = "figure3";
    p.formula = R"(f(z) = \left(\frac{z - (-1.0 + 0.8i)}{z - (1.0 + 1.2i)}\right)^{1/2} + \left(\frac{z - (-1.0 + 1.5i)}{z - (-1.0 - 1.5i)}\right)^{1/2})";
    p.caption = "Zeros (blue) and poles (red) of the diagonal Padé approximant of a quadratic function; genus 2.";
    p.germ = Germ::product({{{"-1.0", "0.8"}, "1/2"}, {{"1.0", "1.2"}, "-1/2"}}) +
             Germ::product({{{"-1.0", "1.5"}, "1/2"}, {{"-1.0", "-1.5"}, "-1/2"}});
    p.paper_n = 300;
    v.push_back(p);
  }
  {
    Preset p;
    p.id = "figure4";
    p.formula = R"(f(z) = \log\left(\frac{z - (-1.0 + 0.8i)}{z - (1.0 + 1.2i)}\right) + \log\left(\frac{z - (-1.0 + 1.5i)}{z - (-1.0 - 1.5i)}\right))";
    p.caption = "Zeros (blue) and poles (red) of the diagonal Padé approximant of a logarithmic function; genus 2.";
    p.germ = Germ::log_ratio({"-1.0", "0.8"}, {"1.0", "1.2"}) + Germ::log_ratio({"-1.0", "1.5"}, {"-1.0", "-1.5"});
    p.paper_n = 300;
    v.push_back(p);
  }
  {
    Preset p;
    p.id = "figure5";
    p.formula = R"(f_0 = ((1 - 2z)(2 - z))^{-1/2}, f_\infty = ((2z - 1)(z - 2))^{-1/2} + 1)";
    p.caption = "Zeros (blue) and poles (red) of the two-point Padé approximant; generic case, two domains.";
    Germ f0 = Germ::product({{"1/2", "-1/2"}, {"2", "-1/2"}});
    std::get<ProductTerm>(f0.terms[0].term).anchor = Anchor{"0", "2^(-1/2)"};
    p.germ0 = f0;
    p.germ = Germ::product({{"1/2", "-1/2"}, {"2", "-1/2"}}, "2^(-1/2)") + Germ::constant("1");
    p.kind = PresetKind::two_point;
    p.paper_n = 120;
    v.push_back(p);
  }
  {
    Preset p;
    p.id = "figure6";
    p.formula = R"(f(z) = \sqrt[4]{(z - a_1)/(z - a_2)}, a_1 = 0.9 - 1.1i, a_2 = 0.1 + 0.2i, f_0 = \sqrt[4]{(z - a_1)/(z - a_2)}, f_\infty = -\sqrt[4]{(z - a_1)/(z - a_2)})";
    p.caption = "Zeros (blue) and poles (red) of the two-point Padé approximant for two different branches; one "
                "Froissart doublet.";
    // principal fourth root at 0 of (0 - a_1)/(0 - a_2) = -2.6 - 5.8i
    Germ f0 = Germ::product({{{"0.9", "-1.1"}, "1/4"}, {{"0.1", "0.2"}, "-1/4"}});
    std::get<ProductTerm>(f0.terms[0].term).anchor = Anchor{"0", {"-2.6", "-5.8"}, "1/4"};
    p.germ0 = f0;
    p.germ = Germ::product({{{"0.9", "-1.1"}, "1/4"}, {{"0.1", "0.2"}, "-1/4"}}, "-1");
    p.kind = PresetKind::two_point;
    p.paper_n = 195;
    v.push_back(p);
  }
  auto ratio = [](const char* a, const char* b, const char* e) {
    return std::string(R"(\left(\frac{)") + a + "}{" + b + R"(}\right)^{)" + e + "}";
  };
  auto three = [&](const char* m1, const char* m2, const char* e2, const char* e3) {
    return "f(z) = " + ratio("z+2.5", "z+1.3", "1/3") + " " + ratio(m1, m2, e2) + " " + ratio("z-1.3", "z-2.5", e3);
  };
  const std::string case1 = three("z+0.8", "z-0.8", "1/3", "1/3");
  const std::string case2 = three("z+0.8", "z-0.8", "-1/3", "1/3");
  const std::string fig9 = three("z+.8", "z-.8", "-1/3", "1/3");
  const std::string fig10 = three("z+0.8", "z-.08", "-1/3", "1/3");  // printed typo; the germ uses 0.8
  const std::string fig11 = three("z+0.3", "z-0.3", "1/2", "1/3");
  const std::string case3 = three("z+0.3", "z-0.3", "1/2", "-1/3");
  auto hermite = [&](std::string id, std::string formula, std::string caption, Germ g, int n, std::vector<int> show,
                     std::vector<Segment> segs) {
    Preset p;
    p.id = std::move(id);
    p.formula = std::move(formula);
    p.caption = std::move(caption);
    p.kind = PresetKind::hermite;
    p.germ = std::move(g);
    p.paper_n = n;
    p.show = std::move(show);
    p.segments = std::move(segs);
    v.push_back(std::move(p));
  };
  Germ g1 = three_cuts("-0.8", "0.8", "1/3", "1/3", "1/3");
  Germ g2 = three_cuts("-0.8", "0.8", "1/3", "-1/3", "1/3");
  Germ g11 = three_cuts("-0.3", "0.3", "1/3", "1/2", "1/3");
  Germ g3 = three_cuts("-0.3", "0.3", "1/3", "1/2", "-1/3");
  hermite("figure7", case1, "Zeros of Q_0 (blue) and Q_1 (red); two pairs of Froissart doublets.", g1, 200, {0, 1},
          cuts_08);
  hermite("figure8", case1, "Zeros of Q_0 (blue), Q_1 (red), Q_2 (black); two pairs of Froissart triplets.", g1, 200,
          {0, 1, 2}, cuts_08);
  hermite("figure9", fig9, "Zeros of Q_0 (blue) and Q_1 (red); a membrane splits the complement of the cuts.", g2, 320,
          {0, 1}, cuts_08);
  hermite("figure10", fig10, "Zeros of Q_0 (blue), Q_1 (red), Q_2 (black); membrane, no Froissart triplets.", g2, 320,
          {0, 1, 2}, cuts_08);
  hermite("figure11", fig11, "Zeros of Q_1 (red); no membrane, four segments with an unknown endpoint a.", g11, 320,
          {1}, cuts_03);
  hermite("figure12", fig11, "Zeros of Q_0 (blue); membrane and the segments [-2.5,-1.3], [-a,a], [1.3,2.5].", g11,
          320, {0}, cuts_03);
  hermite("figure13", fig11, "Zeros of Q_2 (black); membrane and the segments [-2.5,-1.3], [-a,a], [1.3,2.5].", g11,
          320, {2}, cuts_03);
  hermite("figure14", fig11, "Zeros of Q_0 (blue), Q_1 (red), Q_2 (black) together.", g11, 320, {0, 1, 2}, cuts_03);
  hermite("case1", case1, "All exponents equal 1/3: zeros on the complement of the three cuts.", g1, 200, {0, 1, 2},
          cuts_08);
  hermite("case2", case2, "Alternating exponents: a membrane carries part of the zeros.", g2, 320, {0, 1, 2}, cuts_08);
  hermite("case3", case3, "Square-root middle factor: membrane of another type.", g3, 200, {0, 1, 2}, cuts_03);
  for (auto& p : v) p.germ.label = p.id;
  return v;
}

}  // namespace detail

inline const std::vector<Preset>& presets() {
  static const std::vector<Preset> v = detail::build_presets();
  return v;
}

inline const Preset& find_preset(const std::string& id) {
  for (const auto& p : presets())
    if (p.id == id) return p;
  throw std::invalid_argument("unknown preset '" + id + "'");
}

}  // namespace hplab::cli

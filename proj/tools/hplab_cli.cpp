#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hplab/cli/tasks.hpp"

using namespace hplab;
using namespace hplab::cli;

namespace {

enum Exit { kOk = 0, kError = 1, kDegenerate = 2, kPrecision = 3, kBudget = 4 };

struct Flags {
  std::string config_file, germ, germ0, n_list, format, sign, two_point, which, predictor, poly, nodes_file, preset;
  std::vector<std::string> points;
  int n = 0;
  unsigned prec_base = 0, prec_slope = 0;
  double window = 0, budget = 0, theta = 0, radius = 0, margin = 0, eps = 0;
  std::string out;
  bool paper_scale = false, list_presets = false;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

// A germ flag is shorthand ("-1^1/3 1^-1/3"), inline JSON, or @file.json.
Germ germ_arg(const std::string& s) {
  if (!s.empty() && s[0] == '@') return germ_from_json(read_json_file(s.substr(1)));
  if (!s.empty() && s[0] == '{') {
    try {
      return germ_from_json(json::parse(s));
    } catch (const json::exception& e) {
      throw ConfigError(std::string("germ JSON: ") + e.what());
    }
  }
  return germ_from_shorthand(s);
}

ExperimentConfig build_config(const std::string& task, const Flags& f, const CLI::App& sub) {
  ExperimentConfig c = f.config_file.empty() ? ExperimentConfig{} : config_from_json(read_json_file(f.config_file));
  c.task = task;
  auto given = [&](const char* name) { return sub.count(name) > 0; };
  if (given("--germ")) c.germ = germ_arg(f.germ);
  if (given("--germ0")) c.germ0 = germ_arg(f.germ0);
  if (given("--n")) c.n_list = {f.n};
  if (given("--n-list")) {
    c.n_list.clear();
    for (const auto& s : split(f.n_list, ',')) c.n_list.push_back(cli::detail::integer(json(s)));
  }
  if (given("--prec-base")) c.policy.base = f.prec_base;
  if (given("--prec-slope")) c.policy.slope = f.prec_slope;
  if (given("--window")) c.window = f.window;
  if (given("--out")) c.out_dir = f.out;
  if (given("--format")) c.formats = split(f.format, ',');
  if (given("--paper-scale")) c.paper_scale = f.paper_scale;
  if (given("--sign-convention"))
    c.convention = f.sign == "definition" ? SignConvention::definition : SignConvention::theorem1;
  if (given("--two-point"))
    c.two_point = f.two_point == "footnote" ? TwoPointConvention::footnote : TwoPointConvention::displayed;
  if (given("--budget")) c.budget_seconds = f.budget;
  if (given("--which")) c.which = f.which;
  if (given("--predictor")) c.predictor = f.predictor;
  if (given("--point")) {
    c.points.clear();
    for (const auto& p : f.points) {
      auto parts = split(p, ',');
      if (parts.empty() || parts.size() > 2) throw ConfigError("point is re or re,im: " + p);
      c.points.emplace_back(cli::detail::number(json(parts[0])), parts.size() == 2 ? cli::detail::number(json(parts[1])) : 0.0);
    }
  }
  if (given("--theta")) c.theta = f.theta;
  if (given("--radius")) c.radius = f.radius;
  if (given("--margin")) c.margin = f.margin;
  if (given("--eps")) c.eps = f.eps;
  if (given("--poly")) c.poly = split(f.poly, ' ');
  if (given("--nodes")) c.nodes = read_json_file(f.nodes_file);
  if (task == "preset" && !f.preset.empty()) c.preset = f.preset;
  return c;
}

void add_common(CLI::App* s, Flags& f) {
  s->add_option("--config", f.config_file, "JSON experiment config; flags override its fields");
  s->add_option("--germ", f.germ, "germ at infinity: shorthand \"p^e ...\", inline JSON, or @file.json");
  s->add_option("--germ0", f.germ0, "germ at 0 (two-point Padé)");
  s->add_option("--n", f.n, "order n");
  s->add_option("--n-list", f.n_list, "comma-separated orders");
  s->add_option("--prec-base", f.prec_base, "base digits of the precision policy");
  s->add_option("--prec-slope", f.prec_slope, "digits per unit of n");
  s->add_option("--window", f.window, "Kolmogorov window R (compare on [-R, R])");
  s->add_option("--out", f.out, "output directory");
  s->add_option("--format", f.format, "json,csv,svg");
  s->add_flag("--paper-scale", f.paper_scale, "presets: use the printed n instead of the halved desk n");
  s->add_option("--sign-convention", f.sign, "theorem1 | definition")->check(CLI::IsMember({"theorem1", "definition"}));
  s->add_option("--two-point", f.two_point, "displayed | footnote")->check(CLI::IsMember({"displayed", "footnote"}));
  s->add_option("--budget", f.budget, "time budget in seconds");
  s->add_option("--which", f.which, "task variant (pade, pade2, hp, q0, q1, q2, nodes, trends)");
  s->add_option("--predictor", f.predictor, "rates: none | stahl_gE | theorem1_GF | buslaev_green");
  s->add_option("--point", f.points, "evaluation point re[,im]; repeatable");
  s->add_option("--theta", f.theta, "alternation: fraction of nodes allowed to be lost");
  s->add_option("--radius", f.radius, "Froissart matching radius");
  s->add_option("--margin", f.margin, "exclusion band around the limit set");
  s->add_option("--eps", f.eps, "disk radius around spurious points");
  s->add_option("--poly", f.poly, "roots: ascending coefficients separated by spaces");
  s->add_option("--nodes", f.nodes_file, "mpade: JSON file with interpolation nodes");
}

int run(const ExperimentConfig& c) {
  auto t0 = std::chrono::steady_clock::now();
  TaskOutput out = run_task(c);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  auto files = export_result(out.result, c.out_dir, out.stem, c.formats, secs);
  for (const auto& p : files.files) std::cout << p.string() << "\n";
  for (const auto& n : out.result.notes) std::cerr << "note: " << n.get<std::string>() << "\n";
  if (out.result.partial) {
    std::cerr << "time budget exceeded; partial result at n = " << out.result.achieved_n << "\n";
    return kBudget;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hplab: Padé and Hermite-Padé experiments"};
  app.require_subcommand(1);
  Flags f;
  std::vector<std::pair<std::string, CLI::App*>> subs;
  const std::vector<std::pair<std::string, std::string>> help{
      {"expand", "series coefficients at infinity (and at 0 with --germ0)"},
      {"pade", "diagonal Padé approximant at infinity, zeros and poles"},
      {"pade2", "two-point Padé approximant (--germ0 at 0, --germ at infinity)"},
      {"mpade", "multipoint Padé approximant from a node file"},
      {"jfrac", "J-fraction coefficients and the n-th denominator"},
      {"hp", "type I Hermite-Padé polynomials for [1, f, f^2]; --which trends for the conjecture checks"},
      {"roots", "zeros of a polynomial given by --poly"},
      {"zdist", "zero distribution against the explicit equilibrium measure"},
      {"froissart", "Froissart doublets (pade, pade2) or triplets (hp)"},
      {"nodes", "interpolation nodes of the Hermite approximant on the cuts"},
      {"alternation", "alternation of the weighted error on the cut"},
      {"rates", "observed n-th root error against a predicted rate"},
      {"ortho", "orthogonality residuals on the cuts"},
      {"stahlgeo", "Chebotarev point and critical arcs of three branch points"},
      {"preset", "figure and case presets (figure1..figure14, case1..case3)"}};
  for (const auto& [name, text] : help) {
    auto* s = app.add_subcommand(name, text);
    add_common(s, f);
    if (name == "preset") {
      s->add_option("id", f.preset, "preset id");
      s->add_flag("--list", f.list_presets, "list preset ids with their germs");
    }
    subs.emplace_back(name, s);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kError;
  }
  try {
    for (const auto& [name, s] : subs) {
      if (!s->parsed()) continue;
      if (name == "preset" && f.list_presets) {
        for (const auto& p : presets())
          std::cout << p.id << "  n = " << p.paper_n << " (desk " << p.desk_n() << ")  " << p.formula << "\n";
        return kOk;
      }
      return run(build_config(name, f, *s));
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kError;
  } catch (const DegenerateInput& e) {
    std::cerr << "degenerate input: " << e.what() << "\n";
    return kDegenerate;
  } catch (const PrecisionExhausted& e) {
    std::cerr << "precision exhausted: " << e.what() << "\n";
    return kPrecision;
  } catch (const BudgetExceeded& e) {
    std::cerr << "time budget exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}

#include "ineq/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "ineq/concentration.hpp"
#include "ineq/errors.hpp"
#include "ineq/expression.hpp"
#include "ineq/functionals.hpp"
#include "ineq/measures.hpp"
#include "ineq/report.hpp"
#include "ineq/suites.hpp"
#include "ineq/transport.hpp"
#include "ineq/two_point.hpp"
#include "ineq/util.hpp"

namespace ineq {

namespace {

// "a:b:step", comma list, or single value.
std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> out;
  if (s.find(':') != std::string::npos) {
    double a, b, step;
    char c1, c2;
    std::istringstream is(s);
    if (!(is >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' ||
        !(step > 0.0))
      throw DomainError("bad grid '" + s + "', expected a:b:step");
    for (double t = a; t <= b + 1e-12 * std::max(1.0, std::abs(b)); t += step)
      out.push_back(t);
    return out;
  }
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw DomainError("empty grid '" + s + "'");
  return out;
}

nlohmann::json verdict_json(const LemmaVerdict& v) {
  return {{"lemma_id", v.lemma_id},
          {"trials", v.trials},
          {"violations", v.violations},
          {"worst_margin", v.worst_margin},
          {"params_of_worst", v.params_of_worst},
          {"notes", v.notes}};
}

nlohmann::json report_json(const InequalityReport& r) {
  return {{"p", r.p},
          {"a", r.a},
          {"var_p", r.var_p},
          {"energy", r.energy},
          {"ratio", r.ratio},
          {"measure_key", r.measure_key},
          {"function_label", r.function_label}};
}

struct Output {
  std::string path;    // empty -> stdout
  std::string format;  // json | csv
  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DomainError("cannot open output path '" + path + "'");
    f << text;
  }
};

std::string tail_curve_csv(const TailCurve& c) {
  std::string out = "t,bound,empirical,cp_upper\n";
  char buf[160];
  for (std::size_t i = 0; i < c.ts.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", c.ts[i],
                  c.bounds[i], c.empirical[i], c.cp_upper[i]);
    out += buf;
  }
  return out;
}

nlohmann::json tail_curve_json(const TailCurve& c) {
  return {{"r", c.r},
          {"dim", c.dim},
          {"C_assumed", c.C_assumed},
          {"samples", c.samples},
          {"center_bias", c.center_bias},
          {"t", c.ts},
          {"bound", c.bounds},
          {"counts", c.counts},
          {"empirical", c.empirical},
          {"cp_upper", c.cp_upper}};
}

std::string transport_csv(const TransportMap& tm, double xmax, double step) {
  std::string out = "x,z,dz,jac2,bound_lo,bound_hi\n";
  char buf[240];
  for (double x = -xmax; x <= xmax + 1e-12; x += step) {
    double z = tm(x);
    double dz = tm.derivative(x);
    double w = tm.inverse(x);
    double jac = 2.0 * tm.normalizer() *
                 std::exp(std::abs(x) - std::pow(std::abs(w), tm.r()));
    double env = std::max(1.0, std::pow(std::abs(x), tm.a()));
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", x,
                  z, dz, jac * jac, env / 50.0, 600.0 * env);
    out += buf;
  }
  return out;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"numerical laboratory for variance-entropy interpolation "
               "inequalities and their concentration consequences"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  Output out;
  out.format = "json";
  app.add_option("--seed", seed, "base RNG seed");
  app.add_option("--out", out.path, "write the report to a file");
  app.add_option("--format", out.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  // catalog
  auto* catalog = app.add_subcommand("catalog", "list measure keys");

  // constant two-point
  auto* constant = app.add_subcommand("constant", "optimal constants");
  auto* ctp = constant->add_subcommand("two-point", "two-point optimal constant");
  double alpha = 0.3, cp = 1.5;
  bool with_oracle = false;
  int resolution = 4096;
  ctp->add_option("--alpha", alpha, "mass at +1")->required();
  ctp->add_option("--p", cp, "moment index in [1,2)")->required();
  ctp->add_flag("--oracle", with_oracle, "also run the brute-force optimizer");
  ctp->add_option("--resolution", resolution, "scan resolution (>= 1000)");

  // verify lemma
  auto* verify = app.add_subcommand("verify", "randomized inequality suites");
  auto* vlemma = verify->add_subcommand("lemma", "run one lemma suite");
  std::string lemma_id;
  long long trials = 10000;
  vlemma->add_option("--id", lemma_id, "suite id")->required();
  vlemma->add_option("--trials", trials, "trial count");

  // ia-ratio
  auto* iar = app.add_subcommand("ia-ratio", "witnessed inequality ratio");
  std::string measure_key = "gauss:sigma=1", f_src, weight_src;
  double ip = 1.5, ia = 1.0;
  iar->add_option("--measure", measure_key, "measure key")->required();
  iar->add_option("--f", f_src, "test function expression")->required();
  iar->add_option("--p", ip, "moment index in [1,2)")->required();
  iar->add_option("--a", ia, "interpolation exponent in [0,1]")->required();
  iar->add_option("--weight", weight_src, "optional energy weight expression");

  // transport
  auto* transport = app.add_subcommand("transport", "monotone transport map");
  auto* tbuild = transport->add_subcommand("build", "tabulate the map");
  auto* tcheck = transport->add_subcommand("check", "Jacobian envelope sweep");
  double tr = 1.5, xmax = 30.0;
  bool dump = false;
  tbuild->add_option("--r", tr, "shape in [1,2]")->required();
  tbuild->add_flag("--dump", dump, "emit the tabulation as CSV");
  double tr2 = 1.5;
  tcheck->add_option("--r", tr2, "shape in [1,2]")->required();
  tcheck->add_option("--xmax", xmax, "sweep half-width");

  // tail
  auto* tail = app.add_subcommand("tail", "concentration tails");
  auto* tmc = tail->add_subcommand("mc", "Monte Carlo exceedance curve");
  tmc->set_help_flag("--help", "print help");  // frees -h/--h for the observable
  double mr = 1.5, C_assumed = 1.0;
  int mn = 1;
  long long samples = 100000;
  std::string h_src = "x", t_grid_src = "1.5:3.5:0.25";
  tmc->add_option("--r", mr, "shape in [1,2]")->required();
  tmc->add_option("--n", mn, "product dimension");
  tmc->add_option("--h", h_src, "1-Lipschitz observable expression");
  tmc->add_option("--t", t_grid_src, "t grid a:b:step or list");
  tmc->add_option("--samples", samples, "Monte Carlo sample count");
  tmc->add_option("--C", C_assumed, "assumed inequality constant");
  auto* tbound = tail->add_subcommand("bound", "closed-form tail bound");
  double ba = 1.0;
  std::string bt_src = "0:3:0.25";
  bool optimized = false;
  tbound->add_option("--a", ba, "interpolation exponent in [0,1]")->required();
  tbound->add_option("--t", bt_src, "t grid a:b:step or list");
  tbound->add_flag("--optimized", optimized, "numerically optimized selection");

  // mgf verify
  auto* mgf = app.add_subcommand("mgf", "moment generating function bounds");
  auto* mverify = mgf->add_subcommand("verify", "compare MGF with the bound");
  mverify->set_help_flag("--help", "print help");
  std::string m_measure = "gauss:sigma=1", mh_src = "x", lambda_src = "0:1.8:0.2";
  std::string p_src = "1,1.5,1.9,1.99";
  double mC = 1.0, ma = 1.0;
  mverify->add_option("--measure", m_measure, "measure key")->required();
  mverify->add_option("--h", mh_src, "1-Lipschitz observable expression");
  mverify->add_option("--C", mC, "certified constant");
  mverify->add_option("--a", ma, "certified exponent");
  mverify->add_option("--lambda", lambda_src, "lambda grid a:b:step or list");
  mverify->add_option("--p", p_src, "p grid list");

  // Global flags (--seed/--out/--format) may follow any subcommand.
  for (CLI::App* sub : app.get_subcommands(nullptr)) {
    sub->fallthrough();
    for (CLI::App* nested : sub->get_subcommands(nullptr)) nested->fallthrough();
  }

  std::vector<std::string> argv_copy(args);
  try {
    std::vector<const char*> argv;
    argv.push_back("ineq");
    for (const auto& a : argv_copy) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  std::string command_echo = "ineq";
  for (const auto& a : args) command_echo += " " + a;

  const auto t0 = std::chrono::steady_clock::now();
  int exit_code = 0;
  try {
    nlohmann::json payload;
    std::string csv_text;

    if (catalog->parsed()) {
      payload = {{"keys", catalog_keys()},
                 {"lemma_suites", lemma_suite_ids()}};
    } else if (ctp->parsed()) {
      double closed = optimal_constant_closed_form(alpha, cp);
      payload = {{"alpha", alpha}, {"p", cp}, {"closed_form", closed}};
      if (with_oracle) {
        TwoPointOptimum opt = optimal_constant_bruteforce(alpha, cp, resolution);
        payload["bruteforce"] = opt.constant;
        payload["maximizer"] = {opt.f_minus, opt.f_plus};
        payload["gap"] = std::abs(opt.constant - closed);
      }
    } else if (vlemma->parsed()) {
      LemmaVerdict v = run_lemma_suite(lemma_id, trials, Seed{seed, 0});
      payload = verdict_json(v);
      if (v.violations > 0) exit_code = 1;
    } else if (iar->parsed()) {
      Measure m = measure_from_key(measure_key);
      TestFunction f = parse_fn(f_src, m.dim());
      WeightFn w;
      if (!weight_src.empty()) {
        TestFunction wf = parse_fn(weight_src, 1);
        w = [wf](double x) { return wf.at(x); };
      }
      InequalityReport rep = ia_ratio(m, f, ip, ia, w);
      payload = report_json(rep);
    } else if (tbuild->parsed()) {
      TransportMap tm = TransportMap::build(tr);
      if (dump || out.format == "csv") {
        csv_text = transport_csv(tm, std::min(30.0, tm.max_z()), 0.05);
      } else {
        payload = {{"r", tm.r()},
                   {"a", tm.a()},
                   {"normalizer", tm.normalizer()},
                   {"nodes", tm.grid().size()},
                   {"z_at", {{"0", tm(0.0)}, {"1", tm(1.0)}, {"5", tm(5.0)}}},
                   {"max_z", tm.max_z()}};
      }
    } else if (tcheck->parsed()) {
      TransportMap tm = TransportMap::build(tr2);
      std::vector<double> xs;
      for (double x = -xmax; x <= xmax + 1e-12; x += 0.01) xs.push_back(x);
      LemmaVerdict v = jacobian_bound_check(tm, xs);
      payload = verdict_json(v);
      payload["r"] = tr2;
      if (v.violations > 0) exit_code = 1;
    } else if (tmc->parsed()) {
      TestFunction h = parse_fn(h_src, mn);
      std::vector<double> ts = parse_grid(t_grid_src);
      TailCurve curve = mc_tail_experiment(mr, mn, h, ts, samples,
                                           Seed{seed, 0}, C_assumed);
      if (out.format == "csv")
        csv_text = tail_curve_csv(curve);
      else
        payload = tail_curve_json(curve);
    } else if (tbound->parsed()) {
      HerbstParams hp{1.0, ba};
      std::vector<double> ts = parse_grid(bt_src);
      nlohmann::json rows = nlohmann::json::array();
      for (double t : ts) {
        nlohmann::json row{{"t", t},
                           {"paper_choice", tail_bound(hp, t, TailMode::paper_choice)}};
        if (optimized) row["optimized"] = tail_bound(hp, t, TailMode::optimized);
        rows.push_back(row);
      }
      payload = {{"a", ba}, {"rows", rows}};
    } else if (mverify->parsed()) {
      Measure m = measure_from_key(m_measure);
      TestFunction h = parse_fn(mh_src, m.dim());
      HerbstParams hp{mC, ma};
      std::vector<double> lambdas = parse_grid(lambda_src);
      std::vector<double> ps = parse_grid(p_src);
      auto margins = mgf_verify(m, h, hp, lambdas, ps);
      double worst = std::numeric_limits<double>::infinity();
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& mm : margins) {
        worst = std::min(worst, mm.margin);
        rows.push_back({{"p", mm.p},
                        {"lambda", mm.lambda},
                        {"value", mm.value},
                        {"bound", mm.bound},
                        {"margin", mm.margin}});
      }
      payload = {{"measure", m_measure}, {"C", mC}, {"a", ma},
                 {"worst_margin", worst}, {"rows", rows}};
      if (worst < -1e-8) exit_code = 1;
    }

    if (!csv_text.empty())
      out.write(csv_text);
    else
      out.write(dump_json(run_report(command_echo, seed, payload)));
  } catch (const NonConvergent& e) {
    std::cerr << "non-convergent: " << e.what() << "\n";
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const ArityError& e) {
    std::cerr << "arity error: " << e.what() << "\n";
    return 2;
  } catch (const DegenerateWitness& e) {
    std::cerr << "degenerate witness: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  const auto t1 = std::chrono::steady_clock::now();
  std::cerr << "elapsed_ms="
            << std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()
            << "\n";
  return exit_code;
}

}  // namespace ineq

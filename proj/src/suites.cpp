#include "ineq/suites.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "ineq/errors.hpp"
#include "ineq/expression.hpp"
#include "ineq/functionals.hpp"
#include "ineq/measures.hpp"
#include "ineq/phi_class.hpp"
#include "ineq/util.hpp"

namespace ineq {

namespace {

constexpr double kSlack = 1e-10;

struct SuiteState {
  LemmaVerdict verdict;
  void record(double margin, double scale, nlohmann::json params,
              double slack = kSlack) {
    ++verdict.trials;
    double floor = -slack * std::max(1.0, scale);
    if (margin < verdict.worst_margin || verdict.trials == 1) {
      verdict.worst_margin = margin;
      verdict.params_of_worst = std::move(params);
    }
    if (margin < floor) ++verdict.violations;
  }
};

PhiCandidate power_phi(double gamma) {
  PhiCandidate c;
  c.label = "x^" + std::to_string(gamma);
  c.eval = [gamma](double x) { return std::pow(x, gamma); };
  c.second_derivative = [gamma](double x) {
    return gamma * (gamma - 1.0) * std::pow(x, gamma - 2.0);
  };
  return c;
}

// c1*x^g1 + c2*x^g2 + a0*x + b0 with nonnegative cone coefficients.
PhiCandidate cone_phi(double c1, double g1, double c2, double g2, double a0,
                      double b0) {
  PhiCandidate c;
  c.label = "cone";
  c.eval = [=](double x) {
    return c1 * std::pow(x, g1) + c2 * std::pow(x, g2) + a0 * x + b0;
  };
  c.second_derivative = [=](double x) {
    return c1 * g1 * (g1 - 1.0) * std::pow(x, g1 - 2.0) +
           c2 * g2 * (g2 - 1.0) * std::pow(x, g2 - 2.0);
  };
  return c;
}

Measure random_discrete(Rng& rng, int min_atoms, int max_atoms) {
  int k = min_atoms + static_cast<int>(rng.index(max_atoms - min_atoms + 1));
  std::vector<Atom> atoms(k);
  for (int i = 0; i < k; ++i)
    atoms[i].point = {-3.0 + 6.0 * (i + rng.uniform(0.05, 0.95)) / k};
  double total = 0.0;
  for (Atom& a : atoms) total += (a.weight = rng.uniform(0.05, 1.0));
  for (Atom& a : atoms) a.weight /= total;
  return Measure(DiscreteMeasure(std::move(atoms)));
}

// Function given by per-atom values over an enumerable measure.
TestFunction tabulated_fn(const Measure& m, std::vector<double> values,
                          const std::string& label) {
  std::vector<Atom> atoms = enumerate_atoms(m);
  TestFunction f;
  f.arity = m.dim();
  f.label = label;
  f.eval = [atoms = std::move(atoms),
            values = std::move(values)](std::span<const double> x) {
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (std::equal(x.begin(), x.end(), atoms[i].point.begin(),
                     atoms[i].point.end()))
        return values[i];
    }
    throw DomainError("tabulated function queried off the atom grid");
  };
  return f;
}

std::vector<double> random_values(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.log_uniform(lo, hi);
  return v;
}

// --- individual suites ----------------------------------------------------

void phi_cone_trial(SuiteState& st, Rng& rng) {
  double g1 = 2.0 / rng.uniform(1.0, 1.99);
  double g2 = 2.0 / rng.uniform(1.0, 1.99);
  double c1 = rng.log_uniform(1e-2, 1e2);
  double c2 = rng.log_uniform(1e-2, 1e2);
  double a0 = rng.uniform(-5.0, 5.0);
  double b0 = rng.uniform(-5.0, 5.0);
  PhiCandidate c = cone_phi(c1, g1, c2, g2, a0, b0);
  std::vector<double> grid(64);
  for (int i = 0; i < 64; ++i)
    grid[i] = std::exp(std::log(1e-2) + (std::log(1e2) - std::log(1e-2)) * i / 63.0);
  PhiDiagnostics diag = is_in_phi(c, grid, 1e-9);
  st.record(diag.member ? diag.worst_margin : -1.0, 1.0,
            {{"c1", c1}, {"g1", g1}, {"c2", c2}, {"g2", g2}, {"a0", a0},
             {"b0", b0}, {"member", diag.member}, {"reason", diag.reason}});
}

void ft_convex_trial(SuiteState& st, Rng& rng) {
  double p = rng.uniform(1.0, 1.99);
  PhiCandidate c = power_phi(2.0 / p);
  double t = rng.uniform01();
  double x1 = rng.log_uniform(1e-3, 1e3), y1 = rng.log_uniform(1e-3, 1e3);
  double x2 = rng.log_uniform(1e-3, 1e3), y2 = rng.log_uniform(1e-3, 1e3);
  double fa = ft_deficit(c, t, x1, y1);
  double fb = ft_deficit(c, t, x2, y2);
  double fm = ft_deficit(c, t, 0.5 * (x1 + x2), 0.5 * (y1 + y2));
  double margin = 0.5 * (fa + fb) - fm;
  double scale = std::max({std::abs(fa), std::abs(fb), std::abs(fm),
                           std::pow(std::max({x1, x2, y1, y2}), 2.0 / p)});
  nlohmann::json params{{"p", p}, {"t", t}, {"x1", x1}, {"y1", y1},
                        {"x2", x2}, {"y2", y2}};
  st.record(margin, scale, params);
  // Nonnegativity rides along at a tighter slack.
  if (std::min(fa, fb) < -1e-12 * std::max(1.0, scale)) ++st.verdict.violations;
}

void psi_convex_trial(SuiteState& st, Rng& rng) {
  Measure m = random_discrete(rng, 4, 4);
  double p = rng.uniform(1.0, 1.99);
  PhiCandidate c = power_phi(2.0 / p);
  double t = rng.uniform01();
  std::vector<double> xv = random_values(rng, 4, 1e-3, 1e3);
  std::vector<double> yv = random_values(rng, 4, 1e-3, 1e3);
  TestFunction X = tabulated_fn(m, xv, "X");
  TestFunction Y = tabulated_fn(m, yv, "Y");
  double margin = psi_convexity_margin(c, m, X, Y, t);
  double big = std::pow(
      std::max(*std::max_element(xv.begin(), xv.end()),
               *std::max_element(yv.begin(), yv.end())),
      2.0 / p);
  st.record(margin, big, {{"p", p}, {"t", t}, {"X", xv}, {"Y", yv}});
}

Measure random_discrete_product(Rng& rng, int n, int min_atoms, int max_atoms) {
  std::vector<Measure> fs;
  for (int i = 0; i < n; ++i) fs.push_back(random_discrete(rng, min_atoms, max_atoms));
  return product(std::move(fs));
}

void subadd_trial(SuiteState& st, Rng& rng) {
  int n = 2 + static_cast<int>(rng.index(2));
  Measure pm = random_discrete_product(rng, n, 2, 4);
  std::size_t total = enumerate_atoms(pm).size();
  std::vector<double> zv = random_values(rng, total, 1e-2, 1e2);
  TestFunction Z = tabulated_fn(pm, zv, "Z");
  double p = rng.uniform(1.0, 2.0);
  PhiCandidate c = power_phi(2.0 / p);
  auto [lhs, rhs] = subadditivity_margin(pm, Z, c);
  st.record(rhs - lhs, std::max(std::abs(lhs), std::abs(rhs)),
            {{"n", n}, {"p", p}, {"lhs", lhs}, {"rhs", rhs}});
}

void varp_subadd_trial(SuiteState& st, Rng& rng) {
  int n = 2 + static_cast<int>(rng.index(2));
  Measure pm = random_discrete_product(rng, n, 2, 4);
  std::size_t total = enumerate_atoms(pm).size();
  std::vector<double> fv = random_values(rng, total, 1e-2, 1e2);
  TestFunction f = tabulated_fn(pm, fv, "f");
  double p = rng.uniform(1.0, 2.0);
  auto [lhs, rhs] = var_p_subadditivity(pm, f, p);
  st.record(rhs - lhs, std::max(std::abs(lhs), std::abs(rhs)),
            {{"n", n}, {"p", p}, {"lhs", lhs}, {"rhs", rhs}});
}

void cn_trial(SuiteState& st, Rng& rng, long long idx) {
  switch (idx % 3) {
    case 0: {  // n=3, quadratic-affine family on R^2 (in every C_n)
      Measure pm = random_discrete_product(rng, 3, 2, 3);
      std::size_t total = enumerate_atoms(pm).size();
      std::vector<double> z1(total), z2(total);
      for (std::size_t i = 0; i < total; ++i) {
        z1[i] = rng.uniform(-3.0, 3.0);
        z2[i] = rng.uniform(-3.0, 3.0);
      }
      double a11 = rng.uniform(-1.0, 1.0), a12 = rng.uniform(-1.0, 1.0);
      double a21 = rng.uniform(-1.0, 1.0), a22 = rng.uniform(-1.0, 1.0);
      double l1 = rng.uniform(-2.0, 2.0), l2 = rng.uniform(-2.0, 2.0);
      double y0 = rng.uniform(-2.0, 2.0);
      auto f = [=](std::span<const double> v) {
        double q1 = a11 * v[0] + a12 * v[1];
        double q2 = a21 * v[0] + a22 * v[1];
        return q1 * q1 + q2 * q2 + l1 * v[0] + l2 * v[1] + y0;
      };
      TestFunction z1f = tabulated_fn(pm, z1, "z1");
      TestFunction z2f = tabulated_fn(pm, z2, "z2");
      auto Z = [&](std::span<const double> x) {
        return std::vector<double>{z1f.eval(x), z2f.eval(x)};
      };
      double v = cn_alternating_sum(f, pm, Z, 2);
      st.record(v, 50.0, {{"family", "quadratic"}, {"n", 3}, {"value", v}});
      break;
    }
    case 1: {  // n=2, cone member on (0,inf)
      Measure pm = random_discrete_product(rng, 2, 2, 4);
      std::size_t total = enumerate_atoms(pm).size();
      std::vector<double> zv = random_values(rng, total, 1e-2, 1e2);
      TestFunction zf = tabulated_fn(pm, zv, "Z");
      double p = rng.uniform(1.0, 1.99);
      double gamma = 2.0 / p;
      auto f = [gamma](std::span<const double> v) {
        return std::pow(v[0], gamma);
      };
      auto Z = [&](std::span<const double> x) {
        return std::vector<double>{zf.eval(x)};
      };
      double v = cn_alternating_sum(f, pm, Z, 1);
      double big = std::pow(*std::max_element(zv.begin(), zv.end()), gamma);
      st.record(v, big, {{"family", "power"}, {"n", 2}, {"p", p}, {"value", v}});
      break;
    }
    default: {  // n=1: alternating sum reduces to Jensen's gap of a convex f
      Measure pm = random_discrete(rng, 2, 5);
      std::size_t total = enumerate_atoms(pm).size();
      std::vector<double> zv(total);
      for (double& z : zv) z = rng.uniform(-5.0, 5.0);
      TestFunction zf = tabulated_fn(pm, zv, "Z");
      auto f = [](std::span<const double> v) { return v[0] * v[0]; };
      auto Z = [&](std::span<const double> x) {
        return std::vector<double>{zf.eval(x)};
      };
      double v = cn_alternating_sum(f, pm, Z, 1);
      st.record(v, 25.0, {{"family", "convex"}, {"n", 1}, {"value", v}});
      break;
    }
  }
}

void rho_trial(SuiteState& st, Rng& rng) {
  static const double s_grid[] = {1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9, 2.0};
  double s = s_grid[rng.index(10)];
  double x = rng.log_uniform(1e-3, 1e3);
  double y = rng.log_uniform(1e-3, 1e3);
  double z = rng.log_uniform(1e-3, 1e3);
  double margin = rho_s(x, y, s) + rho_s(y, z, s) - rho_s(x, z, s);
  nlohmann::json params{{"s", s}, {"x", x}, {"y", y}, {"z", z}};
  st.record(margin, 0.0, params, 1e-12);  // absolute slack for the metric
  if (rho_s(x, y, s) != rho_s(y, x, s)) ++st.verdict.violations;   // symmetry
  if (rho_s(x, x, s) > 1e-14) ++st.verdict.violations;             // identity
}

void lemma8_trials(SuiteState& st, Rng& rng) {
  double s = rng.uniform(1.0, 2.0);
  double c = rng.log_uniform(1e-3, 1e3);
  double d = rng.log_uniform(1e-3, 1e3);
  double scale = [&](double x) {
    return std::pow(std::max({c, d, x, 1.0}), s);
  }(0.0);

  {  // regime 1: x outside the open interval between c and d
    double t = rng.uniform01();
    double x = rng.uniform01() < 0.5 ? std::min(c, d) * rng.uniform01()
                                     : std::max(c, d) * rng.log_uniform(1.0, 10.0);
    double m = lemma8_margin(s, t, c, d, x, Lemma8Regime::outside_interval);
    st.record(m, std::max(scale, std::pow(x, s)),
              {{"regime", "outside"}, {"s", s}, {"t", t}, {"c", c}, {"d", d}, {"x", x}});
  }
  {  // regime 2: t = 1/2
    double x = rng.log_uniform(1e-3, 1e3);
    double m = lemma8_margin(s, 0.5, c, d, x, Lemma8Regime::half_t);
    st.record(m, std::max(scale, std::pow(x, s)),
              {{"regime", "half"}, {"s", s}, {"c", c}, {"d", d}, {"x", x}});
  }
  {  // regime 3: t <= 1/2, c >= d
    double t = rng.uniform(0.0, 0.5);
    double ch = std::max(c, d), dh = std::min(c, d);
    double x = rng.log_uniform(1e-3, 1e3);
    double m = lemma8_margin(s, t, ch, dh, x, Lemma8Regime::small_t_ordered);
    st.record(m, std::max(scale, std::pow(x, s)),
              {{"regime", "small-t"}, {"s", s}, {"t", t}, {"c", ch}, {"d", dh}, {"x", x}});
  }
}

TestFunction random_smooth_expression(Rng& rng, std::string* src_out) {
  char buf[256];
  double c0 = rng.uniform(-3.0, 3.0);
  double c1 = rng.uniform(-2.0, 2.0), a1 = rng.uniform(0.3, 3.0),
         b1 = rng.uniform(0.0, 6.28);
  double c2 = rng.uniform(-2.0, 2.0), m2 = rng.uniform(0.0, 4.0);
  double c3 = rng.uniform(-0.5, 0.5);
  std::snprintf(buf, sizeof(buf),
                "%.6f + %.6f*sin(%.6f*x + %.6f) + %.6f*exp(-(x-%.6f)^2) + %.6f*x",
                c0, c1, a1, b1, c2, m2, c3);
  if (src_out) *src_out = buf;
  return parse_fn(buf, 1);
}

void lemma9_trial(SuiteState& st, Rng& rng) {
  double x1 = rng.uniform(0.0, 3.0);
  double x2 = x1 + rng.log_uniform(1e-2, 5.0);
  double a = rng.uniform01();
  std::string src;
  TestFunction g = random_smooth_expression(rng, &src);
  double y1 = g.at(x1), y2 = g.at(x2);
  QuadratureSpec q;
  q.abs_tol = 1e-12;
  q.rel_tol = 1e-11;
  double margin = lemma9_margin(x1, x2, y1, y2, a, g, q);
  st.record(margin, std::max(1.0, (y2 - y1) * (y2 - y1)),
            {{"x1", x1}, {"x2", x2}, {"a", a}, {"g", src}});
}

void lemma10_trial(SuiteState& st, Rng& rng) {
  double x1 = rng.uniform(0.0, 3.0);
  double x2 = x1 + rng.log_uniform(1e-2, 4.0);
  double y2 = rng.log_uniform(1e-3, 1e3);
  double y1 = y2 * rng.uniform(0.0, 0.999);
  double p = rng.uniform(1.0, 4.0);
  QuadratureSpec q;
  q.abs_tol = 1e-13;
  q.rel_tol = 1e-12;
  Lemma10Result res = lemma10_check(x1, x2, y1, y2, p, q);
  double scale = std::max(1.0, std::pow(y2, p));
  nlohmann::json params{{"x1", x1}, {"x2", x2}, {"y1", y1}, {"y2", y2}, {"p", p}};
  st.record(res.est3_margin, scale, params);
  // The exact energy identity is part of the same trial.
  if (res.energy_gap > 1e-8 * std::max(1.0, res.closed_energy)) {
    ++st.verdict.violations;
    st.verdict.notes = "energy identity gap exceeded 1e-8";
  }
}

void lemma11_trial(SuiteState& st, Rng& rng, bool boundary) {
  double s = rng.uniform(1.001, 2.0);
  double t = rng.uniform(0.001, 0.999);
  double c = rng.log_uniform(1e-2, 10.0);
  double d = c * rng.log_uniform(1.001, 20.0);
  double u = lemma11_u(s);
  double x = boundary ? c + (d - c) * 0.999999 : rng.uniform(c * 1.000001, d * 0.999999);
  double tc_max = (1.0 - u) * c + u * x;
  double tc = boundary ? tc_max : rng.uniform(1e-6, tc_max);
  bool exact = boundary || rng.uniform01() < 0.5;
  double a = std::pow(c, s) * (exact ? 1.0 : rng.log_uniform(1.0, 10.0));
  double b = std::pow(d, s) * (exact ? 1.0 : rng.log_uniform(1.0, 10.0));
  double ta = std::pow(tc, s) * (exact ? 1.0 : rng.log_uniform(1.0, 10.0));
  double margin = lemma11_margin(s, t, a, b, c, d, ta, tc, x);
  double scale = std::max({1.0, a, b, std::pow(d, s)});
  st.record(margin, scale,
            {{"s", s}, {"t", t}, {"a", a}, {"b", b}, {"c", c}, {"d", d},
             {"ta", ta}, {"tc", tc}, {"x", x}, {"boundary", boundary}});
}

void selftest_fail_trial(SuiteState& st, Rng& rng) {
  // Deliberately false claim: rho_{1.5}(x,y) <= |x-y|/4.
  double x = rng.log_uniform(1e-2, 1e2);
  double y = rng.log_uniform(1e-2, 1e2);
  double margin = std::abs(x - y) / 4.0 - rho_s(x, y, 1.5);
  st.record(margin, 0.0, {{"x", x}, {"y", y}}, 1e-12);
}

}  // namespace

std::vector<std::string> lemma_suite_ids() {
  return {"phi-cone", "ft-convex",  "psi-convex", "subadd",
          "varp-subadd", "cn",      "rho-metric", "lemma8",
          "lemma9",     "lemma10",  "lemma11",    "selftest-fail"};
}

LemmaVerdict run_lemma_suite(const std::string& id, long long trials, Seed seed) {
  if (trials < 1) throw DomainError("suite needs at least one trial");
  SuiteState st;
  st.verdict.lemma_id = id;
  for (long long i = 0; i < trials; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    if (id == "phi-cone")
      phi_cone_trial(st, rng);
    else if (id == "ft-convex")
      ft_convex_trial(st, rng);
    else if (id == "psi-convex")
      psi_convex_trial(st, rng);
    else if (id == "subadd")
      subadd_trial(st, rng);
    else if (id == "varp-subadd")
      varp_subadd_trial(st, rng);
    else if (id == "cn")
      cn_trial(st, rng, i);
    else if (id == "rho-metric")
      rho_trial(st, rng);
    else if (id == "lemma8")
      lemma8_trials(st, rng);
    else if (id == "lemma9")
      lemma9_trial(st, rng);
    else if (id == "lemma10")
      lemma10_trial(st, rng);
    else if (id == "lemma11")
      lemma11_trial(st, rng, i % 64 == 0);
    else if (id == "selftest-fail")
      selftest_fail_trial(st, rng);
    else
      throw DomainError("unknown lemma suite id '" + id + "'");
  }
  if (id == "selftest-fail")
    st.verdict.notes = "deliberately false inequality; violations are expected";
  return st.verdict;
}

}  // namespace ineq

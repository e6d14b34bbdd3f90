#include "ineq/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ineq/errors.hpp"
#include "ineq/util.hpp"

namespace ineq {

namespace {

double checked_nonneg(double v, const char* what) {
  if (v < 0.0) {
    if (v > -1e-9) return 0.0;  // rounding dust
    throw DomainError(std::string(what) + " must be nonnegative (got " +
                      std::to_string(v) + ")");
  }
  return v;
}

double xlogx(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

}  // namespace

TestFunction scalar_fn(std::string label, std::function<double(double)> f,
                       std::function<double(double)> df) {
  TestFunction t;
  t.arity = 1;
  t.label = std::move(label);
  t.eval = [f = std::move(f)](std::span<const double> x) { return f(x[0]); };
  if (df)
    t.gradient = [df = std::move(df)](std::span<const double> x) {
      return std::vector<double>{df(x[0])};
    };
  return t;
}

TestFunction constant_fn(double c, int arity) {
  TestFunction t;
  t.arity = arity;
  t.label = "const";
  t.eval = [c](std::span<const double>) { return c; };
  t.gradient = [arity](std::span<const double>) {
    return std::vector<double>(arity, 0.0);
  };
  return t;
}

void validate_gradient(const Measure& m, const TestFunction& f, double rel_tol) {
  if (!f.has_gradient()) throw DomainError("test function has no gradient");
  std::vector<std::vector<double>> probes;
  if (m.is_discrete() || m.is_product()) {
    std::vector<Atom> atoms;
    try {
      atoms = enumerate_atoms(m, 4096);
    } catch (const SizeError&) {
      for (auto& p : sample(m, 8, Seed{0xF00Dull, 77})) probes.push_back(p);
    }
    for (std::size_t i = 0; i < atoms.size() && probes.size() < 8; ++i)
      probes.push_back(atoms[i].point);
  } else {
    for (auto& p : sample(m, 8, Seed{0xF00Dull, 77})) probes.push_back(p);
  }
  std::vector<double> work;
  for (const auto& p : probes) {
    std::vector<double> g = f.gradient(std::span<const double>(p));
    work = p;
    for (std::size_t j = 0; j < p.size(); ++j) {
      double h = 1e-5 * std::abs(p[j]) + 1e-8;
      work[j] = p[j] + h;
      double fp = f.eval(std::span<const double>(work));
      work[j] = p[j] - h;
      double fm = f.eval(std::span<const double>(work));
      work[j] = p[j];
      double cd = (fp - fm) / (2.0 * h);
      double scale = std::max({1.0, std::abs(g[j]), std::abs(cd)});
      if (std::abs(cd - g[j]) > rel_tol * scale)
        throw DomainError("gradient disagrees with central differences at a probe point");
    }
  }
}

double p_variance(const Measure& m, const TestFunction& f, double p,
                  const QuadratureSpec& q) {
  if (!(p >= 1.0 && p <= 2.0)) throw DomainError("p_variance: p must lie in [1,2]");
  auto guarded = [&](std::span<const double> x) {
    return checked_nonneg(f.eval(x), "p-variance witness");
  };
  double ef2 = integrate(m, [&](std::span<const double> x) {
                 double v = guarded(x);
                 return v * v;
               }, q).value;
  if (p == 2.0) return 0.0;
  double efp = integrate(m, [&](std::span<const double> x) {
                 return std::pow(guarded(x), p);
               }, q).value;
  double v = ef2 - std::pow(efp, 2.0 / p);
  if (v < 0.0) {
    if (v < -1e-8 * std::max(1.0, std::abs(ef2)))
      throw NonConvergent("p_variance: negative beyond rounding; quadrature failed");
    v = 0.0;
  }
  return v;
}

double entropy(const Measure& m, const TestFunction& f, const QuadratureSpec& q) {
  auto guarded = [&](std::span<const double> x) {
    return checked_nonneg(f.eval(x), "entropy witness");
  };
  double ef2 = integrate(m, [&](std::span<const double> x) {
                 double v = guarded(x);
                 return v * v;
               }, q).value;
  if (!(ef2 > 0.0)) throw DomainError("entropy: E f^2 must be positive");
  double num = integrate(m, [&](std::span<const double> x) {
                 double v = guarded(x);
                 return xlogx(v * v);
               }, q).value;
  double ent = num - xlogx(ef2);
  if (ent < 0.0) {
    if (ent < -1e-8 * std::max(1.0, std::abs(num)))
      throw NonConvergent("entropy: negative beyond rounding; quadrature failed");
    ent = 0.0;
  }
  return ent;
}

std::vector<std::pair<double, double>> phi_curve(const Measure& m,
                                                 const TestFunction& f,
                                                 std::span<const double> p_grid,
                                                 const QuadratureSpec& q) {
  std::vector<std::pair<double, double>> out;
  out.reserve(p_grid.size());
  double prev = -std::numeric_limits<double>::infinity();
  for (double p : p_grid) {
    if (!(p >= 1.0 && p < 2.0))
      throw DomainError("phi_curve: grid must lie in [1,2)");
    if (p <= prev) throw DomainError("phi_curve: grid must be increasing");
    prev = p;
    out.emplace_back(p, p_variance(m, f, p, q) / (1.0 / p - 0.5));
  }
  return out;
}

double dirichlet_energy(const Measure& m, const TestFunction& f,
                        const WeightFn& weight, const QuadratureSpec& q) {
  if (m.is_discrete() && m.discrete().is_two_point()) {
    const auto& atoms = m.discrete().atoms();
    double lo = atoms[0].point[0], hi = atoms[1].point[0];
    if (lo > hi) std::swap(lo, hi);
    double d = (f.at(hi) - f.at(lo)) / 2.0;
    return d * d;
  }
  if (!f.has_gradient())
    throw DomainError("dirichlet_energy: gradient callback required");
  validate_gradient(m, f);
  auto integrand = [&](std::span<const double> x) {
    std::vector<double> g = f.gradient(x);
    double s = 0.0;
    for (double gi : g) s += gi * gi;
    if (weight) {
      if (x.size() != 1)
        throw DomainError("weighted energy is defined on 1-D measures");
      double w = weight(x[0]);
      if (w < 0.0) throw DomainError("energy weight must be nonnegative");
      s *= w;
    }
    return s;
  };
  return integrate(m, integrand, q).value;
}

InequalityReport ia_ratio(const Measure& m, const TestFunction& f, double p,
                          double a, const WeightFn& weight,
                          const QuadratureSpec& q) {
  if (!(p >= 1.0 && p < 2.0)) throw DomainError("ia_ratio: p must lie in [1,2)");
  if (!(a >= 0.0 && a <= 1.0)) throw DomainError("ia_ratio: a must lie in [0,1]");
  InequalityReport rep;
  rep.p = p;
  rep.a = a;
  rep.measure_key = m.key();
  rep.function_label = f.label;
  rep.var_p = p_variance(m, f, p, q);
  rep.energy = dirichlet_energy(m, f, weight, q);
  if (rep.energy <= 0.0) {
    if (rep.var_p > 1e-12)
      throw DegenerateWitness(
          "ia_ratio: zero energy with positive p-variance; no finite constant");
    rep.ratio = 0.0;
    return rep;
  }
  rep.ratio = rep.var_p / (std::pow(2.0 - p, a) * rep.energy);
  return rep;
}

}  // namespace ineq

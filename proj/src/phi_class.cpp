#include "ineq/phi_class.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>

#include "ineq/errors.hpp"
#include "ineq/util.hpp"

namespace ineq {

namespace {

// Factor-wise view of an all-discrete product for conditional expectations.
struct FactorGrid {
  std::vector<std::vector<Atom>> factors;  // per-factor atom lists
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> strides;  // row-major, last factor fastest
  std::vector<std::size_t> offsets;  // coordinate offset of each factor block
  std::size_t total = 1;
  int point_dim = 0;

  std::size_t digit(std::size_t g, std::size_t k) const {
    return (g / strides[k]) % sizes[k];
  }
};

FactorGrid make_factor_grid(const Measure& pm, std::size_t cap = 1000000) {
  FactorGrid fg;
  std::vector<const Measure*> fs;
  if (pm.is_discrete()) {
    fs.push_back(&pm);
  } else if (pm.is_product()) {
    for (const Measure& f : pm.product_factors().factors) fs.push_back(&f);
  } else {
    throw DomainError("operation requires a discrete (product) measure");
  }
  for (const Measure* f : fs) {
    fg.factors.push_back(enumerate_atoms(*f, cap));
    fg.sizes.push_back(fg.factors.back().size());
    fg.offsets.push_back(fg.point_dim);
    fg.point_dim += static_cast<int>(fg.factors.back()[0].point.size());
    if (fg.total > cap / fg.sizes.back())
      throw SizeError("product atom grid exceeds cap");
    fg.total *= fg.sizes.back();
  }
  fg.strides.assign(fg.sizes.size(), 1);
  for (std::size_t k = fg.sizes.size(); k-- > 1;)
    fg.strides[k - 1] = fg.strides[k] * fg.sizes[k];
  return fg;
}

void grid_point(const FactorGrid& fg, std::size_t g, std::vector<double>& out) {
  out.clear();
  for (std::size_t k = 0; k < fg.factors.size(); ++k) {
    const Atom& a = fg.factors[k][fg.digit(g, k)];
    out.insert(out.end(), a.point.begin(), a.point.end());
  }
}

double grid_weight(const FactorGrid& fg, std::size_t g) {
  double w = 1.0;
  for (std::size_t k = 0; k < fg.factors.size(); ++k)
    w *= fg.factors[k][fg.digit(g, k)].weight;
  return w;
}

double eval_phi(const PhiCandidate& c, double x) { return c.eval(x); }

}  // namespace

double phi_second(const PhiCandidate& c, double x) {
  if (c.second_derivative) return c.second_derivative(x);
  double h = std::abs(x) * 1e-5 + 1e-8;
  return (c.eval(x + h) - 2.0 * c.eval(x) + c.eval(x - h)) / (h * h);
}

PhiDiagnostics is_in_phi(const PhiCandidate& c, std::span<const double> grid,
                         double tol) {
  if (grid.size() < 64) throw DomainError("is_in_phi: grid must have >= 64 points");
  std::vector<double> xs(grid.begin(), grid.end());
  std::sort(xs.begin(), xs.end());
  if (!(xs.front() > 0.0)) throw DomainError("is_in_phi: grid must lie in (0,inf)");
  // Central-difference second derivatives carry ~1e-5 relative noise at the
  // spec step size; the curvature tests cannot resolve below that.
  if (!c.second_derivative) tol = std::max(tol, 1e-4);

  PhiDiagnostics diag;
  diag.worst_margin = std::numeric_limits<double>::infinity();

  // Affine escape hatch, decided on values alone: midpoint linearity across
  // the grid span (curvature estimates are too noisy to detect zero).
  {
    bool linear = true;
    for (std::size_t i = 0; i + 1 < xs.size() && linear; i += 5) {
      double x = xs[i], y = xs[xs.size() - 1 - i];
      double scale = std::max({1.0, std::abs(c.eval(x)), std::abs(c.eval(y))});
      if (std::abs(c.eval(0.5 * (x + y)) - 0.5 * (c.eval(x) + c.eval(y))) >
          1e-9 * scale)
        linear = false;
    }
    if (linear) {
      diag.member = true;
      diag.affine = true;
      diag.worst_margin = 0.0;
      return diag;
    }
  }

  std::vector<double> dd(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    dd[i] = phi_second(c, xs[i]);
    if (!std::isfinite(dd[i]))
      throw DomainError("is_in_phi: second derivative evaluation failed");
  }

  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(dd[i] > tol)) {
      diag.member = false;
      diag.reason = "second derivative not strictly positive at x=" +
                    std::to_string(xs[i]);
      diag.worst_margin = dd[i];
      diag.worst_triple = {xs[i], xs[i], xs[i]};
      return diag;
    }
  }

  // Midpoint concavity of 1/phi'' over all grid pairs.
  std::vector<double> rec(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) rec[i] = 1.0 / dd[i];
  bool ok = true;
  for (std::size_t i = 0; i < xs.size() && ok; ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      double mid = 0.5 * (xs[i] + xs[j]);
      double qm = 1.0 / phi_second(c, mid);
      double avg = 0.5 * (rec[i] + rec[j]);
      double scale = std::max({1.0, std::abs(qm), std::abs(avg)});
      double margin = (qm - avg) / scale;
      if (margin < diag.worst_margin) {
        diag.worst_margin = margin;
        diag.worst_triple = {xs[i], mid, xs[j]};
      }
      if (margin < -tol) {
        diag.reason = "1/phi'' fails midpoint concavity";
        ok = false;
        break;
      }
    }
  }
  // Second-difference sweep on the (non-uniform) grid.
  for (std::size_t i = 1; i + 1 < xs.size() && ok; ++i) {
    double lam = (xs[i] - xs[i - 1]) / (xs[i + 1] - xs[i - 1]);
    double chord = (1.0 - lam) * rec[i - 1] + lam * rec[i + 1];
    double scale = std::max({1.0, std::abs(rec[i]), std::abs(chord)});
    double margin = (rec[i] - chord) / scale;
    if (margin < diag.worst_margin) {
      diag.worst_margin = margin;
      diag.worst_triple = {xs[i - 1], xs[i], xs[i + 1]};
    }
    if (margin < -tol) {
      diag.reason = "1/phi'' fails grid second-difference concavity";
      ok = false;
    }
  }
  diag.member = ok;
  return diag;
}

double ft_deficit(const PhiCandidate& c, double t, double x, double y) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("ft_deficit: t must lie in [0,1]");
  if (!(x >= 0.0 && y >= 0.0))
    throw DomainError("ft_deficit: arguments must be nonnegative");
  return t * eval_phi(c, x) + (1.0 - t) * eval_phi(c, y) -
         eval_phi(c, t * x + (1.0 - t) * y);
}

double psi_convexity_margin(const PhiCandidate& c, const Measure& m,
                            const TestFunction& X, const TestFunction& Y,
                            double t) {
  if (!(t >= 0.0 && t <= 1.0))
    throw DomainError("psi_convexity_margin: t must lie in [0,1]");
  std::vector<Atom> atoms = enumerate_atoms(m);
  auto psi = [&](auto&& value_at) {
    Kahan ephi, ez;
    for (const Atom& a : atoms) {
      double v = value_at(a);
      if (v < 0.0) throw DomainError("psi requires nonnegative variables");
      ephi.add(a.weight * eval_phi(c, v));
      ez.add(a.weight * v);
    }
    return ephi.sum() - eval_phi(c, ez.sum());
  };
  auto xv = [&](const Atom& a) { return X.eval(std::span<const double>(a.point)); };
  auto yv = [&](const Atom& a) { return Y.eval(std::span<const double>(a.point)); };
  auto mix = [&](const Atom& a) { return t * xv(a) + (1.0 - t) * yv(a); };
  return t * psi(xv) + (1.0 - t) * psi(yv) - psi(mix);
}

std::pair<double, double> subadditivity_margin(const Measure& pm,
                                               const TestFunction& Z,
                                               const PhiCandidate& c) {
  FactorGrid fg = make_factor_grid(pm);
  std::vector<double> zv(fg.total);
  std::vector<double> pt;
  for (std::size_t g = 0; g < fg.total; ++g) {
    grid_point(fg, g, pt);
    zv[g] = Z.eval(std::span<const double>(pt));
    if (zv[g] < 0.0)
      throw DomainError("subadditivity_margin: Z must be nonnegative on the grid");
  }

  Kahan ephi, ez;
  for (std::size_t g = 0; g < fg.total; ++g) {
    double w = grid_weight(fg, g);
    ephi.add(w * eval_phi(c, zv[g]));
    ez.add(w * zv[g]);
  }
  double lhs = ephi.sum() - eval_phi(c, ez.sum());

  Kahan rhs;
  for (std::size_t k = 0; k < fg.factors.size(); ++k) {
    const auto& fk = fg.factors[k];
    Kahan term;
    for (std::size_t g = 0; g < fg.total; ++g) {
      double w = grid_weight(fg, g);
      std::size_t base = g - fg.digit(g, k) * fg.strides[k];
      double cond_phi = 0.0, cond_z = 0.0;
      for (std::size_t j = 0; j < fk.size(); ++j) {
        double zj = zv[base + j * fg.strides[k]];
        cond_phi += fk[j].weight * eval_phi(c, zj);
        cond_z += fk[j].weight * zj;
      }
      term.add(w * (cond_phi - eval_phi(c, cond_z)));
    }
    rhs.add(term.sum());
  }
  return {lhs, rhs.sum()};
}

std::pair<double, double> var_p_subadditivity(const Measure& pm,
                                              const TestFunction& f, double p) {
  if (!(p >= 1.0 && p <= 2.0))
    throw DomainError("var_p_subadditivity: p must lie in [1,2]");
  FactorGrid fg = make_factor_grid(pm);
  std::vector<double> fv(fg.total);
  std::vector<double> pt;
  for (std::size_t g = 0; g < fg.total; ++g) {
    grid_point(fg, g, pt);
    fv[g] = f.eval(std::span<const double>(pt));
    if (fv[g] < 0.0)
      throw DomainError("var_p_subadditivity: f must be nonnegative on the grid");
  }
  const double q = 2.0 / p;

  Kahan ef2, efp;
  for (std::size_t g = 0; g < fg.total; ++g) {
    double w = grid_weight(fg, g);
    ef2.add(w * fv[g] * fv[g]);
    efp.add(w * std::pow(fv[g], p));
  }
  double lhs = ef2.sum() - std::pow(efp.sum(), q);

  Kahan rhs;
  for (std::size_t k = 0; k < fg.factors.size(); ++k) {
    const auto& fk = fg.factors[k];
    Kahan term;
    for (std::size_t g = 0; g < fg.total; ++g) {
      double w = grid_weight(fg, g);
      std::size_t base = g - fg.digit(g, k) * fg.strides[k];
      double cond2 = 0.0, condp = 0.0;
      for (std::size_t j = 0; j < fk.size(); ++j) {
        double vj = fv[base + j * fg.strides[k]];
        cond2 += fk[j].weight * vj * vj;
        condp += fk[j].weight * std::pow(vj, p);
      }
      term.add(w * (cond2 - std::pow(condp, q)));
    }
    rhs.add(term.sum());
  }
  return {lhs, rhs.sum()};
}

double cn_alternating_sum(
    const std::function<double(std::span<const double>)>& f, const Measure& pm,
    const VectorFn& Z, int value_dim) {
  FactorGrid fg = make_factor_grid(pm);
  const std::size_t n = fg.factors.size();
  if (n > 12) throw SizeError("cn_alternating_sum: more than 12 factors");
  const std::size_t d = static_cast<std::size_t>(value_dim);

  std::vector<double> zv(fg.total * d);
  std::vector<double> pt;
  for (std::size_t g = 0; g < fg.total; ++g) {
    grid_point(fg, g, pt);
    std::vector<double> val = Z(std::span<const double>(pt));
    if (val.size() != d)
      throw DomainError("cn_alternating_sum: Z dimension mismatch");
    std::copy(val.begin(), val.end(), zv.begin() + g * d);
  }

  Kahan total;
  std::vector<double> buckets;
  std::vector<double> bucket_w;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    // Complement index layout: strides over factors not in the mask.
    std::size_t csize = 1;
    std::vector<std::size_t> cstride(n, 0);
    for (std::size_t k = n; k-- > 0;) {
      if (mask & (1u << k)) continue;
      cstride[k] = csize;
      csize *= fg.sizes[k];
    }
    buckets.assign(csize * d, 0.0);
    bucket_w.assign(csize, 0.0);
    for (std::size_t g = 0; g < fg.total; ++g) {
      double wk = 1.0, wc = 1.0;
      std::size_t cidx = 0;
      for (std::size_t k = 0; k < n; ++k) {
        std::size_t dig = fg.digit(g, k);
        double w = fg.factors[k][dig].weight;
        if (mask & (1u << k)) {
          wk *= w;
        } else {
          wc *= w;
          cidx += dig * cstride[k];
        }
      }
      for (std::size_t j = 0; j < d; ++j)
        buckets[cidx * d + j] += wk * wc * zv[g * d + j];
      bucket_w[cidx] += wk * wc;
    }
    // buckets now hold w_c * E_K Z per complement cell; divide the weight out.
    Kahan term;
    for (std::size_t cidx = 0; cidx < csize; ++cidx) {
      double w = bucket_w[cidx];
      std::vector<double> mean(d);
      for (std::size_t j = 0; j < d; ++j) mean[j] = buckets[cidx * d + j] / w;
      term.add(w * f(std::span<const double>(mean)));
    }
    int sign = (std::popcount(mask) % 2 == 0) ? 1 : -1;
    total.add(sign * term.sum());
  }
  return total.sum();
}

double rho_s(double x, double y, double s) {
  if (!(s > 1.0 && s <= 2.0)) throw DomainError("rho_s: s must lie in (1,2]");
  if (!(x >= 0.0 && y >= 0.0))
    throw DomainError("rho_s: arguments must be nonnegative");
  if (x == y) return 0.0;
  double m = 0.5 * (x + y);
  double u = (x - y) / (x + y);
  double inner;
  if (std::abs(u) <= 0.5) {
    // sum over even k >= 2 of C(s,k) u^k; every coefficient is >= 0 for
    // s in (1,2], so there is no cancellation near x = y.
    double coef = 0.5 * s * (s - 1.0);
    double u2 = u * u;
    double upow = u2;
    double sum = coef * upow;
    for (int k = 2; k <= 300; k += 2) {
      coef *= (s - k) * (s - k - 1.0) / ((k + 1.0) * (k + 2.0));
      upow *= u2;
      double t = coef * upow;
      sum += t;
      if (t < 1e-18 * sum) break;
    }
    inner = std::pow(m, s) * sum;
  } else {
    inner = 0.5 * (std::pow(x, s) + std::pow(y, s)) - std::pow(m, s);
  }
  return inner > 0.0 ? std::sqrt(inner) : 0.0;
}

namespace {
double ft_power(double s, double t, double x, double y) {
  return t * std::pow(x, s) + (1.0 - t) * std::pow(y, s) -
         std::pow(t * x + (1.0 - t) * y, s);
}
}  // namespace

double lemma8_margin(double s, double t, double c, double d, double x,
                     Lemma8Regime regime) {
  if (!(s >= 1.0 && s <= 2.0)) throw RegimeError("lemma8: s must lie in [1,2]");
  if (!(t >= 0.0 && t <= 1.0)) throw RegimeError("lemma8: t must lie in [0,1]");
  if (!(c >= 0.0 && d >= 0.0 && x >= 0.0))
    throw RegimeError("lemma8: c,d,x must be nonnegative");
  double K = 0.0;
  switch (regime) {
    case Lemma8Regime::outside_interval:
      if (x > std::min(c, d) && x < std::max(c, d))
        throw RegimeError("lemma8: x must lie outside the open interval (c,d)");
      K = 1.0;
      break;
    case Lemma8Regime::half_t:
      if (std::abs(t - 0.5) > 1e-12) throw RegimeError("lemma8: regime needs t=1/2");
      K = 2.0;
      break;
    case Lemma8Regime::small_t_ordered:
      if (!(t <= 0.5 + 1e-12) || !(c >= d - 1e-12))
        throw RegimeError("lemma8: regime needs t<=1/2 and c>=d");
      K = 12.0;
      break;
  }
  return K * (ft_power(s, t, d, x) + ft_power(s, t, x, c)) - ft_power(s, t, d, c);
}

namespace {
// lambda density on the right half line.
double half_exp_density(double x) { return 0.5 * std::exp(-x); }
}  // namespace

double lemma9_margin(double x1, double x2, double y1, double y2, double a,
                     const TestFunction& g, const QuadratureSpec& q) {
  if (!(0.0 <= x1 && x1 < x2)) throw DomainError("lemma9: need 0 <= x1 < x2");
  if (!(a >= 0.0 && a <= 1.0)) throw DomainError("lemma9: a must lie in [0,1]");
  double scale = std::max({1.0, std::abs(y1), std::abs(y2)});
  if (std::abs(g.at(x1) - y1) > 1e-8 * scale ||
      std::abs(g.at(x2) - y2) > 1e-8 * scale)
    throw DomainError("lemma9: g does not take the stated boundary values");
  auto integrand = [&](double x) {
    double gp = g.grad1(x);
    return std::max(1.0, std::pow(x, a)) * gp * gp * half_exp_density(x);
  };
  double energy = integrate_adaptive(integrand, x1, x2, q).value;
  double bound = (y2 - y1) * (y2 - y1) / (4.0 * (std::exp(x2) - std::exp(x1))) *
                 std::max(1.0, std::pow(x2, a));
  return energy - bound;
}

Lemma10Result lemma10_check(double x1, double x2, double y1, double y2,
                            double p, const QuadratureSpec& q) {
  if (!(0.0 <= y1 && y1 < y2)) throw DomainError("lemma10: need 0 <= y1 < y2");
  if (!(0.0 <= x1 && x1 < x2)) throw DomainError("lemma10: need 0 <= x1 < x2");
  if (!(p >= 1.0)) throw DomainError("lemma10: need p >= 1");

  const double span = std::exp(x2) - std::exp(x1);
  const double k = (y2 - y1) / span;
  auto g = [&](double x) {
    if (x <= x1) return y1;
    return y1 + (std::exp(x) - std::exp(x1)) * k;
  };

  Lemma10Result res;
  res.closed_energy = (y2 - y1) * (y2 - y1) / (2.0 * span);
  auto energy_integrand = [&](double x) {
    double gp = k * std::exp(x);
    return gp * gp * half_exp_density(x);
  };
  res.quad_energy = integrate_adaptive(energy_integrand, x1, x2, q).value;
  res.energy_gap = std::abs(res.quad_energy - res.closed_energy);

  const double mass_below_x1 = 1.0 - 0.5 * std::exp(-x1);
  const double mass_below_x2 = 1.0 - 0.5 * std::exp(-x2);
  auto moment_integrand = [&](double x) {
    return std::pow(g(x), p) * half_exp_density(x);
  };
  res.moment_lhs = std::pow(y1, p) * mass_below_x1 +
                   integrate_adaptive(moment_integrand, x1, x2, q).value;
  const double qq = 0.5 * x2 * std::exp(-x2);
  res.moment_rhs =
      mass_below_x2 * ((1.0 - qq) * std::pow(y1, p) + qq * std::pow(y2, p));
  res.est3_margin = res.moment_rhs - res.moment_lhs;
  return res;
}

double lemma11_u(double s) {
  if (!(s > 1.0 && s <= 2.0)) throw DomainError("lemma11: s must lie in (1,2]");
  return s / (4.0 * (s - 1.0)) * std::exp(-s / (2.0 * (s - 1.0)));
}

double lemma11_margin(double s, double t, double a, double b, double c,
                      double d, double ta, double tc, double x) {
  if (!(s > 1.0 && s <= 2.0)) throw RegimeError("lemma11: s must lie in (1,2]");
  if (!(t > 0.0 && t < 1.0)) throw RegimeError("lemma11: t must lie in (0,1)");
  for (double v : {a, b, c, d, ta, tc, x})
    if (!(v > 0.0)) throw RegimeError("lemma11: all quantities must be positive");
  if (!(c < x && x < d)) throw RegimeError("lemma11: need c < x < d");
  auto leq = [](double lhs, double rhs) {
    return lhs <= rhs * (1.0 + 1e-10) + 1e-12;
  };
  if (!leq(std::pow(c, s), a)) throw RegimeError("lemma11: need c^s <= a");
  if (!leq(std::pow(d, s), b)) throw RegimeError("lemma11: need d^s <= b");
  if (!leq(std::pow(tc, s), ta)) throw RegimeError("lemma11: need tc^s <= ta");
  const double u = lemma11_u(s);
  if (!leq(tc, (1.0 - u) * c + u * x))
    throw RegimeError("lemma11: need tc <= (1-u)c + u x");

  double lhs = (1.0 - t) * a + t * b - std::pow((1.0 - t) * c + t * d, s);
  double bracket = (1.0 - t) * ta + t * b - std::pow((1.0 - t) * tc + t * d, s) +
                   (1.0 - t) * a + t * std::pow(x, s) -
                   std::pow((1.0 - t) * c + t * x, s);
  return 8.0 * bracket - lhs;
}

}  // namespace ineq

#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "ineq/measures.hpp"
#include "ineq/test_function.hpp"

namespace testutil {

/// Fixed-grid Simpson rule; independent of the library's Gauss-Legendre path.
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; i += 2) s += 4.0 * f(a + i * h);
  for (int i = 2; i < n; i += 2) s += 2.0 * f(a + i * h);
  return s * h / 3.0;
}

/// Kolmogorov-Smirnov distance of scalar samples against a CDF callback.
inline double ks_distance(std::vector<double> xs,
                          const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double f = cdf(xs[i]);
    d = std::max(d, std::max(f - i / n, (i + 1) / n - f));
  }
  return d;
}

/// Random discrete law with k atoms at distinct 1-D points.
inline ineq::Measure random_discrete(std::mt19937_64& eng, int min_atoms = 2,
                                     int max_atoms = 8) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int k = min_atoms +
          static_cast<int>(eng() % static_cast<std::uint64_t>(
                                       max_atoms - min_atoms + 1));
  std::vector<ineq::Atom> atoms(k);
  for (int i = 0; i < k; ++i)
    atoms[i].point = {-3.0 + 6.0 * (i + 0.05 + 0.9 * u01(eng)) / k};
  double total = 0.0;
  for (auto& a : atoms) total += (a.weight = 0.05 + u01(eng));
  for (auto& a : atoms) a.weight /= total;
  return ineq::Measure(ineq::DiscreteMeasure(std::move(atoms)));
}

/// Function defined by per-atom values (exact match on the atom grid).
inline ineq::TestFunction values_fn(const ineq::Measure& m,
                                    std::vector<double> values) {
  std::vector<ineq::Atom> atoms = ineq::enumerate_atoms(m);
  ineq::TestFunction f;
  f.arity = m.dim();
  f.label = "tabulated";
  f.eval = [atoms, values](std::span<const double> x) {
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (std::equal(x.begin(), x.end(), atoms[i].point.begin(),
                     atoms[i].point.end()))
        return values[i];
    throw std::runtime_error("off-grid query");
  };
  return f;
}

inline std::vector<double> random_positive_values(std::mt19937_64& eng,
                                                  std::size_t n, double lo,
                                                  double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  std::vector<double> v(n);
  for (auto& x : v) x = std::exp(u(eng));
  return v;
}

inline bool nondecreasing(const std::vector<double>& v, double slack) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] < v[i - 1] - slack) return false;
  return true;
}

}  // namespace testutil

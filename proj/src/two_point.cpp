#include "ineq/two_point.hpp"

#include <cmath>

#include "ineq/errors.hpp"

namespace ineq {

namespace {

constexpr double kPi = 3.14159265358979323846;

double witness_ratio(double alpha, double p, double f_minus, double f_plus) {
  double diff = f_plus - f_minus;
  if (std::abs(diff) < 1e-13) return -1.0;  // excluded from the scan
  double ef2 = alpha * f_plus * f_plus + (1.0 - alpha) * f_minus * f_minus;
  double efp = alpha * std::pow(f_plus, p) + (1.0 - alpha) * std::pow(f_minus, p);
  return (ef2 - std::pow(efp, 2.0 / p)) / (diff * diff);
}

}  // namespace

double optimal_constant_closed_form(double alpha, double p) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("two-point constant: alpha must lie in (0,1)");
  if (!(p >= 1.0 && p < 2.0))
    throw DomainError("two-point constant: p must lie in [1,2)");
  if (std::abs(alpha - 0.5) < 1e-13) return (2.0 - p) / 4.0;
  double beta = 1.0 - alpha;
  double num = std::pow(alpha, 1.0 - 2.0 / p) - std::pow(beta, 1.0 - 2.0 / p);
  double den = std::pow(alpha, -2.0 / p) - std::pow(beta, -2.0 / p);
  return num / den;
}

TwoPointOptimum optimal_constant_bruteforce(double alpha, double p,
                                            int resolution) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("two-point brute force: alpha must lie in (0,1)");
  if (!(p >= 1.0 && p < 2.0))
    throw DomainError("two-point brute force: p must lie in [1,2)");
  if (resolution < 1000)
    throw DomainError("two-point brute force: resolution must be >= 1000");

  auto ratio_at = [&](double theta) {
    return witness_ratio(alpha, p, std::cos(theta), std::sin(theta));
  };

  // Scan the open arc; endpoints degenerate the difference quotient.
  double best = -1.0, best_theta = 0.0;
  for (int k = 0; k < resolution; ++k) {
    double theta = kPi / 2.0 * (k + 0.5) / resolution;
    double v = ratio_at(theta);
    if (v > best) {
      best = v;
      best_theta = theta;
    }
  }
  if (!(best > 0.0))
    throw DegenerateInstance("two-point brute force: all scanned ratios vanish");

  // Golden-section refinement around the best grid point.
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double step = kPi / 2.0 / resolution;
  double lo = std::max(1e-9, best_theta - 2.0 * step);
  double hi = std::min(kPi / 2.0 - 1e-9, best_theta + 2.0 * step);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = ratio_at(x1), f2 = ratio_at(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = ratio_at(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = ratio_at(x1);
    }
  }
  double theta = 0.5 * (lo + hi);
  double value = ratio_at(theta);
  if (value < best) {
    theta = best_theta;
    value = best;
  }
  return {value, std::cos(theta), std::sin(theta), theta};
}

}  // namespace ineq

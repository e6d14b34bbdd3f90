#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ineq/measures.hpp"
#include "ineq/test_function.hpp"

namespace ineq {

/// One witnessed evaluation of the interpolation inequality at (p, a).
struct InequalityReport {
  double p = 1.0;
  double a = 1.0;
  double var_p = 0.0;
  double energy = 0.0;
  double ratio = 0.0;  // var_p / ((2-p)^a * energy); the constant witnessed here
  std::string measure_key;
  std::string function_label;
};

using WeightFn = std::function<double(double)>;

/// E f^2 - (E f^p)^{2/p} for f >= 0; zero at p = 2.
double p_variance(const Measure& m, const TestFunction& f, double p,
                  const QuadratureSpec& q = {});

/// E[f^2 ln f^2] - E f^2 ln E f^2, with 0*ln 0 = 0.
double entropy(const Measure& m, const TestFunction& f,
               const QuadratureSpec& q = {});

/// phi(p) = Var(p) / (1/p - 1/2) on an increasing grid within [1,2).
std::vector<std::pair<double, double>> phi_curve(const Measure& m,
                                                 const TestFunction& f,
                                                 std::span<const double> p_grid,
                                                 const QuadratureSpec& q = {});

/// E[weight * |grad f|^2]; weight defaults to 1. Two-point discrete measures
/// use the difference-quotient energy ((f(x+)-f(x-))/2)^2.
double dirichlet_energy(const Measure& m, const TestFunction& f,
                        const WeightFn& weight = {},
                        const QuadratureSpec& q = {});

InequalityReport ia_ratio(const Measure& m, const TestFunction& f, double p,
                          double a, const WeightFn& weight = {},
                          const QuadratureSpec& q = {});

}  // namespace ineq

#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ineq/measures.hpp"
#include "ineq/quadrature.hpp"
#include "ineq/test_function.hpp"

namespace ineq {

/// Candidate for the convexity cone: affine, or phi'' > 0 with 1/phi'' concave.
struct PhiCandidate {
  std::function<double(double)> eval;
  std::function<double(double)> second_derivative;  // empty -> central differences
  std::string label;
};

/// phi''(x), analytic when supplied, otherwise central differences with
/// step h = x*1e-5 + 1e-8.
double phi_second(const PhiCandidate& c, double x);

struct PhiDiagnostics {
  bool member = false;
  bool affine = false;
  double worst_margin = 0.0;            // most negative concavity margin seen
  std::array<double, 3> worst_triple{};  // (x, midpoint, y) of the worst test
  std::string reason;
};

/// Grid-relative membership test: affine (midpoint-linear values), or
/// (phi'' > tol on the grid and 1/phi'' midpoint-concave over all grid pairs,
/// plus a second-difference sweep). Central-difference candidates get a
/// tolerance floor of 1e-4, the noise level of the difference quotient at the
/// prescribed step.
PhiDiagnostics is_in_phi(const PhiCandidate& c, std::span<const double> grid,
                         double tol = 1e-9);

/// F_t(x,y) = t*phi(x) + (1-t)*phi(y) - phi(t*x + (1-t)*y).
double ft_deficit(const PhiCandidate& c, double t, double x, double y);

/// Psi(Z) = E phi(Z) - phi(E Z); returns the convexity deficit
/// t*Psi(X) + (1-t)*Psi(Y) - Psi(tX+(1-t)Y), which equals
/// E F_t(X,Y) - F_t(EX,EY) and is >= 0 for members by Jensen.
double psi_convexity_margin(const PhiCandidate& c, const Measure& m,
                            const TestFunction& X, const TestFunction& Y,
                            double t);

/// Both sides of E phi(Z) - phi(EZ) <= sum_k E[E_k phi(Z) - phi(E_k Z)] on an
/// all-discrete product; conditional expectations by exact enumeration.
std::pair<double, double> subadditivity_margin(const Measure& pm,
                                               const TestFunction& Z,
                                               const PhiCandidate& c);

/// Same with Z = f^p and phi = x^{2/p}: lhs is the p-variance of f.
std::pair<double, double> var_p_subadditivity(const Measure& pm,
                                              const TestFunction& f, double p);

using VectorFn = std::function<std::vector<double>(std::span<const double>)>;

/// sum over subsets K of {1..n} of (-1)^|K| E_{K^c} f(E_K Z), by exact
/// enumeration; n = factor count (<= 12).
double cn_alternating_sum(
    const std::function<double(std::span<const double>)>& f, const Measure& pm,
    const VectorFn& Z, int value_dim);

/// ((x^s+y^s)/2 - ((x+y)/2)^s)^{1/2}; a metric for s in (1,2].
double rho_s(double x, double y, double s);

enum class Lemma8Regime {
  outside_interval,  // x outside (min(c,d), max(c,d)), K = 1
  half_t,            // t = 1/2, K = 2
  small_t_ordered,   // t <= 1/2 and c >= d, K = 12
};

/// K*[F_t(d,x) + F_t(x,c)] - F_t(d,c) with F_t(x,y) = t x^s + (1-t) y^s
/// - (tx+(1-t)y)^s; nonnegative under the regime's side conditions.
double lemma8_margin(double s, double t, double c, double d, double x,
                     Lemma8Regime regime);

/// Weighted-energy lower bound on [x1,x2] of the exponential line:
/// returns  integral max(1,x^a) g'(x)^2 dlambda  -  (y2-y1)^2 / (4(e^{x2}-e^{x1}))
/// * max(1, x2^a).
double lemma9_margin(double x1, double x2, double y1, double y2, double a,
                     const TestFunction& g, const QuadratureSpec& q = {});

struct Lemma10Result {
  double closed_energy = 0.0;
  double quad_energy = 0.0;
  double energy_gap = 0.0;   // |quad - closed|
  double moment_lhs = 0.0;   // integral of g^p over (-inf, x2]
  double moment_rhs = 0.0;   // lambda(-inf,x2] * [(1-q)y1^p + q y2^p]
  double est3_margin = 0.0;  // rhs - lhs
};

/// Explicit extremal g (constant, then linear in e^x): exact energy identity
/// and the p-th moment upper bound.
Lemma10Result lemma10_check(double x1, double x2, double y1, double y2,
                            double p, const QuadratureSpec& q = {});

/// 8*[(1-t)ta + t b - ((1-t)tc + t d)^s + (1-t)a + t x^s - ((1-t)c + t x)^s]
/// - [(1-t)a + t b - ((1-t)c + t d)^s], under the coupling constraints with
/// u = s/(4(s-1)) * e^{-s/(2(s-1))}.
double lemma11_margin(double s, double t, double a, double b, double c,
                      double d, double ta, double tc, double x);

double lemma11_u(double s);

}  // namespace ineq

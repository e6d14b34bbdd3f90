#pragma once

#include <utility>
#include <vector>

#include "ineq/functionals.hpp"
#include "ineq/measures.hpp"
#include "ineq/suites.hpp"
#include "ineq/test_function.hpp"

namespace ineq {

/// The increasing map equating upper tails of the exp-power law (shape r)
/// and the symmetric exponential. Tabulated on a tanh-spaced grid, completed
/// by monotone cubic (Fritsch-Carlson) interpolation, extended oddly.
class TransportMap {
 public:
  static TransportMap build(double r, int nodes = 4096, double radius = 40.0);

  double r() const { return r_; }
  double a() const { return 2.0 - 2.0 / r_; }
  double normalizer() const { return cr_; }
  double max_x() const { return xs_.back(); }
  double max_z() const { return zs_.back(); }
  const std::vector<double>& grid() const { return xs_; }
  const std::vector<double>& values() const { return zs_; }

  double operator()(double x) const;  // z(x)
  /// z'(x) = 2 c_r e^{|z(x)| - |x|^r}.
  double derivative(double x) const;
  double inverse(double y) const;  // z^{-1}(y)

 private:
  double eval_pos(double x) const;
  double inverse_pos(double y) const;
  std::vector<double> xs_, zs_, ds_;
  double r_ = 1.0, cr_ = 0.5;
};

/// Two-sided check of (z'(z^{-1}(x)))^2 against [max(1,|x|^a)/50, 600 max(1,|x|^a)].
LemmaVerdict jacobian_bound_check(const TransportMap& tm,
                                  std::span<const double> xs);

struct PushforwardResult {
  double ks = 0.0;
  double threshold = 0.0;
  long long samples = 0;
  bool pass = false;
};

/// Samples the exp-power law, applies the map, and measures the
/// Kolmogorov-Smirnov distance to the symmetric exponential CDF.
PushforwardResult pushforward_check(const TransportMap& tm, long long n, Seed s);

enum class TransferDirection {
  given_lambda_side,  // g on the exponential line is given, f = g o z
  given_mu_side,      // f on the exp-power line is given, g = f o z^{-1}
};

/// Witnessed ratios on both sides of the energy-transfer equivalence:
/// first = exp-power side (unweighted energy), second = exponential side
/// (weight max(1,|x|^a)).
std::pair<InequalityReport, InequalityReport> equivalence_transfer(
    const TransportMap& tm, const TestFunction& given, double p,
    TransferDirection direction, const QuadratureSpec& q = {});

}  // namespace ineq

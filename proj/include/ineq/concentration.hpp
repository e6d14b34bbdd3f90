#pragma once

#include <span>
#include <vector>

#include "ineq/measures.hpp"
#include "ineq/test_function.hpp"

namespace ineq {

/// Certified interpolation-inequality data feeding the tail machinery.
struct HerbstParams {
  double C = 1.0;
  double a = 1.0;
  double r() const { return 2.0 / (2.0 - a); }
};

/// (1 - (C lambda^2 / 4)(2-p)^a)^{-2/(2-p)}; valid while the base is positive.
double herbst_mgf_bound(const HerbstParams& hp, double p, double lambda);

/// Exact finite product from iterating the one-step bound to `depth`.
double herbst_iterated_product(const HerbstParams& hp, double p, double lambda,
                               int depth);

/// Finite product after the telescoping step: (1-x)^{-sum_{k<depth}(p/2)^k}.
double herbst_iterated_telescoped(const HerbstParams& hp, double p,
                                  double lambda, int depth);

enum class TailMode { paper_choice, optimized };

/// Chernoff bound inf_lambda e^{-lambda t sqrt(C)} * mgf_bound. paper_choice
/// reproduces the explicit selections (p=1, lambda=t/sqrt(C) for t<=1;
/// p=2-t^{-2/(2-a)}, lambda=t^{a/(2-a)}/sqrt(C) for t>=1); optimized runs a
/// nested golden-section over admissible (p, lambda) and never exceeds it.
double tail_bound(const HerbstParams& hp, double t,
                  TailMode mode = TailMode::paper_choice);

struct MgfMargin {
  double p = 0.0;
  double lambda = 0.0;
  double value = 0.0;   // quadrature E e^{lambda(h - Eh)}
  double bound = 0.0;
  double margin = 0.0;  // bound - value
};

/// Compares the empirical MGF with the bound over a (p, lambda) grid.
/// h must be 1-Lipschitz (validated on 256 random probe pairs).
std::vector<MgfMargin> mgf_verify(const Measure& m, const TestFunction& h,
                                  const HerbstParams& hp,
                                  std::span<const double> lambdas,
                                  std::span<const double> ps,
                                  const QuadratureSpec& q = {});
std::vector<MgfMargin> mgf_verify(const Measure& m, const TestFunction& h,
                                  const HerbstParams& hp,
                                  std::span<const double> lambdas,
                                  const QuadratureSpec& q = {});

struct TailCurve {
  double r = 1.0;
  int dim = 1;
  double C_assumed = 1.0;
  long long samples = 0;
  double center_bias = 0.0;  // sqrt(Var(h)/samples); widens the CP threshold
  std::vector<double> ts;
  std::vector<double> bounds;     // e^{-t^{2/(2-a)}/3}, a = 2-2/r
  std::vector<long long> counts;  // exceedances of h - mean >= t sqrt(C)
  std::vector<double> empirical;
  std::vector<double> cp_upper;   // 95% upper bound at the widened threshold
};

/// Monte Carlo exceedance curve for h over the n-fold exp-power product.
/// Sampling runs in 8 fixed batches with derived sub-seeds, so results do not
/// depend on scheduling.
TailCurve mc_tail_experiment(double r, int n, const TestFunction& h,
                             std::span<const double> ts, long long samples,
                             Seed s, double C_assumed = 1.0);

struct SlopeFit {
  double slope = 0.0;
  double stderr_slope = 0.0;
  double intercept = 0.0;
  int points_used = 0;
};

/// Least-squares slope of ln(-ln empirical) against ln t over nonzero-count
/// points. Requires >= 5 usable points with t in [1.5, 3.5].
SlopeFit sharpness_fit(const TailCurve& curve);

/// One-sided upper confidence bound for a binomial proportion.
double clopper_pearson_upper(long long k, long long n, double level = 0.95);

}  // namespace ineq

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace ineq {

struct QuadratureSpec {
  double truncation_radius = 40.0;
  int panel_count = 16;  // initial uniform panels before refinement
  double abs_tol = 1e-10;
  double rel_tol = 1e-9;
  int panel_budget = 1 << 14;
};

struct IntegralEstimate {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
};

/// Gauss–Legendre rule on [-1,1]; nodes/weights computed once per order and cached.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

/// Fixed n-point Gauss–Legendre estimate of ∫_a^b f.
double gl_fixed(const std::function<double(double)>& f, double a, double b,
                int order);

/// Adaptive Gauss–Legendre panels (15-point value, |G15-G7| panel error).
/// Throws NonConvergent when the panel budget is exhausted.
IntegralEstimate integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b,
                                    const QuadratureSpec& spec = {});

/// n nodes on [0, radius], clustered near radius: x_i = radius*tanh(k*u)/tanh(k).
std::vector<double> tanh_grid(int n, double radius, double sharpness = 3.0);

inline double logsumexp2(double la, double lb) {
  if (la < lb) std::swap(la, lb);
  return la + std::log1p(std::exp(lb - la));
}

}  // namespace ineq

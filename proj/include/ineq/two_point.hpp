#pragma once

namespace ineq {

/// Best constant in Var(p) <= C * (f(+1)-f(-1))^2 on the two-point space with
/// mass alpha at +1. The alpha = 1/2 singularity is removable; its limit
/// (2-p)/4 is returned there.
double optimal_constant_closed_form(double alpha, double p);

struct TwoPointOptimum {
  double constant = 0.0;
  double f_minus = 0.0;  // maximizer value at -1
  double f_plus = 0.0;   // maximizer value at +1
  double theta = 0.0;    // angle on the normalization circle
};

/// Maximizes [E f^2 - (E f^p)^{2/p}] / (f(+1)-f(-1))^2 over the unit circle
/// arc f(-1)=cos(theta), f(+1)=sin(theta); grid scan then golden-section.
TwoPointOptimum optimal_constant_bruteforce(double alpha, double p,
                                            int resolution = 4096);

}  // namespace ineq

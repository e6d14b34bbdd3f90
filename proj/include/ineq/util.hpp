#pragma once

#include <vector>

namespace ineq {

/// Compensated accumulator.
struct Kahan {
  double s = 0.0, c = 0.0;
  void add(double v) {
    double y = v - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  double sum() const { return s; }
};

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = a;
    return v;
  }
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

}  // namespace ineq

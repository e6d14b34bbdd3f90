#include "ineq/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>

#include "ineq/errors.hpp"

namespace ineq {

namespace {

GaussRule compute_rule(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton from the Chebyshev-like initial guess.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

struct Panel {
  double a, b, value, error;
};

struct ByError {
  bool operator()(const Panel& x, const Panel& y) const {
    return x.error < y.error;
  }
};

}  // namespace

const GaussRule& gauss_legendre(int order) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
  return it->second;
}

double gl_fixed(const std::function<double(double)>& f, double a, double b,
                int order) {
  const GaussRule& r = gauss_legendre(order);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < order; ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
  return s * half;
}

IntegralEstimate integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b,
                                    const QuadratureSpec& spec) {
  if (!(a <= b)) std::swap(a, b);
  if (a == b) return {0.0, 0.0, 0};

  auto eval_panel = [&](double lo, double hi) {
    Panel p{lo, hi, 0.0, 0.0};
    p.value = gl_fixed(f, lo, hi, 15);
    double coarse = gl_fixed(f, lo, hi, 7);
    p.error = std::abs(p.value - coarse);
    return p;
  };

  std::priority_queue<Panel, std::vector<Panel>, ByError> open;
  int panels = std::max(1, spec.panel_count);
  double frozen_value = 0.0, frozen_error = 0.0;
  double open_value = 0.0, open_error = 0.0;
  const double min_width = 1e-14 * (1.0 + std::abs(a) + std::abs(b));

  for (int i = 0; i < panels; ++i) {
    double lo = a + (b - a) * i / panels;
    double hi = a + (b - a) * (i + 1) / panels;
    Panel p = eval_panel(lo, hi);
    open_value += p.value;
    open_error += p.error;
    open.push(p);
  }

  while (true) {
    double total_value = frozen_value + open_value;
    double total_error = frozen_error + open_error;
    double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(total_value));
    if (total_error <= tol || open.empty())
      return {total_value, total_error, panels};
    if (panels >= spec.panel_budget)
      throw NonConvergent("integrate: panel budget exhausted (error " +
                          std::to_string(total_error) + " > tol " +
                          std::to_string(tol) + ")");
    Panel worst = open.top();
    open.pop();
    open_value -= worst.value;
    open_error -= worst.error;
    if (worst.b - worst.a < min_width) {
      // Cannot refine further; park it and keep its error in the frozen pile.
      frozen_value += worst.value;
      frozen_error += worst.error;
      continue;
    }
    double mid = 0.5 * (worst.a + worst.b);
    Panel left = eval_panel(worst.a, mid);
    Panel right = eval_panel(mid, worst.b);
    open_value += left.value + right.value;
    open_error += left.error + right.error;
    open.push(left);
    open.push(right);
    ++panels;
  }
}

std::vector<double> tanh_grid(int n, double radius, double sharpness) {
  std::vector<double> xs(n);
  const double denom = std::tanh(sharpness);
  for (int i = 0; i < n; ++i) {
    double u = static_cast<double>(i) / (n - 1);
    xs[i] = radius * std::tanh(sharpness * u) / denom;
  }
  xs[0] = 0.0;
  xs[n - 1] = radius;
  return xs;
}

}  // namespace ineq

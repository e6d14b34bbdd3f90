#include "ineq/transport.hpp"

#include <algorithm>
#include <cmath>

#include "ineq/errors.hpp"
#include "ineq/quadrature.hpp"

namespace ineq {

namespace {

// Clamp analytic nodal slopes into the Fritsch-Carlson monotonicity box so
// the Hermite pieces can never overshoot, whatever the grid does.
void clamp_monotone(const std::vector<double>& x, const std::vector<double>& y,
                    std::vector<double>& d) {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    double cap = std::numeric_limits<double>::infinity();
    if (i > 0) cap = std::min(cap, 3.0 * (y[i] - y[i - 1]) / (x[i] - x[i - 1]));
    if (i + 1 < n)
      cap = std::min(cap, 3.0 * (y[i + 1] - y[i]) / (x[i + 1] - x[i]));
    d[i] = std::clamp(d[i], 0.0, cap);
  }
}

double hermite(double x, double x0, double h, double y0, double y1, double d0,
               double d1) {
  double t = (x - x0) / h;
  double t2 = t * t, t3 = t2 * t;
  return y0 * (2.0 * t3 - 3.0 * t2 + 1.0) + h * d0 * (t3 - 2.0 * t2 + t) +
         y1 * (-2.0 * t3 + 3.0 * t2) + h * d1 * (t3 - t2);
}

double sym_exp_cdf(double x) {
  return x >= 0.0 ? 1.0 - 0.5 * std::exp(-x) : 0.5 * std::exp(x);
}

}  // namespace

TransportMap TransportMap::build(double r, int nodes, double radius) {
  if (!(r >= 1.0 && r <= 2.0))
    throw DomainError("transport map: r must lie in [1,2]");
  TransportMap tm;
  tm.r_ = r;
  tm.cr_ = exp_power_normalizer(r);
  tm.xs_ = tanh_grid(nodes, radius);
  tm.zs_.resize(nodes);

  Measure mu = make_exp_power(r);
  const auto& log_tail = mu.continuous().log_upper_tail;
  tm.zs_[0] = 0.0;
  const double log2 = std::log(2.0);
  for (int i = 1; i < nodes; ++i) {
    // Node value solves the tail equation; the exponential tail inverts in
    // closed form: z = -ln(2 * tail_r(x)).
    tm.zs_[i] = -(log2 + log_tail(tm.xs_[i]));
    if (!(tm.zs_[i] > tm.zs_[i - 1]))
      throw NonConvergent("transport map: tabulated values not increasing at node " +
                          std::to_string(i));
  }
  // Nodal slopes come from the derivative identity itself, so the Hermite
  // pieces agree with it to interpolation accuracy.
  tm.ds_.resize(nodes);
  for (int i = 0; i < nodes; ++i)
    tm.ds_[i] =
        2.0 * tm.cr_ * std::exp(tm.zs_[i] - std::pow(tm.xs_[i], r));
  clamp_monotone(tm.xs_, tm.zs_, tm.ds_);
  return tm;
}

double TransportMap::eval_pos(double x) const {
  if (x > xs_.back() * (1.0 + 1e-12))
    throw DomainError("transport map: argument outside the grid hull");
  x = std::min(x, xs_.back());
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  std::size_t i = std::clamp<std::size_t>(it - xs_.begin(), 1, xs_.size() - 1) - 1;
  return hermite(x, xs_[i], xs_[i + 1] - xs_[i], zs_[i], zs_[i + 1], ds_[i],
                 ds_[i + 1]);
}

double TransportMap::operator()(double x) const {
  return x >= 0.0 ? eval_pos(x) : -eval_pos(-x);
}

double TransportMap::derivative(double x) const {
  double z = (*this)(x);
  return 2.0 * cr_ * std::exp(std::abs(z) - std::pow(std::abs(x), r_));
}

double TransportMap::inverse_pos(double y) const {
  if (y > zs_.back() * (1.0 + 1e-12))
    throw DomainError("transport map: value outside the image of the grid");
  y = std::min(y, zs_.back());
  auto it = std::upper_bound(zs_.begin(), zs_.end(), y);
  std::size_t i = std::clamp<std::size_t>(it - zs_.begin(), 1, zs_.size() - 1) - 1;
  double lo = xs_[i], hi = xs_[i + 1];
  for (int k = 0; k < 100; ++k) {
    double mid = 0.5 * (lo + hi);
    if (eval_pos(mid) > y)
      hi = mid;
    else
      lo = mid;
    if (hi - lo <= 1e-14 * (1.0 + hi)) break;
  }
  return 0.5 * (lo + hi);
}

double TransportMap::inverse(double y) const {
  return y >= 0.0 ? inverse_pos(y) : -inverse_pos(-y);
}

LemmaVerdict jacobian_bound_check(const TransportMap& tm,
                                  std::span<const double> xs) {
  LemmaVerdict v;
  v.lemma_id = "jacobian-bounds";
  double worst = std::numeric_limits<double>::infinity();
  double seen_lo = std::numeric_limits<double>::infinity(), seen_hi = 0.0;
  for (double x : xs) {
    double w = tm.inverse(x);
    // z(w) = x exactly, so the derivative formula only needs w.
    double jac = 2.0 * tm.normalizer() *
                 std::exp(std::abs(x) - std::pow(std::abs(w), tm.r()));
    double jac2 = jac * jac;
    double env = std::max(1.0, std::pow(std::abs(x), tm.a()));
    double lo = env / 50.0, hi = 600.0 * env;
    double margin = std::min(jac2 - lo, hi - jac2);
    seen_lo = std::min(seen_lo, jac2 / env);
    seen_hi = std::max(seen_hi, jac2 / env);
    ++v.trials;
    if (margin < worst) {
      worst = margin;
      v.params_of_worst = {{"x", x}, {"jac2", jac2}, {"lo", lo}, {"hi", hi}};
    }
    if (margin < 0.0) ++v.violations;
  }
  v.worst_margin = worst;
  v.notes = "observed jac^2/max(1,|x|^a) range [" + std::to_string(seen_lo) +
            ", " + std::to_string(seen_hi) + "]";
  return v;
}

PushforwardResult pushforward_check(const TransportMap& tm, long long n, Seed s) {
  if (n < 10000) throw DomainError("pushforward_check: need n >= 1e4");
  Measure mu = make_exp_power(tm.r());
  Rng rng(s);
  std::vector<double> ys(static_cast<std::size_t>(n));
  double x = 0.0;
  for (auto& y : ys) {
    sample_into(mu, rng, std::span<double>(&x, 1));
    y = tm(x);
  }
  std::sort(ys.begin(), ys.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    double f = sym_exp_cdf(ys[i]);
    ks = std::max(ks, std::max(f - static_cast<double>(i) / n,
                               static_cast<double>(i + 1) / n - f));
  }
  PushforwardResult res;
  res.ks = ks;
  res.samples = n;
  res.threshold = 1.95 / std::sqrt(static_cast<double>(n));
  res.pass = ks < res.threshold;
  return res;
}

std::pair<InequalityReport, InequalityReport> equivalence_transfer(
    const TransportMap& tm, const TestFunction& given, double p,
    TransferDirection direction, const QuadratureSpec& q) {
  if (given.arity != 1)
    throw DomainError("equivalence_transfer: 1-D test functions only");
  const double a = tm.a();

  TestFunction f, g;
  if (direction == TransferDirection::given_lambda_side) {
    g = given;
    f.arity = 1;
    f.label = given.label + " o z";
    f.eval = [&tm, ge = given](std::span<const double> x) {
      return ge.at(tm(x[0]));
    };
    f.gradient = [&tm, ge = given](std::span<const double> x) {
      return std::vector<double>{ge.grad1(tm(x[0])) * tm.derivative(x[0])};
    };
  } else {
    f = given;
    g.arity = 1;
    g.label = given.label + " o z^-1";
    g.eval = [&tm, fe = given](std::span<const double> y) {
      return fe.at(tm.inverse(y[0]));
    };
    g.gradient = [&tm, fe = given](std::span<const double> y) {
      double w = tm.inverse(y[0]);
      return std::vector<double>{fe.grad1(w) / tm.derivative(w)};
    };
  }

  Measure mu = make_exp_power(tm.r());
  Measure lam = make_sym_exp();
  InequalityReport mu_side = ia_ratio(mu, f, p, a, {}, q);
  WeightFn w = [a](double x) { return std::max(1.0, std::pow(std::abs(x), a)); };
  InequalityReport lam_side = ia_ratio(lam, g, p, a, w, q);
  return {mu_side, lam_side};
}

}  // namespace ineq

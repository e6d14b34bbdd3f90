#include "ineq/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

#include <boost/math/special_functions/beta.hpp>

#include "ineq/errors.hpp"
#include "ineq/util.hpp"

namespace ineq {

namespace {

void check_params(const HerbstParams& hp) {
  if (!(hp.C > 0.0)) throw DomainError("herbst: C must be positive");
  if (!(hp.a >= 0.0 && hp.a <= 1.0)) throw DomainError("herbst: a must lie in [0,1]");
}

double shrink_factor(const HerbstParams& hp, double p, double lambda) {
  return hp.C * lambda * lambda / 4.0 * std::pow(2.0 - p, hp.a);
}

// log of e^{-nu t} * (1 - nu^2 (2-p)^a / 4)^{-2/(2-p)} in the scale-free
// variable nu = lambda sqrt(C).
double log_chernoff(double a, double p, double nu, double t) {
  double x = nu * nu / 4.0 * std::pow(2.0 - p, a);
  if (!(x < 1.0)) return std::numeric_limits<double>::infinity();
  return -nu * t - 2.0 / (2.0 - p) * std::log1p(-x);
}

double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  int iters = 120) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters && hi - lo > 1e-14 * (1.0 + std::abs(hi)); ++i) {
    if (f1 > f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = f(x1);
    }
  }
  return 0.5 * (lo + hi);
}

void validate_lipschitz(const Measure& m, const TestFunction& h, Seed s) {
  auto pts = sample(m, 512, derive_seed(s, 0xA11CEull));
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
    double dist2 = 0.0;
    for (std::size_t j = 0; j < pts[i].size(); ++j) {
      double d = pts[i][j] - pts[i + 1][j];
      dist2 += d * d;
    }
    double gap = std::abs(h.eval(std::span<const double>(pts[i])) -
                          h.eval(std::span<const double>(pts[i + 1])));
    if (gap > std::sqrt(dist2) * (1.0 + 1e-9))
      throw LipschitzViolation("h violated the 1-Lipschitz bound on a probe pair");
  }
}

}  // namespace

double herbst_mgf_bound(const HerbstParams& hp, double p, double lambda) {
  check_params(hp);
  if (!(p >= 1.0 && p < 2.0)) throw DomainError("herbst_mgf_bound: p must lie in [1,2)");
  double x = shrink_factor(hp, p, lambda);
  if (!(x < 1.0))
    throw DomainError("herbst_mgf_bound: lambda at or beyond the singularity");
  return std::exp(-2.0 / (2.0 - p) * std::log1p(-x));
}

double herbst_iterated_product(const HerbstParams& hp, double p, double lambda,
                               int depth) {
  check_params(hp);
  if (!(p >= 1.0 && p < 2.0)) throw DomainError("herbst iteration: p must lie in [1,2)");
  double x = shrink_factor(hp, p, lambda);
  if (!(x < 1.0)) throw DomainError("herbst iteration: lambda beyond the singularity");
  double log_acc = 0.0;
  double half_p = p / 2.0;
  double exp_mult = 1.0;   // (2/p)^k
  double shrink_k = 1.0;   // (p/2)^{2k}
  for (int k = 0; k < depth; ++k) {
    log_acc -= exp_mult * std::log1p(-x * shrink_k);
    exp_mult *= 2.0 / p;
    shrink_k *= half_p * half_p;
  }
  return std::exp(log_acc);
}

double herbst_iterated_telescoped(const HerbstParams& hp, double p,
                                  double lambda, int depth) {
  check_params(hp);
  if (!(p >= 1.0 && p < 2.0)) throw DomainError("herbst iteration: p must lie in [1,2)");
  double x = shrink_factor(hp, p, lambda);
  if (!(x < 1.0)) throw DomainError("herbst iteration: lambda beyond the singularity");
  double geom = (1.0 - std::pow(p / 2.0, depth)) / (1.0 - p / 2.0);
  return std::exp(-geom * std::log1p(-x));
}

double tail_bound(const HerbstParams& hp, double t, TailMode mode) {
  check_params(hp);
  if (t < 0.0) throw DomainError("tail_bound: t must be nonnegative");
  const double a = hp.a;

  auto paper = [a](double tt) {
    if (tt <= 1.0)
      return std::exp(-tt * tt) * std::pow(1.0 - tt * tt / 4.0, -2.0);
    double q = std::pow(tt, 2.0 / (2.0 - a));
    return std::exp(q * (std::log(16.0 / 9.0) - 1.0));  // (16/(9e))^q
  };
  if (mode == TailMode::paper_choice) return paper(t);

  double best = std::log(paper(t));
  // Explicit selections as candidates so the optimum can never exceed them.
  if (t >= 1.0) {
    double p = 2.0 - std::pow(t, -2.0 / (2.0 - a));
    double nu = std::pow(t, a / (2.0 - a));
    best = std::min(best, log_chernoff(a, p, nu, t));
  } else if (t > 0.0) {
    best = std::min(best, log_chernoff(a, 1.0, t, t));
  }
  for (int k = 0; k < 128; ++k) {
    double gap = std::pow(10.0, -9.0 * k / 127.0);  // 2-p, from 1 down to 1e-9
    double p = 2.0 - gap;
    double nu_max = 2.0 * std::pow(gap, -a / 2.0);
    auto g = [&](double nu) { return log_chernoff(a, p, nu, t); };
    double nu_star = golden_min(g, 0.0, nu_max * (1.0 - 1e-12));
    best = std::min(best, g(nu_star));
  }
  return std::exp(best);
}

std::vector<MgfMargin> mgf_verify(const Measure& m, const TestFunction& h,
                                  const HerbstParams& hp,
                                  std::span<const double> lambdas,
                                  std::span<const double> ps,
                                  const QuadratureSpec& q) {
  check_params(hp);
  validate_lipschitz(m, h, Seed{0xBEEFull, 11});
  for (double p : ps)
    for (double l : lambdas)
      if (!(shrink_factor(hp, p, l) < 1.0))
        throw DomainError("mgf_verify: lambda grid not admissible at p=" +
                          std::to_string(p));
  double eh = integrate(m, [&](std::span<const double> x) { return h.eval(x); }, q)
                  .value;
  std::vector<MgfMargin> out;
  out.reserve(lambdas.size() * ps.size());
  for (double l : lambdas) {
    double value = integrate(m,
                             [&](std::span<const double> x) {
                               return std::exp(l * (h.eval(x) - eh));
                             },
                             q)
                       .value;
    for (double p : ps) {
      MgfMargin mm;
      mm.p = p;
      mm.lambda = l;
      mm.value = value;
      mm.bound = herbst_mgf_bound(hp, p, l);
      mm.margin = mm.bound - mm.value;
      out.push_back(mm);
    }
  }
  return out;
}

std::vector<MgfMargin> mgf_verify(const Measure& m, const TestFunction& h,
                                  const HerbstParams& hp,
                                  std::span<const double> lambdas,
                                  const QuadratureSpec& q) {
  static const double default_ps[] = {1.0, 1.5, 1.9, 1.99};
  return mgf_verify(m, h, hp, lambdas, default_ps, q);
}

TailCurve mc_tail_experiment(double r, int n, const TestFunction& h,
                             std::span<const double> ts, long long samples,
                             Seed s, double C_assumed) {
  if (samples < 10000) throw DomainError("mc_tail_experiment: samples must be >= 1e4");
  if (n < 1) throw DomainError("mc_tail_experiment: dimension must be >= 1");
  if (!(C_assumed > 0.0)) throw DomainError("mc_tail_experiment: C must be positive");
  std::vector<Measure> fs;
  fs.reserve(n);
  for (int i = 0; i < n; ++i) fs.push_back(make_exp_power(r));
  Measure pm = n == 1 ? fs[0] : product(std::move(fs));
  validate_lipschitz(pm, h, s);

  // Fixed batch count: the split (and therefore every draw) is independent of
  // the machine and of scheduling.
  constexpr int kBatches = 8;
  const long long per = samples / kBatches, rem = samples % kBatches;
  std::vector<std::future<std::vector<double>>> futs;
  for (int b = 0; b < kBatches; ++b) {
    long long count = per + (b < rem ? 1 : 0);
    futs.push_back(std::async(std::launch::async, [&, b, count] {
      Rng rng(derive_seed(s, 1000 + b));
      std::vector<double> hv(static_cast<std::size_t>(count));
      std::vector<double> pt(static_cast<std::size_t>(pm.dim()));
      for (auto& v : hv) {
        sample_into(pm, rng, std::span<double>(pt));
        v = h.eval(std::span<const double>(pt));
      }
      return hv;
    }));
  }
  std::vector<double> hv;
  hv.reserve(static_cast<std::size_t>(samples));
  for (auto& f : futs) {
    auto part = f.get();
    hv.insert(hv.end(), part.begin(), part.end());
  }

  Kahan mean_acc;
  for (double v : hv) mean_acc.add(v);
  const double mean = mean_acc.sum() / static_cast<double>(samples);
  Kahan var_acc;
  for (double v : hv) var_acc.add((v - mean) * (v - mean));
  const double var = var_acc.sum() / static_cast<double>(samples);

  TailCurve curve;
  curve.r = r;
  curve.dim = n;
  curve.C_assumed = C_assumed;
  curve.samples = samples;
  curve.center_bias = std::sqrt(var / static_cast<double>(samples));
  const double a = 2.0 - 2.0 / r;
  const double sqrtC = std::sqrt(C_assumed);
  for (double t : ts) {
    double threshold = t * sqrtC;
    long long count = 0, widened = 0;
    for (double v : hv) {
      double dev = v - mean;
      if (dev >= threshold) ++count;
      if (dev >= threshold - curve.center_bias) ++widened;
    }
    curve.ts.push_back(t);
    curve.bounds.push_back(std::exp(-std::pow(t, 2.0 / (2.0 - a)) / 3.0));
    curve.counts.push_back(count);
    curve.empirical.push_back(static_cast<double>(count) /
                              static_cast<double>(samples));
    curve.cp_upper.push_back(clopper_pearson_upper(widened, samples));
  }
  return curve;
}

SlopeFit sharpness_fit(const TailCurve& curve) {
  std::vector<double> xs, ys;
  int in_window = 0;
  for (std::size_t i = 0; i < curve.ts.size(); ++i) {
    if (curve.counts[i] <= 0) continue;
    double p = curve.empirical[i];
    if (!(p > 0.0 && p < 1.0)) continue;
    double neg_log = -std::log(p);
    if (!(neg_log > 0.0)) continue;
    xs.push_back(std::log(curve.ts[i]));
    ys.push_back(std::log(neg_log));
    if (curve.ts[i] >= 1.5 && curve.ts[i] <= 3.5) ++in_window;
  }
  if (in_window < 5)
    throw InsufficientData(
        "sharpness_fit: need >= 5 nonzero-count points with t in [1.5, 3.5]");
  const std::size_t m = xs.size();
  double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
  double my = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  SlopeFit fit;
  fit.points_used = static_cast<int>(m);
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double resid = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += resid * resid;
  }
  fit.stderr_slope = m > 2 ? std::sqrt(ss_res / (m - 2) / sxx) : 0.0;
  return fit;
}

double clopper_pearson_upper(long long k, long long n, double level) {
  if (n <= 0 || k < 0 || k > n) throw DomainError("clopper_pearson_upper: bad counts");
  if (k == n) return 1.0;
  return boost::math::ibeta_inv(static_cast<double>(k + 1),
                                static_cast<double>(n - k), level);
}

}  // namespace ineq

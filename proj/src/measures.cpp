#include "ineq/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <variant>

#include "ineq/errors.hpp"
#include "ineq/util.hpp"

namespace ineq {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt_param(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// Upper-tail table for the exp-power family, built once per measure.
// Node values are held in log scale so the deep tail never underflows;
// between nodes the tail is completed with a fixed Gauss-Legendre panel.
class ExpPowerTail {
 public:
  ExpPowerTail(double r, double radius, int nodes)
      : r_(r), radius_(radius), xs_(tanh_grid(nodes, radius)) {
    cr_ = exp_power_normalizer(r);
    log_cr_ = std::log(cr_);
    const GaussRule& g = gauss_legendre(8);
    n8_ = g.nodes;
    w8_ = g.weights;

    const int n = nodes;
    log_tails_.resize(n);
    tails_.resize(n);
    log_tails_[n - 1] = log_tail_asymptotic(radius_);
    for (int i = n - 2; i >= 0; --i) {
      double lc = log_cr_ + part_cell_log(xs_[i], i);
      log_tails_[i] = logsumexp2(log_tails_[i + 1], lc);
    }
    for (int i = 0; i < n; ++i) tails_[i] = std::exp(log_tails_[i]);
  }

  double r() const { return r_; }
  double normalizer() const { return cr_; }
  double radius() const { return radius_; }

  double tail(double x) const {
    if (x < 0.0) return 1.0 - tail(-x);
    if (x >= radius_) return std::exp(log_tail_asymptotic(x));
    int i = cell_of(x);
    if (tails_[i + 1] > 1e-280)
      return tails_[i + 1] + cr_ * part_cell(x, i);
    return std::exp(logsumexp2(log_tails_[i + 1], log_cr_ + part_cell_log(x, i)));
  }

  // Exact series for int_0^t e^{-u^r} du = sum_k (-1)^k t^{kr+1}/(k!(kr+1));
  // used on the first cell, where |t|^r kinks at 0 and panel rules lose
  // accuracy.
  double small_integral(double t) const {
    if (t <= 0.0) return 0.0;
    const double tr = std::pow(t, r_);
    double factorial_part = t;  // (-1)^k t^{kr+1} / k!
    double sum = t;
    for (int k = 1; k < 80; ++k) {
      factorial_part *= -tr / k;
      double add = factorial_part / (k * r_ + 1.0);
      sum += add;
      if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }

  double log_tail(double x) const {
    if (x >= radius_) return log_tail_asymptotic(x);
    if (x >= 0.0) {
      int i = cell_of(x);
      return logsumexp2(log_tails_[i + 1], log_cr_ + part_cell_log(x, i));
    }
    return std::log1p(-tail(-x));
  }

  // Bracket [lo,hi] with tail(lo) >= u >= tail(hi), for u in (0,1).
  std::pair<double, double> bracket(double u) const {
    if (u > 0.5) {
      auto [a, b] = bracket_pos(1.0 - u);
      return {-b, -a};
    }
    return bracket_pos(u);
  }

 private:
  std::pair<double, double> bracket_pos(double u) const {
    if (u <= tails_.back()) return {radius_, radius_};
    auto it = std::lower_bound(tails_.begin(), tails_.end(), u,
                               std::greater<double>());
    std::size_t idx = static_cast<std::size_t>(it - tails_.begin());
    if (idx == 0) return {-xs_[1], xs_[1]};  // u at the median within rounding
    return {xs_[idx - 1], xs_[idx]};
  }

  int cell_of(double x) const {
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    int i = static_cast<int>(it - xs_.begin()) - 1;
    return std::clamp(i, 0, static_cast<int>(xs_.size()) - 2);
  }

  // c-free: ∫_x^{xs_[i+1]} e^{-t^r} dt by an 8-point panel (exact series on
  // the cell touching the origin).
  double part_cell(double x, int i) const {
    const double b = xs_[i + 1];
    if (i == 0) return small_integral(b) - small_integral(x);
    const double mid = 0.5 * (x + b), half = 0.5 * (b - x);
    double s = 0.0;
    for (int k = 0; k < 8; ++k) {
      double t = mid + half * n8_[k];
      s += w8_[k] * std::exp(-std::pow(t, r_));
    }
    return s * half;
  }

  // ln of the same integral, stable when e^{-x^r} underflows.
  double part_cell_log(double x, int i) const {
    if (i == 0) return std::log(part_cell(x, 0));  // never underflows here
    const double b = xs_[i + 1];
    const double mid = 0.5 * (x + b), half = 0.5 * (b - x);
    if (half <= 0.0) return -std::numeric_limits<double>::infinity();
    const double xr = std::pow(x, r_);
    double s = 0.0;
    for (int k = 0; k < 8; ++k) {
      double t = mid + half * n8_[k];
      s += w8_[k] * std::exp(xr - std::pow(t, r_));
    }
    return -xr + std::log(s * half);
  }

  // Two-term asymptotic of ln(c_r ∫_x^∞ e^{-t^r} dt) for x at/beyond the grid.
  double log_tail_asymptotic(double x) const {
    double xr = std::pow(x, r_);
    return log_cr_ - xr - std::log(r_) - (r_ - 1.0) * std::log(x) +
           std::log1p(-(r_ - 1.0) / (r_ * xr));
  }

  double r_, cr_, log_cr_, radius_;
  std::vector<double> xs_, log_tails_, tails_;
  std::vector<double> n8_, w8_;
};

}  // namespace

// --- DiscreteMeasure -----------------------------------------------------

DiscreteMeasure::DiscreteMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw DomainError("discrete measure needs at least one atom");
  dim_ = static_cast<int>(atoms_[0].point.size());
  if (dim_ == 0) throw DomainError("atom points must have dimension >= 1");
  Kahan total;
  for (const Atom& a : atoms_) {
    if (static_cast<int>(a.point.size()) != dim_)
      throw DomainError("atom dimensions disagree");
    if (!(a.weight > 0.0)) throw DomainError("atom weights must be positive");
    total.add(a.weight);
  }
  if (std::abs(total.sum() - 1.0) > 1e-12)
    throw DomainError("atom weights must sum to 1 within 1e-12");
  std::vector<std::size_t> order(atoms_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return atoms_[a].point < atoms_[b].point;
  });
  for (std::size_t i = 1; i < order.size(); ++i)
    if (atoms_[order[i - 1]].point == atoms_[order[i]].point)
      throw DomainError("atom points must be pairwise distinct");
}

// --- Measure --------------------------------------------------------------

struct Measure::Impl {
  std::variant<DiscreteMeasure, Continuous1D, ProductMeasure> v;
};

Measure::Measure(DiscreteMeasure m)
    : impl_(std::make_shared<Impl>(Impl{std::move(m)})) {}
Measure::Measure(Continuous1D m)
    : impl_(std::make_shared<Impl>(Impl{std::move(m)})) {
  key_ = continuous().name;
}
Measure::Measure(ProductMeasure m)
    : impl_(std::make_shared<Impl>(Impl{std::move(m)})) {}

bool Measure::is_discrete() const {
  return std::holds_alternative<DiscreteMeasure>(impl_->v);
}
bool Measure::is_continuous() const {
  return std::holds_alternative<Continuous1D>(impl_->v);
}
bool Measure::is_product() const {
  return std::holds_alternative<ProductMeasure>(impl_->v);
}
const DiscreteMeasure& Measure::discrete() const {
  if (!is_discrete()) throw DomainError("measure is not discrete");
  return std::get<DiscreteMeasure>(impl_->v);
}
const Continuous1D& Measure::continuous() const {
  if (!is_continuous()) throw DomainError("measure is not continuous 1-D");
  return std::get<Continuous1D>(impl_->v);
}
const ProductMeasure& Measure::product_factors() const {
  if (!is_product()) throw DomainError("measure is not a product");
  return std::get<ProductMeasure>(impl_->v);
}
int Measure::dim() const {
  if (is_discrete()) return discrete().dim();
  if (is_continuous()) return 1;
  int d = 0;
  for (const Measure& f : product_factors().factors) d += f.dim();
  return d;
}

// --- catalog ---------------------------------------------------------------

double exp_power_normalizer(double r) {
  if (!(r >= 1.0 && r <= 2.0))
    throw DomainError("exp_power_normalizer: r must lie in [1,2]");
  double v1 = 1.0 / (2.0 * std::tgamma(1.0 + 1.0 / r));
  double v2 = r / (2.0 * std::tgamma(1.0 / r));
  if (std::abs(v1 - v2) > 1e-12 * std::abs(v1))
    throw NonConvergent("exp_power_normalizer: gamma identities disagree");
  return v1;
}

Measure make_sym_exp() {
  Continuous1D c;
  c.name = "sym_exp";
  c.log_density = [](double x) { return -std::abs(x) - std::log(2.0); };
  c.upper_tail = [](double x) {
    return x >= 0.0 ? 0.5 * std::exp(-x) : 1.0 - 0.5 * std::exp(x);
  };
  c.log_upper_tail = [](double x) {
    return x >= 0.0 ? -x - std::log(2.0) : std::log1p(-0.5 * std::exp(x));
  };
  c.quantile_bracket = [](double u) -> std::pair<double, double> {
    double x0 = u <= 0.5 ? -std::log(2.0 * u) : std::log(2.0 * (1.0 - u));
    double pad = 1e-9 * (1.0 + std::abs(x0));
    return {x0 - pad, x0 + pad};
  };
  return Measure(std::move(c));
}

Measure make_gaussian(double sigma) {
  if (!(sigma > 0.0)) throw DomainError("gauss: sigma must be positive");
  Continuous1D c;
  c.name = "gauss:sigma=" + fmt_param(sigma);
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  const double logz = -std::log(sigma * std::sqrt(2.0 * kPi));
  c.log_density = [inv2s2, logz](double x) { return logz - x * x * inv2s2; };
  const double scale = 1.0 / (sigma * std::sqrt(2.0));
  c.upper_tail = [scale](double x) { return 0.5 * std::erfc(x * scale); };
  c.log_upper_tail = [scale](double x) {
    double z = x * scale;
    if (z < 25.0) return std::log(0.5 * std::erfc(z));
    double z2 = z * z;
    return -z2 - std::log(2.0 * z * std::sqrt(kPi)) +
           std::log1p(-0.5 / z2 + 0.75 / (z2 * z2));
  };
  c.quantile_bracket = [sigma](double) -> std::pair<double, double> {
    return {-50.0 * sigma, 50.0 * sigma};
  };
  return Measure(std::move(c));
}

Measure make_exp_power(double r) {
  auto table = std::make_shared<const ExpPowerTail>(r, 40.0, 4096);
  Continuous1D c;
  c.name = "exp_power:r=" + fmt_param(r);
  const double log_cr = std::log(table->normalizer());
  c.log_density = [r, log_cr](double x) {
    return log_cr - std::pow(std::abs(x), r);
  };
  c.upper_tail = [table](double x) { return table->tail(x); };
  c.log_upper_tail = [table](double x) { return table->log_tail(x); };
  c.quantile_bracket = [table](double u) { return table->bracket(u); };
  c.shape_r = r;
  return Measure(std::move(c));
}

Measure make_two_point(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("two_point: alpha must lie in (0,1)");
  std::vector<Atom> atoms{{{-1.0}, 1.0 - alpha}, {{1.0}, alpha}};
  Measure m{DiscreteMeasure(std::move(atoms))};
  m.set_key("two_point:alpha=" + fmt_param(alpha));
  return m;
}

Measure product(std::vector<Measure> factors) {
  if (factors.empty()) throw DomainError("product: needs at least one factor");
  Measure m{ProductMeasure{std::move(factors)}};
  return m;
}

namespace {
double parse_value(const std::string& key, const std::string& prefix) {
  std::string s = key.substr(prefix.size());
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw DomainError("");
    return v;
  } catch (...) {
    throw DomainError("bad numeric parameter in measure key '" + key + "'");
  }
}
}  // namespace

Measure measure_from_key(const std::string& key) {
  if (key == "sym_exp") return make_sym_exp();
  if (key == "gauss") return make_gaussian(1.0);
  if (key.rfind("gauss:sigma=", 0) == 0)
    return make_gaussian(parse_value(key, "gauss:sigma="));
  if (key.rfind("exp_power:r=", 0) == 0)
    return make_exp_power(parse_value(key, "exp_power:r="));
  if (key.rfind("two_point:alpha=", 0) == 0)
    return make_two_point(parse_value(key, "two_point:alpha="));
  if (key.rfind("product:", 0) == 0) {
    std::string rest = key.substr(8);
    std::size_t caret = rest.rfind('^');
    if (caret == std::string::npos)
      throw DomainError("product key must look like product:<key>^<n>");
    std::string base = rest.substr(0, caret);
    int n = 0;
    try {
      n = std::stoi(rest.substr(caret + 1));
    } catch (...) {
      throw DomainError("bad copy count in '" + key + "'");
    }
    if (n < 1) throw DomainError("product copy count must be >= 1");
    std::vector<Measure> fs;
    fs.reserve(n);
    for (int i = 0; i < n; ++i) fs.push_back(measure_from_key(base));
    Measure m = product(std::move(fs));
    m.set_key(key);
    return m;
  }
  throw DomainError("unknown measure key '" + key + "'");
}

std::vector<std::string> catalog_keys() {
  return {"sym_exp", "gauss:sigma=<x>", "exp_power:r=<x>",
          "two_point:alpha=<x>", "product:<key>^<n>"};
}

// --- integration ------------------------------------------------------------

IntegralEstimate integrate(const Measure& m, const PointFn& f,
                           const QuadratureSpec& q) {
  if (m.is_discrete()) {
    Kahan acc;
    for (const Atom& a : m.discrete().atoms())
      acc.add(a.weight * f(std::span<const double>(a.point)));
    return {acc.sum(), 0.0, 0};
  }
  if (m.is_continuous()) {
    const Continuous1D& c = m.continuous();
    double lo = std::max(c.support_lo, -q.truncation_radius);
    double hi = std::min(c.support_hi, q.truncation_radius);
    auto integrand = [&](double x) {
      return f(std::span<const double>(&x, 1)) * c.density(x);
    };
    return integrate_adaptive(integrand, lo, hi, q);
  }
  // Product: exact enumeration requires all-discrete factors.
  std::vector<Atom> grid = enumerate_atoms(m);
  Kahan acc;
  for (const Atom& a : grid) acc.add(a.weight * f(std::span<const double>(a.point)));
  return {acc.sum(), 0.0, 0};
}

IntegralEstimate integrate1d(const Measure& m,
                             const std::function<double(double)>& f,
                             const QuadratureSpec& q) {
  if (m.dim() != 1) throw DomainError("integrate1d: measure is not 1-D");
  return integrate(m, [&](std::span<const double> x) { return f(x[0]); }, q);
}

double upper_tail(const Measure& m, double x) {
  const Continuous1D& c = m.continuous();
  return std::clamp(c.upper_tail(x), 0.0, 1.0);
}

// --- sampling ---------------------------------------------------------------

namespace {

double invert_tail(const Continuous1D& c, double u) {
  auto [lo, hi] = c.quantile_bracket(u);
  if (lo == hi) return lo;
  double tlo = c.upper_tail(lo), thi = c.upper_tail(hi);
  if (!(tlo >= u && u >= thi))
    throw NonConvergent("sample: inverse-tail bisection failed to bracket");
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double t = c.upper_tail(mid);
    if (std::abs(t - u) <= 1e-12) return mid;
    if (t > u)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-13 * (1.0 + std::abs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

void sample_into(const Measure& m, Rng& rng, std::span<double> out) {
  if (m.is_discrete()) {
    const auto& atoms = m.discrete().atoms();
    double u = rng.uniform01();
    double acc = 0.0;
    std::size_t pick = atoms.size() - 1;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      acc += atoms[i].weight;
      if (u <= acc) {
        pick = i;
        break;
      }
    }
    const auto& p = atoms[pick].point;
    std::copy(p.begin(), p.end(), out.begin());
    return;
  }
  if (m.is_continuous()) {
    out[0] = invert_tail(m.continuous(), rng.uniform01());
    return;
  }
  std::size_t off = 0;
  for (const Measure& f : m.product_factors().factors) {
    std::size_t d = static_cast<std::size_t>(f.dim());
    sample_into(f, rng, out.subspan(off, d));
    off += d;
  }
}

std::vector<std::vector<double>> sample(const Measure& m, std::size_t n, Seed s) {
  Rng rng(s);
  std::size_t d = static_cast<std::size_t>(m.dim());
  std::vector<std::vector<double>> draws(n, std::vector<double>(d));
  for (std::size_t i = 0; i < n; ++i)
    sample_into(m, rng, std::span<double>(draws[i]));
  return draws;
}

std::vector<Atom> enumerate_atoms(const Measure& m, std::size_t cap) {
  if (m.is_discrete()) {
    const auto& atoms = m.discrete().atoms();
    if (atoms.size() > cap) throw SizeError("atom grid exceeds cap");
    return atoms;
  }
  if (m.is_continuous())
    throw DomainError("enumerate_atoms: continuous measures have no atom grid");
  std::vector<std::vector<Atom>> parts;
  std::size_t total = 1;
  for (const Measure& f : m.product_factors().factors) {
    parts.push_back(enumerate_atoms(f, cap));
    if (total > cap / std::max<std::size_t>(parts.back().size(), 1))
      throw SizeError("product atom grid exceeds cap of " + std::to_string(cap));
    total *= parts.back().size();
  }
  if (total > cap)
    throw SizeError("product atom grid exceeds cap of " + std::to_string(cap));
  std::vector<Atom> grid;
  grid.reserve(total);
  std::vector<std::size_t> idx(parts.size(), 0);
  while (true) {
    Atom a;
    a.weight = 1.0;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      const Atom& src = parts[k][idx[k]];
      a.point.insert(a.point.end(), src.point.begin(), src.point.end());
      a.weight *= src.weight;
    }
    grid.push_back(std::move(a));
    std::size_t k = parts.size();
    while (k > 0) {
      --k;
      if (++idx[k] < parts[k].size()) break;
      idx[k] = 0;
      if (k == 0) return grid;
    }
  }
}

}  // namespace ineq

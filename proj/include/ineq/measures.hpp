#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ineq/quadrature.hpp"
#include "ineq/rng.hpp"

namespace ineq {

struct Atom {
  std::vector<double> point;
  double weight = 0.0;
};

/// Finite atomic measure. Weights positive, summing to 1 within 1e-12,
/// atom points pairwise distinct.
class DiscreteMeasure {
 public:
  explicit DiscreteMeasure(std::vector<Atom> atoms);
  const std::vector<Atom>& atoms() const { return atoms_; }
  int dim() const { return dim_; }
  bool is_two_point() const { return dim_ == 1 && atoms_.size() == 2; }

 private:
  std::vector<Atom> atoms_;
  int dim_ = 0;
};

/// One-dimensional law given by log-density and tail callbacks.
struct Continuous1D {
  std::string name;
  std::function<double(double)> log_density;
  std::function<double(double)> upper_tail;      // P(X >= x), in [0,1]
  std::function<double(double)> log_upper_tail;  // finite where upper_tail underflows
  // Tight bracket containing the solution of upper_tail(x) = u, u in (0, 1/2].
  std::function<std::pair<double, double>(double)> quantile_bracket;
  double support_lo = -std::numeric_limits<double>::infinity();
  double support_hi = std::numeric_limits<double>::infinity();
  std::optional<double> shape_r;  // set for the exp-power family

  double density(double x) const { return std::exp(log_density(x)); }
};

class Measure;

struct ProductMeasure {
  std::vector<Measure> factors;
};

/// Value-semantic handle over {discrete, continuous 1-D, product}; immutable
/// after construction and safe to share across threads.
class Measure {
 public:
  Measure(DiscreteMeasure m);
  Measure(Continuous1D m);
  Measure(ProductMeasure m);

  bool is_discrete() const;
  bool is_continuous() const;
  bool is_product() const;
  const DiscreteMeasure& discrete() const;
  const Continuous1D& continuous() const;
  const ProductMeasure& product_factors() const;
  int dim() const;
  const std::string& key() const { return key_; }
  void set_key(std::string k) { key_ = std::move(k); }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  std::string key_;
};

// --- catalog -----------------------------------------------------------

/// c_r = 1/(2*Gamma(1+1/r)) = r/(2*Gamma(1/r)); both variants must agree to 1e-12.
double exp_power_normalizer(double r);

Measure make_sym_exp();
Measure make_gaussian(double sigma);
Measure make_exp_power(double r);
Measure make_two_point(double alpha);  // mass alpha at +1, 1-alpha at -1
Measure product(std::vector<Measure> factors);

/// Keys: exp_power:r=<x> | sym_exp | gauss:sigma=<x> | two_point:alpha=<x>
///     | product:<key>^<n>
Measure measure_from_key(const std::string& key);
std::vector<std::string> catalog_keys();

// --- operations --------------------------------------------------------

using PointFn = std::function<double(std::span<const double>)>;

/// ∫ f dμ with an error estimate. Continuous laws are integrated on the
/// truncated support; discrete (and all-discrete product) laws enumerate.
IntegralEstimate integrate(const Measure& m, const PointFn& f,
                           const QuadratureSpec& q = {});
IntegralEstimate integrate1d(const Measure& m,
                             const std::function<double(double)>& f,
                             const QuadratureSpec& q = {});

double upper_tail(const Measure& m, double x);

/// i.i.d. draws; continuous 1-D laws are inverted by bisection on upper_tail
/// to 1e-12 in probability. Identical Seed -> identical sequence.
std::vector<std::vector<double>> sample(const Measure& m, std::size_t n, Seed s);
void sample_into(const Measure& m, Rng& rng, std::span<double> out);

/// Full atom grid of a discrete or all-discrete product measure.
/// Throws SizeError beyond `cap` atoms.
std::vector<Atom> enumerate_atoms(const Measure& m, std::size_t cap = 1000000);

}  // namespace ineq

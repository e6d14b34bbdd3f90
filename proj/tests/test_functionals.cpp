#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "ineq/errors.hpp"
#include "ineq/functionals.hpp"
#include "ineq/util.hpp"

using namespace ineq;

namespace {
Measure sym_two_point() { return make_two_point(0.5); }
}  // namespace

TEST_CASE("p-variance basics") {
  Measure tp = sym_two_point();
  TestFunction f12 = testutil::values_fn(tp, {1.0, 2.0});

  // E f^2 = 2.5, (E f)^2 = 2.25.
  CHECK(p_variance(tp, f12, 1.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(p_variance(tp, f12, 2.0) == 0.0);

  TestFunction c = constant_fn(3.7);
  for (double p : {1.0, 1.3, 1.7, 2.0})
    CHECK(std::abs(p_variance(tp, c, p)) <= 1e-12);

  TestFunction neg = testutil::values_fn(tp, {-1.0, 2.0});
  CHECK_THROWS_AS(p_variance(tp, neg, 1.5), DomainError);
}

TEST_CASE("p-variance is nonincreasing in p") {
  std::mt19937_64 eng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    Measure m = testutil::random_discrete(eng, 2, 8);
    auto vals = testutil::random_positive_values(
        eng, enumerate_atoms(m).size(), 0.1, 10.0);
    TestFunction f = testutil::values_fn(m, vals);
    double prev = std::numeric_limits<double>::infinity();
    for (double p = 1.0; p <= 2.0 + 1e-12; p += 0.1) {
      double v = p_variance(m, f, std::min(p, 2.0));
      CHECK(v <= prev + 1e-10);
      prev = v;
    }
  }
}

TEST_CASE("entropy basics") {
  Measure tp = sym_two_point();
  CHECK(std::abs(entropy(tp, constant_fn(2.0))) <= 1e-12);

  std::mt19937_64 eng(99);
  Measure m = testutil::random_discrete(eng, 4, 6);
  auto vals = testutil::random_positive_values(eng, enumerate_atoms(m).size(),
                                               0.2, 5.0);
  TestFunction f = testutil::values_fn(m, vals);
  auto scaled = vals;
  for (auto& v : scaled) v *= 2.0;
  TestFunction f2 = testutil::values_fn(m, scaled);
  CHECK(entropy(m, f2) == doctest::Approx(4.0 * entropy(m, f)).epsilon(1e-12));

  // Limit bridge: Var(p)/(2-p) -> Ent/2 as p -> 2.
  double ent = entropy(m, f);
  double lim = p_variance(m, f, 1.999) / (2.0 - 1.999);
  CHECK(std::abs(lim - 0.5 * ent) / ent <= 1e-2);
}

TEST_CASE("phi curve") {
  Measure tp = sym_two_point();
  std::vector<double> grid;
  for (double p = 1.0; p < 1.9995; p += 0.0312) grid.push_back(p);

  auto flat = phi_curve(tp, constant_fn(1.0), grid);
  for (auto& [p, v] : flat) CHECK(std::abs(v) <= 1e-12);

  std::mt19937_64 eng(7);
  Measure m = testutil::random_discrete(eng, 6, 6);
  TestFunction f = testutil::values_fn(
      m, testutil::random_positive_values(eng, 6, 0.1, 10.0));
  auto curve = phi_curve(m, f, grid);
  std::vector<double> vals;
  for (auto& [p, v] : curve) vals.push_back(v);
  CHECK(testutil::nondecreasing(vals, 1e-10));

  // Endpoint: phi(p) -> 2 Ent as p -> 2.
  double ent = entropy(m, f);
  double endpoint = p_variance(m, f, 1.999) / (1.0 / 1.999 - 0.5);
  CHECK(std::abs(endpoint - 2.0 * ent) / (2.0 * ent) <= 1e-2);

  std::vector<double> bad{1.0, 2.0};
  CHECK_THROWS_AS(phi_curve(m, f, bad), DomainError);
}

TEST_CASE("dirichlet energy") {
  Measure g = make_gaussian(1.0);
  TestFunction id = scalar_fn("x", [](double x) { return x; },
                              [](double) { return 1.0; });
  CHECK(dirichlet_energy(g, id) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(dirichlet_energy(g, constant_fn(5.0)) == doctest::Approx(0.0));

  // Weighted energy on the exponential line vs a two-piece oracle:
  // lambda([-1,1]) + E[|x| 1_{|x|>1}] = 1 - e^-1 + 2 e^-1 = 1 + e^-1.
  Measure lam = make_sym_exp();
  WeightFn w = [](double x) { return std::max(1.0, std::abs(x)); };
  double got = dirichlet_energy(lam, id, w);
  CHECK(got == doctest::Approx(1.0 + std::exp(-1.0)).epsilon(1e-9));
  double oracle = testutil::simpson(
      [](double x) {
        return std::max(1.0, std::abs(x)) * 0.5 * std::exp(-std::abs(x));
      },
      -40.0, 40.0, 200000);
  CHECK(got == doctest::Approx(oracle).epsilon(1e-7));

  // Two-point measures take the difference-quotient form, no gradient needed.
  Measure tp = sym_two_point();
  TestFunction f12 = testutil::values_fn(tp, {1.0, 2.0});
  CHECK(dirichlet_energy(tp, f12) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("gradient validation catches a wrong gradient") {
  Measure g = make_gaussian(1.0);
  TestFunction bad = scalar_fn("bad", [](double x) { return x * x; },
                               [](double x) { return x; });  // should be 2x
  CHECK_THROWS_AS(dirichlet_energy(g, bad), DomainError);
}

TEST_CASE("ia ratio") {
  Measure g = make_gaussian(1.0);
  TestFunction f = scalar_fn("1+0.1sin", [](double x) { return 1.0 + 0.1 * std::sin(x); },
                             [](double x) { return 0.1 * std::cos(x); });
  InequalityReport rep = ia_ratio(g, f, 1.5, 1.0);
  CHECK(rep.ratio <= 1.0 + 1e-6);
  CHECK(rep.var_p >= 0.0);
  CHECK(rep.ratio ==
        doctest::Approx(rep.var_p / (std::pow(0.5, 1.0) * rep.energy)));

  CHECK(ia_ratio(g, constant_fn(2.0), 1.5, 1.0).ratio == 0.0);

  // Zero energy with positive p-variance flags failure for any constant:
  // 2 + cos(pi x) has vanishing derivative at every integer atom but is not
  // constant across them.
  Measure m{DiscreteMeasure{
      {{{-1.0}, 0.25}, {{0.0}, 0.5}, {{1.0}, 0.25}}}};
  TestFunction flat_grad = scalar_fn(
      "2+cos(pi x)", [](double x) { return 2.0 + std::cos(M_PI * x); },
      [](double x) { return -M_PI * std::sin(M_PI * x); });
  CHECK_THROWS_AS(ia_ratio(m, flat_grad, 1.2, 0.5), DegenerateWitness);
}

TEST_CASE("symmetric two-point witnesses stay below constant 1") {
  Measure tp = sym_two_point();
  for (int k = 1; k < 40; ++k) {
    double theta = M_PI / 2.0 * k / 40.0;
    double fm = std::cos(theta), fp = std::sin(theta);
    if (std::abs(fp - fm) < 1e-8) continue;  // 0/0 witness, not informative
    TestFunction f = testutil::values_fn(tp, {fm, fp});
    for (double p : {1.0, 1.3, 1.6, 1.9}) {
      InequalityReport rep = ia_ratio(tp, f, p, 1.0);
      CHECK(rep.ratio <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("witnessed constants nest across exponents") {
  Measure g = make_gaussian(1.0);
  TestFunction f = scalar_fn("1+0.3cos", [](double x) { return 1.0 + 0.3 * std::cos(x); },
                             [](double x) { return -0.3 * std::sin(x); });
  for (double p : {1.0, 1.2, 1.5, 1.8, 1.95}) {
    double prev = -1.0;
    for (double a : {0.0, 0.3, 0.7, 1.0}) {
      double ratio = ia_ratio(g, f, p, a).ratio;
      CHECK(ratio >= prev - 1e-10);  // (2-p)^a decreasing in a on (0,1]
      prev = ratio;
    }
  }
}

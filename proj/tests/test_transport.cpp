#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "ineq/errors.hpp"
#include "ineq/transport.hpp"

using namespace ineq;

TEST_CASE("r = 1 is the identity map") {
  TransportMap tm = TransportMap::build(1.0, 1024);
  for (double x : {0.0, 0.2, 1.0, 3.7, 12.0, 35.0}) {
    CHECK(std::abs(tm(x) - x) <= 1e-10 * (1.0 + x));
    CHECK(tm.derivative(x) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("structural invariants of the map") {
  for (double r : {1.0, 1.3, 1.7, 2.0}) {
    CAPTURE(r);
    TransportMap tm = TransportMap::build(r, 2048);
    CHECK(tm(0.0) == 0.0);
    for (double x : {0.4, 1.0, 2.5, 8.0}) {
      CHECK(tm(-x) == -tm(x));               // odd by construction
      CHECK(tm(x + 0.1) > tm(x));            // strictly increasing
      CHECK(tm(x) >= std::pow(x, r) - 1e-10 * (1.0 + std::pow(x, r)));
      double w = tm.inverse(x);
      CHECK(w <= std::pow(x, 1.0 / r) + 1e-10);
      CHECK(tm(w) == doctest::Approx(x).epsilon(1e-10));
    }
  }
}

TEST_CASE("r = 2 node values match the erfc oracle") {
  TransportMap tm = TransportMap::build(2.0);
  // Tail equation at x: (1/2) e^{-z} = c_2 int_x^inf e^{-t^2} = erfc(x)/2.
  for (double x : {0.5, 1.0, 2.0, 3.0}) {
    double oracle = -std::log(std::erfc(x));
    CHECK(tm(x) == doctest::Approx(oracle).epsilon(1e-10));
  }
  CHECK(tm(1.0) >= 1.0);  // z_r(x) >= x^r
}

TEST_CASE("derivative formula matches finite differences") {
  for (double r : {1.2, 1.8}) {
    TransportMap tm = TransportMap::build(r);
    for (double x : {0.1, 0.9, 2.2, 5.5, 11.0}) {
      double h = 1e-6 * (1.0 + x);
      double fd = (tm(x + h) - tm(x - h)) / (2.0 * h);
      CHECK(std::abs(tm.derivative(x) - fd) <= 1e-6 * std::abs(fd));
    }
  }
}

TEST_CASE("derivative at the origin and far field") {
  for (double r : {1.0, 1.4, 2.0}) {
    TransportMap tm = TransportMap::build(r);
    double d0 = tm.derivative(0.0);
    CHECK(d0 == doctest::Approx(2.0 * tm.normalizer()).epsilon(1e-9));
    CHECK(d0 >= 2.0 / 3.0);
    CHECK(d0 <= std::exp(1.0));
  }
  // Far field at r = 2: z' within [1, 12] times r x^{r-1}.
  TransportMap t2 = TransportMap::build(2.0);
  for (double x : {1.0, 3.0, 10.0, 25.0}) {
    double ratio = t2.derivative(x) / (2.0 * x);
    CHECK(ratio >= 1.0 - 1e-9);
    CHECK(ratio <= 12.0);
  }
}

TEST_CASE("jacobian envelope sweep") {
  std::vector<double> xs;
  for (double x = -30.0; x <= 30.0; x += 0.05) xs.push_back(x);
  for (double r : {1.0, 1.5, 2.0}) {
    CAPTURE(r);
    TransportMap tm = TransportMap::build(r);
    LemmaVerdict v = jacobian_bound_check(tm, xs);
    CHECK(v.violations == 0);
  }
}

TEST_CASE("pushforward lands on the exponential law") {
  TransportMap t1 = TransportMap::build(1.0);
  PushforwardResult r1 = pushforward_check(t1, 20000, Seed{5, 0});
  CHECK(r1.pass);
  TransportMap t2 = TransportMap::build(2.0);
  PushforwardResult r2 = pushforward_check(t2, 20000, Seed{5, 1});
  CHECK(r2.pass);

  // Negative control: the wrong map misses by far more than the threshold.
  TransportMap t15 = TransportMap::build(1.5);
  Measure mu2 = make_exp_power(2.0);
  auto draws = sample(mu2, 20000, Seed{5, 2});
  std::vector<double> ys(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) ys[i] = t15(draws[i][0]);
  double ks = testutil::ks_distance(ys, [](double y) {
    return y >= 0.0 ? 1.0 - 0.5 * std::exp(-y) : 0.5 * std::exp(y);
  });
  CHECK(ks > 1.95 / std::sqrt(20000.0));
}

TEST_CASE("energy transfer ratios respect the two-sided factors") {
  TransportMap tm = TransportMap::build(1.5);

  TestFunction g = scalar_fn(
      "1+exp(-x^2)", [](double x) { return 1.0 + std::exp(-x * x); },
      [](double x) { return -2.0 * x * std::exp(-x * x); });
  auto [mu_side, lam_side] =
      equivalence_transfer(tm, g, 1.5, TransferDirection::given_lambda_side);
  CHECK(lam_side.ratio <= 600.0 * mu_side.ratio + 1e-6);
  CHECK(mu_side.var_p == doctest::Approx(lam_side.var_p).epsilon(1e-6));

  TestFunction f = scalar_fn(
      "1+0.5cos", [](double x) { return 1.0 + 0.5 * std::cos(x); },
      [](double x) { return -0.5 * std::sin(x); });
  auto [mu2, lam2] =
      equivalence_transfer(tm, f, 1.5, TransferDirection::given_mu_side);
  CHECK(mu2.ratio <= 50.0 * lam2.ratio + 1e-6);

  auto [mc, lc] = equivalence_transfer(tm, constant_fn(2.0), 1.3,
                                       TransferDirection::given_lambda_side);
  CHECK(mc.ratio == 0.0);
  CHECK(lc.ratio == 0.0);
}

TEST_CASE("domain errors") {
  TransportMap tm = TransportMap::build(1.5, 512, 10.0);
  CHECK_THROWS_AS(tm(11.0), DomainError);
  CHECK_THROWS_AS(tm.inverse(tm.max_z() * 1.5), DomainError);
  CHECK_THROWS_AS(TransportMap::build(0.8), DomainError);
}

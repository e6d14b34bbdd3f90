#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "ineq/errors.hpp"
#include "ineq/phi_class.hpp"
#include "ineq/suites.hpp"

using namespace ineq;

namespace {

std::vector<double> log_grid(int n = 64, double lo = 1e-2, double hi = 1e2) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i)
    g[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1));
  return g;
}

PhiCandidate power_candidate(double gamma) {
  return {[gamma](double x) { return std::pow(x, gamma); },
          [gamma](double x) {
            return gamma * (gamma - 1.0) * std::pow(x, gamma - 2.0);
          },
          "power"};
}

}  // namespace

TEST_CASE("cone membership") {
  auto grid = log_grid();
  CHECK(is_in_phi(power_candidate(2.0 / 1.4), grid).member);
  PhiCandidate affine{[](double x) { return 3.0 * x - 7.0; }, {}, "affine"};
  auto da = is_in_phi(affine, grid);
  CHECK(da.member);
  CHECK(da.affine);
  // 1/phi'' = 1/(12 x^2) is convex, so x^4 is out.
  auto d4 = is_in_phi(power_candidate(4.0), grid);
  CHECK_FALSE(d4.member);
  CHECK(d4.worst_margin < 0.0);

  std::vector<double> small{1.0, 2.0};
  CHECK_THROWS_AS(is_in_phi(power_candidate(1.5), small), DomainError);
}

TEST_CASE("membership works from central differences too") {
  auto grid = log_grid();
  PhiCandidate numeric{[](double x) { return std::pow(x, 1.5); }, {}, "cd"};
  CHECK(is_in_phi(numeric, grid).member);
  PhiCandidate numeric4{[](double x) { return std::pow(x, 4.0); }, {}, "cd4"};
  CHECK_FALSE(is_in_phi(numeric4, grid).member);
}

TEST_CASE("deficit functional") {
  PhiCandidate sq = power_candidate(2.0);
  CHECK(ft_deficit(sq, 0.0, 3.0, 5.0) == 0.0);
  CHECK(ft_deficit(sq, 0.7, 4.0, 4.0) == doctest::Approx(0.0));
  CHECK(ft_deficit(sq, 0.5, 0.0, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("mixture convexity of the Jensen gap") {
  std::mt19937_64 eng(17);
  Measure m = testutil::random_discrete(eng, 4, 4);
  auto atoms = enumerate_atoms(m);
  auto xv = testutil::random_positive_values(eng, atoms.size(), 1e-2, 1e2);
  auto yv = testutil::random_positive_values(eng, atoms.size(), 1e-2, 1e2);
  TestFunction X = testutil::values_fn(m, xv);
  TestFunction Y = testutil::values_fn(m, yv);
  PhiCandidate phi = power_candidate(1.5);

  CHECK(std::abs(psi_convexity_margin(phi, m, X, X, 0.37)) <= 1e-10);
  CHECK(std::abs(psi_convexity_margin(phi, m, X, Y, 0.0)) <= 1e-10);
  CHECK(std::abs(psi_convexity_margin(phi, m, X, Y, 1.0)) <= 1e-10);

  // Independent expansion: E F_t(X,Y) - F_t(EX, EY).
  double t = 0.42;
  double ef = 0.0, ex = 0.0, ey = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    ef += atoms[i].weight * ft_deficit(phi, t, xv[i], yv[i]);
    ex += atoms[i].weight * xv[i];
    ey += atoms[i].weight * yv[i];
  }
  double direct = ef - ft_deficit(phi, t, ex, ey);
  double margin = psi_convexity_margin(phi, m, X, Y, t);
  CHECK(margin == doctest::Approx(direct).epsilon(1e-10));
  CHECK(margin >= -1e-10);
}

TEST_CASE("subadditivity across product factors") {
  std::mt19937_64 eng(23);

  // Single factor: both sides coincide.
  Measure one = product({testutil::random_discrete(eng, 3, 3)});
  auto vals = testutil::random_positive_values(eng, 3, 0.1, 10.0);
  TestFunction Z1 = testutil::values_fn(one, vals);
  auto [l1, r1] = subadditivity_margin(one, Z1, power_candidate(1.4));
  CHECK(l1 == doctest::Approx(r1).epsilon(1e-13));

  // Affine phi kills both sides.
  PhiCandidate affine{[](double x) { return 3.0 * x - 7.0; }, {}, "affine"};
  auto [la, ra] = subadditivity_margin(one, Z1, affine);
  CHECK(std::abs(la) <= 1e-12);
  CHECK(std::abs(ra) <= 1e-12);

  // Two two-point factors with a power member.
  Measure pm = product({make_two_point(0.3), make_two_point(0.6)});
  auto zv = testutil::random_positive_values(eng, 4, 0.1, 10.0);
  TestFunction Z = testutil::values_fn(pm, zv);
  auto [lhs, rhs] = subadditivity_margin(pm, Z, power_candidate(2.0 / 1.3));
  CHECK(lhs <= rhs + 1e-10);
}

TEST_CASE("p-variance subadditivity") {
  std::mt19937_64 eng(29);
  Measure pm = product({make_two_point(0.4), make_two_point(0.5)});

  auto [lc, rc] = var_p_subadditivity(pm, constant_fn(2.0, 2), 1.5);
  CHECK(std::abs(lc) <= 1e-12);
  CHECK(std::abs(rc) <= 1e-12);

  // f depending on the first coordinate only: the lhs equals that factor's
  // term and the other term vanishes.
  TestFunction f1;
  f1.arity = 2;
  f1.label = "coord1";
  f1.eval = [](std::span<const double> x) { return 2.0 + x[0]; };
  auto [l1, r1] = var_p_subadditivity(pm, f1, 1.5);
  CHECK(l1 == doctest::Approx(r1).epsilon(1e-12));

  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Measure> fs;
    for (int k = 0; k < 3; ++k) fs.push_back(testutil::random_discrete(eng, 3, 3));
    Measure m3 = product(std::move(fs));
    auto fv = testutil::random_positive_values(eng, 27, 0.1, 10.0);
    TestFunction f = testutil::values_fn(m3, fv);
    auto [lhs, rhs] = var_p_subadditivity(m3, f, 1.7);
    CHECK(lhs <= rhs + 1e-10);
  }
}

TEST_CASE("alternating conditional-expectation sums") {
  std::mt19937_64 eng(41);

  // n = 1 with a convex f is Jensen's gap.
  Measure m = testutil::random_discrete(eng, 3, 5);
  auto zv = testutil::random_positive_values(eng, enumerate_atoms(m).size(),
                                             0.1, 10.0);
  TestFunction zf = testutil::values_fn(m, zv);
  auto sq = [](std::span<const double> v) { return v[0] * v[0]; };
  auto Z = [&](std::span<const double> x) {
    return std::vector<double>{zf.eval(x)};
  };
  CHECK(cn_alternating_sum(sq, m, Z, 1) >= -1e-12);

  // Quadratic-affine family passes at n = 3 and nests down to n = 2, 1.
  auto quad = [](std::span<const double> v) {
    double q1 = 0.8 * v[0] - 0.2 * v[1];
    double q2 = 0.1 * v[0] + 0.9 * v[1];
    return q1 * q1 + q2 * q2 + 0.3 * v[0] - 1.1 * v[1] + 0.7;
  };
  for (int n = 1; n <= 3; ++n) {
    std::vector<Measure> fs;
    for (int k = 0; k < n; ++k) fs.push_back(testutil::random_discrete(eng, 2, 3));
    Measure pm = n == 1 ? fs[0] : product(std::move(fs));
    std::size_t total = enumerate_atoms(pm).size();
    std::vector<double> z1(total), z2(total);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (auto& v : z1) v = u(eng);
    for (auto& v : z2) v = u(eng);
    TestFunction f1 = testutil::values_fn(pm, z1);
    TestFunction f2 = testutil::values_fn(pm, z2);
    auto Z2 = [&](std::span<const double> x) {
      return std::vector<double>{f1.eval(x), f2.eval(x)};
    };
    CHECK(cn_alternating_sum(quad, pm, Z2, 2) >= -1e-10);
  }

  // Cone members on the half line at n = 2.
  Measure pm2 = product({make_two_point(0.35), make_two_point(0.7)});
  auto zv2 = testutil::random_positive_values(eng, 4, 0.1, 10.0);
  TestFunction zf2 = testutil::values_fn(pm2, zv2);
  auto f15 = [](std::span<const double> v) { return std::pow(v[0], 1.5); };
  auto Zp = [&](std::span<const double> x) {
    return std::vector<double>{zf2.eval(x)};
  };
  CHECK(cn_alternating_sum(f15, pm2, Zp, 1) >= -1e-10);

  std::vector<Measure> many(13, make_two_point(0.5));
  CHECK_THROWS_AS(
      cn_alternating_sum(sq, product(many),
                         [](std::span<const double>) {
                           return std::vector<double>{1.0};
                         },
                         1),
      SizeError);
}

TEST_CASE("rho_s metric") {
  CHECK(rho_s(3.0, 3.0, 1.5) == 0.0);
  // s = 2 collapses to half the distance, at machine precision.
  std::mt19937_64 eng(3);
  std::uniform_real_distribution<double> u(std::log(1e-3), std::log(1e3));
  for (int i = 0; i < 2000; ++i) {
    double x = std::exp(u(eng)), y = std::exp(u(eng));
    double got = rho_s(x, y, 2.0);
    double want = std::abs(x - y) / 2.0;
    CHECK(std::abs(got - want) <= 8.0 * 2.2e-16 * std::max(x, y));
  }
  // Series and direct branches agree near the switch point.
  for (double ux : {0.45, 0.49, 0.51, 0.55}) {
    double x = 1.0 + ux, y = 1.0 - ux;
    double direct = std::sqrt(0.5 * (std::pow(x, 1.5) + std::pow(y, 1.5)) -
                              std::pow(0.5 * (x + y), 1.5));
    CHECK(rho_s(x, y, 1.5) == doctest::Approx(direct).epsilon(1e-12));
  }
  for (int i = 0; i < 10000; ++i) {
    double x = std::exp(u(eng)), y = std::exp(u(eng)), z = std::exp(u(eng));
    CHECK(rho_s(x, y, 1.3) + rho_s(y, z, 1.3) - rho_s(x, z, 1.3) >= -1e-12);
  }
  CHECK_THROWS_AS(rho_s(1.0, 2.0, 1.0), DomainError);
  CHECK_THROWS_AS(rho_s(1.0, 2.0, 2.1), DomainError);
  CHECK_THROWS_AS(rho_s(-1.0, 2.0, 1.5), DomainError);
}

TEST_CASE("three-regime deficit comparison") {
  // Boundary x = c: the right side collapses onto the left side exactly.
  double m0 = lemma8_margin(1.7, 0.33, 2.0, 5.0, 2.0,
                            Lemma8Regime::outside_interval);
  CHECK(std::abs(m0) <= 1e-10);

  std::mt19937_64 eng(57);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    double s = 1.0 + u01(eng);
    double c = std::exp(6.0 * u01(eng) - 3.0);
    double d = std::exp(6.0 * u01(eng) - 3.0);
    double x = std::exp(6.0 * u01(eng) - 3.0);
    double scale = std::pow(std::max({1.0, c, d, x}), s);
    CHECK(lemma8_margin(s, 0.5, c, d, x, Lemma8Regime::half_t) >=
          -1e-10 * scale);
    CHECK(lemma8_margin(s, 0.3, std::max(c, d), std::min(c, d), x,
                        Lemma8Regime::small_t_ordered) >= -1e-10 * scale);
  }
  CHECK_THROWS_AS(lemma8_margin(1.5, 0.4, 1.0, 3.0, 2.0,
                                Lemma8Regime::outside_interval),
                  RegimeError);
  CHECK_THROWS_AS(lemma8_margin(1.5, 0.4, 1.0, 3.0, 2.0, Lemma8Regime::half_t),
                  RegimeError);
  CHECK_THROWS_AS(lemma8_margin(1.5, 0.7, 3.0, 1.0, 2.0,
                                Lemma8Regime::small_t_ordered),
                  RegimeError);
}

TEST_CASE("weighted energy lower bound on a segment") {
  // The extremal shape (linear in e^x) attains the bound at a = 0.
  double x1 = 0.5, x2 = 2.0, y1 = 1.0, y2 = 3.0;
  double span = std::exp(x2) - std::exp(x1);
  double k = (y2 - y1) / span;
  TestFunction g = scalar_fn(
      "extremal",
      [=](double x) { return y1 + (std::exp(x) - std::exp(x1)) * k; },
      [=](double x) { return k * std::exp(x); });
  double margin = lemma9_margin(x1, x2, y1, y2, 0.0, g);
  double bound = (y2 - y1) * (y2 - y1) / (4.0 * span);
  CHECK(margin >= -1e-12);
  CHECK(margin == doctest::Approx(bound).epsilon(1e-8));  // energy = 2*bound

  // Flat boundary data: the bound vanishes, energy remains.
  TestFunction wavy = scalar_fn("sin", [](double x) { return std::sin(2.0 * M_PI * x); },
                                [](double x) { return 2.0 * M_PI * std::cos(2.0 * M_PI * x); });
  double m2 = lemma9_margin(1.0, 2.0, 0.0, 0.0, 0.7, wavy);
  CHECK(m2 >= 0.0);

  CHECK_THROWS_AS(lemma9_margin(2.0, 1.0, 0.0, 0.0, 0.5, wavy), DomainError);
  CHECK_THROWS_AS(lemma9_margin(0.5, 2.0, 5.0, 5.0, 0.5, wavy), DomainError);
}

TEST_CASE("extremal moment bound") {
  Lemma10Result res = lemma10_check(0.0, 1.0, 0.0, 1.0, 1.0);
  CHECK(res.energy_gap <= 1e-8);
  CHECK(res.est3_margin >= -1e-10);

  // Nearly flat: both sides approach y1^p * lambda(-inf, x2].
  double y1 = 2.0, eps = 1e-6;
  Lemma10Result flat = lemma10_check(0.3, 1.7, y1, y1 + eps, 2.0);
  double mass = 1.0 - 0.5 * std::exp(-1.7);
  CHECK(flat.moment_lhs == doctest::Approx(y1 * y1 * mass).epsilon(1e-5));
  CHECK(flat.moment_rhs == doctest::Approx(y1 * y1 * mass).epsilon(1e-5));

  CHECK_THROWS_AS(lemma10_check(0.0, 1.0, 1.0, 0.5, 2.0), DomainError);
  CHECK_THROWS_AS(lemma10_check(0.0, 1.0, 0.0, 1.0, 0.5), DomainError);
}

TEST_CASE("coupled deficit inequality") {
  CHECK(lemma11_u(2.0) == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-14));

  std::mt19937_64 eng(71);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int i = 0; i < 5000; ++i) {
    double s = 1.001 + 0.999 * u01(eng);
    double t = 0.01 + 0.98 * u01(eng);
    double c = 0.1 + 3.0 * u01(eng);
    double d = c * (1.1 + 3.0 * u01(eng));
    double x = c + (d - c) * (0.01 + 0.98 * u01(eng));
    double u = lemma11_u(s);
    double tc = ((1.0 - u) * c + u * x) * (0.1 + 0.9 * u01(eng));
    double a = std::pow(c, s), b = std::pow(d, s), ta = std::pow(tc, s);
    double margin = lemma11_margin(s, t, a, b, c, d, ta, tc, x);
    double scale = std::max({1.0, a, b});
    CHECK(margin >= -1e-10 * scale);
  }
  // Boundary coupling x -> d-, tc at its cap.
  double s = 2.0, c = 1.0, d = 3.0, x = d * (1.0 - 1e-9);
  double tc = (1.0 - lemma11_u(s)) * c + lemma11_u(s) * x;
  CHECK(lemma11_margin(s, 0.5, std::pow(c, s), std::pow(d, s), c, d,
                       std::pow(tc, s), tc, x) >= -1e-10 * 9.0);

  CHECK_THROWS_AS(lemma11_margin(2.0, 0.5, 1.0, 27.0, 1.0, 3.0, 1.0, 1.0, 5.0),
                  RegimeError);
  CHECK_THROWS_AS(lemma11_margin(2.0, 0.5, 0.5, 27.0, 1.0, 3.0, 1.0, 1.0, 2.0),
                  RegimeError);
}

TEST_CASE("suites run clean at smoke scale") {
  for (const auto& id : {"phi-cone", "ft-convex", "psi-convex", "subadd",
                         "varp-subadd", "cn", "rho-metric", "lemma8", "lemma9",
                         "lemma10", "lemma11"}) {
    CAPTURE(id);
    LemmaVerdict v = run_lemma_suite(id, 500, Seed{2024, 0});
    CHECK(v.violations == 0);
  }
  LemmaVerdict bad = run_lemma_suite("selftest-fail", 200, Seed{2024, 0});
  CHECK(bad.violations > 0);
  CHECK_THROWS_AS(run_lemma_suite("nope", 10, Seed{0, 0}), DomainError);
}

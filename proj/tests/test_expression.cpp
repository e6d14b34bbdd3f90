#include <cmath>
#include <random>

#include "doctest.h"
#include "ineq/errors.hpp"
#include "ineq/expression.hpp"

using namespace ineq;

namespace {
double eval1(const std::string& src, double x) {
  Expression e = parse_expression(src, 1);
  return e.value(std::span<const double>(&x, 1));
}
}  // namespace

TEST_CASE("values and gradients of the worked examples") {
  CHECK(eval1("1+0.5*sin(x)", 0.0) == doctest::Approx(1.0));

  Expression e2 = parse_expression("x1^2+x2^2", 2);
  double pt[2] = {1.0, 1.0};
  CHECK(e2.value(pt) == doctest::Approx(2.0));
  auto g = e2.gradient(pt);
  CHECK(g[0] == doctest::Approx(2.0));
  CHECK(g[1] == doctest::Approx(2.0));

  CHECK(eval1("max(1, abs(x)^0.5)", 0.25) == doctest::Approx(1.0));
  CHECK(eval1("max(1, abs(x)^0.5)", 2.0) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("precedence and associativity") {
  CHECK(eval1("-x^2", 2.0) == doctest::Approx(-4.0));   // ^ binds above unary -
  CHECK(eval1("(-x)^2", 2.0) == doctest::Approx(4.0));
  CHECK(eval1("2^3^2", 0.0) == doctest::Approx(512.0));  // right-associative
  CHECK(eval1("6/3/2", 0.0) == doctest::Approx(1.0));    // left-associative
  CHECK(eval1("2^-1", 0.0) == doctest::Approx(0.5));
  CHECK(eval1("1+2*3", 0.0) == doctest::Approx(7.0));
  CHECK(eval1("-2*x", 3.0) == doctest::Approx(-6.0));
}

TEST_CASE("parse and arity errors carry positions") {
  try {
    parse_expression("1+*2", 1);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset == 2);
  }
  CHECK_THROWS_AS(parse_expression("(x", 1), ParseError);
  CHECK_THROWS_AS(parse_expression("", 1), ParseError);
  CHECK_THROWS_AS(parse_expression("foo(x)", 1), ParseError);
  CHECK_THROWS_AS(parse_expression("min(x)", 1), ParseError);
  CHECK_THROWS_AS(parse_expression("x2", 1), ArityError);
  CHECK_THROWS_AS(parse_expression("x", 2), ArityError);
  CHECK_THROWS_AS(parse_expression("x0", 3), ArityError);
}

TEST_CASE("print-parse round trip on a generated corpus") {
  std::mt19937_64 eng(424242);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const char* fns1[] = {"exp", "log", "sin", "cos", "abs", "sqrt"};

  std::function<std::string(int)> gen = [&](int depth) -> std::string {
    double pick = u01(eng);
    if (depth <= 0 || pick < 0.3) {
      if (u01(eng) < 0.5) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f", u01(eng) * 10.0);
        return buf;
      }
      return u01(eng) < 0.5 ? "x1" : "x2";
    }
    if (pick < 0.45) return "-" + gen(depth - 1);
    if (pick < 0.6) {
      const char* f = fns1[eng() % 6];
      return std::string(f) + "(" + gen(depth - 1) + ")";
    }
    if (pick < 0.7)
      return std::string(u01(eng) < 0.5 ? "min" : "max") + "(" +
             gen(depth - 1) + ", " + gen(depth - 1) + ")";
    const char* ops[] = {"+", "-", "*", "/", "^"};
    return "(" + gen(depth - 1) + ") " + ops[eng() % 5] + " (" +
           gen(depth - 1) + ")";
  };

  for (int i = 0; i < 200; ++i) {
    std::string src = gen(4);
    Expression e = parse_expression(src, 2);
    std::string printed = print_expression(e);
    Expression re = parse_expression(printed, 2);
    CHECK(print_expression(re) == printed);
  }
}

TEST_CASE("dual derivatives match central differences") {
  const char* exprs[] = {"exp(-(x-1)^2) + 0.5*sin(3*x)",
                         "sqrt(x^2 + 1) * cos(x)",
                         "min(x^2, 2*x + 1) + max(0.5, x)",
                         "abs(x)^1.5 + log(x^2 + 1)"};
  for (const char* src : exprs) {
    CAPTURE(src);
    Expression e = parse_expression(src, 1);
    for (double x : {-1.7, -0.6, 0.35, 1.2, 2.8}) {
      double h = 1e-6 * (1.0 + std::abs(x));
      double xp = x + h, xm = x - h;
      double cd = (e.value(std::span<const double>(&xp, 1)) -
                   e.value(std::span<const double>(&xm, 1))) /
                  (2.0 * h);
      double ad = e.gradient(std::span<const double>(&x, 1))[0];
      CHECK(std::abs(ad - cd) <= 1e-5 * std::max(1.0, std::abs(cd)));
    }
  }
  // Sign-convention derivative of abs at the kink.
  Expression a = parse_expression("abs(x)", 1);
  double zero = 0.0;
  CHECK(a.gradient(std::span<const double>(&zero, 1))[0] == 0.0);
}

TEST_CASE("expression test functions plug into the library") {
  TestFunction f = parse_fn("1 + 0.25*cos(2*x)", 1);
  CHECK(f.arity == 1);
  CHECK(f.at(0.0) == doctest::Approx(1.25));
  CHECK(f.grad1(0.0) == doctest::Approx(0.0));
  CHECK(f.label.find("cos") != std::string::npos);
}

#include <doctest.h>

#include <cmath>

#include "kundt/expr.hpp"
#include "kundt/sampling.hpp"

using namespace kundt;
using expr::Bindings;
using expr::Expr;
using expr::NodeKind;
using expr::parse_expr;

namespace {

const std::vector<std::string> kSyms = {"u", "v", "x3", "x4", "c1", "c2", "c3"};

double fd_derivative(const Expr& e, Bindings b, const std::string& sym, double h) {
  double x = b.get(sym);
  b.set(sym, x + h);
  double fp = e.eval(b);
  b.set(sym, x - h);
  double fm = e.eval(b);
  return (fp - fm) / (2.0 * h);
}

// Random smooth expression over the given symbols.
Expr random_expr(SplitMix64& rng, int depth) {
  if (depth <= 0 || rng.next_double() < 0.25) {
    switch (rng.next_u64() % 3) {
      case 0: return Expr(rng.uniform(-2.0, 2.0));
      case 1: return Expr::symbol("x3");
      default: return Expr::symbol("x4");
    }
  }
  switch (rng.next_u64() % 8) {
    case 0: return random_expr(rng, depth - 1) + random_expr(rng, depth - 1);
    case 1: return random_expr(rng, depth - 1) - random_expr(rng, depth - 1);
    case 2: return random_expr(rng, depth - 1) * random_expr(rng, depth - 1);
    case 3: return random_expr(rng, depth - 1) /
                   (Expr(2.0) + cosh(random_expr(rng, depth - 2)) * Expr(0.2));
    case 4: return sin(random_expr(rng, depth - 1));
    case 5: return expr::exp(random_expr(rng, depth - 1) * Expr(0.3));
    case 6: return tanh(random_expr(rng, depth - 1));
    default: return pow(Expr(1.5) + sin(random_expr(rng, depth - 2)), 2);
  }
}

}  // namespace

TEST_CASE("parse basic shapes") {
  Expr e = parse_expr("c1*cosh(x3) + c2*sinh(x3)", kSyms);
  CHECK(e.kind() == NodeKind::Add);
  CHECK(e.child(0).kind() == NodeKind::Mul);
  CHECK(e.child(1).kind() == NodeKind::Mul);

  Expr z = parse_expr("0", kSyms);
  CHECK(z.is_number(0.0));

  CHECK_THROWS_AS(parse_expr("c1*cos(q)", kSyms), expr::ParseError);
  try {
    parse_expr("c1*cos(q)", kSyms);
  } catch (const expr::ParseError& pe) {
    CHECK(std::string(pe.what()).find("q") != std::string::npos);
    CHECK(pe.offset == 7);
  }
}

TEST_CASE("parse grammar details") {
  // right-associative power, unary minus, scientific literals
  Expr e = parse_expr("2^3^2", kSyms);
  CHECK(e.eval({}) == doctest::Approx(512.0));
  CHECK(parse_expr("-x3^2", kSyms).eval({{"x3", 3.0}}) == doctest::Approx(-9.0));
  CHECK(parse_expr("1.5e-2 + 2", kSyms).eval({}) == doctest::Approx(2.015));
  CHECK_THROWS_AS(parse_expr("sin x3", kSyms), expr::ParseError);
  CHECK_THROWS_AS(parse_expr("(x3", kSyms), expr::ParseError);
}

TEST_CASE("differentiate table rules") {
  Expr x = Expr::symbol("x3");
  CHECK(sinh(x).diff("x3").same_tree(cosh(x)));
  CHECK(Expr::symbol("c1").diff("x3").is_number(0.0));

  // quotient rule against central finite differences at random points
  Expr e = parse_expr("-1/(c1*(c1*x3+c2))", kSyms);
  Expr de = e.diff("x3");
  Expr expect = parse_expr("1/(c1*x3+c2)^2", kSyms);
  SplitMix64 rng(7);
  for (int i = 0; i < 10; ++i) {
    Bindings b;
    b.set("c1", rng.uniform(0.5, 2.0));
    b.set("c2", rng.uniform(-1.0, 1.0));
    b.set("x3", rng.uniform(1.0, 3.0));
    double fd = fd_derivative(e, b, "x3", 1e-6);
    double got = de.eval(b);
    CHECK(got == doctest::Approx(fd).epsilon(1e-6));
    CHECK(got == doctest::Approx(expect.eval(b)).epsilon(1e-10));
  }
}

TEST_CASE("simplify identity folding and power merge") {
  Expr x = Expr::symbol("x3");
  CHECK(simplify(Expr(1.0) * x + Expr(0.0)).same_tree(x));

  Expr merged = simplify(pow(x, 1) * pow(x, 2));
  CHECK(merged.same_tree(pow(x, Expr(3.0))));

  Expr untouched = sinh(x) + cosh(x);
  CHECK(simplify(untouched).same_tree(untouched));
}

TEST_CASE("evaluate values and domain errors") {
  CHECK(parse_expr("cosh(x3)", kSyms).eval({{"x3", 0.0}}) == doctest::Approx(1.0));
  Expr pole = parse_expr("1/(c1*x3+c2)", kSyms);
  CHECK_THROWS_AS(pole.eval({{"c1", 1.0}, {"c2", 0.0}, {"x3", 0.0}}), expr::EvalError);
  Expr e = parse_expr("c1*cosh(x3)+c2*sinh(x3)", kSyms);
  CHECK(e.eval({{"c1", 2.0}, {"c2", 0.0}, {"x3", 0.0}}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(parse_expr("ln(x3)", kSyms).eval({{"x3", -1.0}}), expr::EvalError);
  CHECK_THROWS_AS(Expr::symbol("q").eval({}), expr::EvalError);
}

TEST_CASE("property: derivative matches finite differences") {
  SplitMix64 rng(42);
  int done = 0;
  while (done < 60) {
    Expr e = random_expr(rng, 4);
    Expr de = e.diff("x3");
    Bindings b;
    b.set("x3", rng.uniform(-1.5, 1.5));
    b.set("x4", rng.uniform(-1.5, 1.5));
    double sym, fd;
    try {
      sym = de.eval(b);
      fd = fd_derivative(e, b, "x3", 1e-6);
    } catch (const expr::EvalError&) {
      continue;
    }
    if (!std::isfinite(sym) || !std::isfinite(fd)) continue;
    double denom = std::max({1.0, std::fabs(sym), std::fabs(fd)});
    CHECK(std::fabs(sym - fd) / denom < 1e-5);
    ++done;
  }
}

TEST_CASE("property: simplify preserves evaluation") {
  SplitMix64 rng(11);
  int done = 0;
  while (done < 100) {
    Expr e = random_expr(rng, 4);
    Expr s = simplify(e);
    Bindings b;
    b.set("x3", rng.uniform(-1.5, 1.5));
    b.set("x4", rng.uniform(-1.5, 1.5));
    double a, c;
    try {
      a = e.eval(b);
      c = s.eval(b);
    } catch (const expr::EvalError&) {
      continue;
    }
    if (!std::isfinite(a)) continue;
    CHECK(std::fabs(a - c) <= 1e-12 * std::max(1.0, std::fabs(a)));
    ++done;
  }
}

TEST_CASE("property: print/parse round-trip is the identity") {
  SplitMix64 rng(23);
  for (int i = 0; i < 60; ++i) {
    Expr e = random_expr(rng, 4);
    Expr back = parse_expr(e.str(), kSyms);
    CHECK(back.same_tree(parse_expr(back.str(), kSyms)));
    CHECK(back.same_tree(e));
  }
}

TEST_CASE("substitution") {
  Expr e = parse_expr("x3^2 + u*x3", kSyms);
  Expr sub = e.substitute("x3", Expr::symbol("u") + Expr(1.0));
  Bindings b{{"u", 2.0}};
  CHECK(sub.eval(b) == doctest::Approx(9.0 + 6.0));
}

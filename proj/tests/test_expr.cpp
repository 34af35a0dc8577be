#include <doctest.h>

#include <cmath>

#include "dwgeom/expr.hpp"

using namespace dwgeom;

namespace {

double eval1(const std::string& src, double q1) {
  PotentialExpr e = PotentialExpr::parse(src, {"q1"});
  double vals[1] = {q1};
  return e.eval(vals);
}

}  // namespace

TEST_CASE("basic potentials") {
  CHECK(eval1("0.5*q1^2", 2.0) == doctest::Approx(2.0));
  CHECK(eval1("1 - cos(q1)", 0.0) == doctest::Approx(0.0));
  CHECK(eval1("0.5*q1^2 + 0.1*q1^4", 1.0) == doctest::Approx(0.6));
}

TEST_CASE("symbolic derivative matches finite differences") {
  PotentialExpr e = PotentialExpr::parse("0.5*q1^2 + 0.1*q1^4", {"q1"});
  PotentialExpr d = e.derivative(0);
  double at[1] = {1.0};
  CHECK(d.eval(at) == doctest::Approx(1.4));
  const double h = 1e-6;
  for (double q : {-1.3, 0.2, 0.9}) {
    double lo[1] = {q - h}, hi[1] = {q + h}, mid[1] = {q};
    double fd = (e.eval(hi) - e.eval(lo)) / (2.0 * h);
    CHECK(std::abs(d.eval(mid) - fd) < 1e-8);
  }
}

TEST_CASE("chain rule through functions") {
  PotentialExpr e = PotentialExpr::parse("tanh(q1^2)", {"q1"});
  PotentialExpr d = e.derivative(0);
  double q = 0.7;
  double at[1] = {q};
  double t = std::tanh(q * q);
  CHECK(d.eval(at) == doctest::Approx((1.0 - t * t) * 2.0 * q));

  PotentialExpr g = PotentialExpr::parse("exp(sin(q1))*sqrt(q1)", {"q1"});
  PotentialExpr dg = g.derivative(0);
  const double h = 1e-6;
  double lo[1] = {q - h}, hi[1] = {q + h};
  double fd = (g.eval(hi) - g.eval(lo)) / (2.0 * h);
  CHECK(dg.eval(at) == doctest::Approx(fd).epsilon(1e-7));
}

TEST_CASE("precedence and associativity") {
  CHECK(eval1("2+3*4^2", 0.0) == doctest::Approx(50.0));
  CHECK(eval1("-q1^2", 1.0) == doctest::Approx(-1.0));
  CHECK(eval1("2^3^2", 0.0) == doctest::Approx(512.0));  // right-associative
  CHECK(eval1("2^-1", 0.0) == doctest::Approx(0.5));
  CHECK(eval1("6/3/2", 0.0) == doctest::Approx(1.0));    // left-associative
  CHECK(eval1("1-2-3", 0.0) == doctest::Approx(-4.0));
  CHECK(eval1("(1-2)-3", 0.0) == doctest::Approx(-4.0));
  CHECK(eval1("1-(2-3)", 0.0) == doctest::Approx(2.0));
}

TEST_CASE("print-parse round trip is a fixed point") {
  for (const char* src : {"0.5*q1^2", "1 - cos(q1)", "-q1^2", "(-q1)^2", "2+3*4^2",
                          "q1/(1+q1^2)", "exp(-q1^2/2)", "2^3^2", "1-2-3", "1-(2-3)",
                          "sqrt(q1^2+1)*tanh(q1)", "-(q1+1)"}) {
    PotentialExpr once = PotentialExpr::parse(src, {"q1"});
    std::string printed = once.print();
    PotentialExpr twice = PotentialExpr::parse(printed, {"q1"});
    CHECK(twice.print() == printed);
    double at[1] = {0.37};
    CHECK(once.eval(at) == doctest::Approx(twice.eval(at)));
  }
}

TEST_CASE("syntax errors carry byte offsets") {
  try {
    PotentialExpr::parse("0.5*q1^^2", {"q1"});
    FAIL("expected a parse error");
  } catch (const expr_parse_error& e) {
    CHECK(e.offset == 7);  // the second '^'
    CHECK(!e.expected.empty());
  }

  try {
    PotentialExpr::parse("0.5*(q1+1", {"q1"});
    FAIL("expected a parse error");
  } catch (const expr_parse_error& e) {
    CHECK(e.offset == 9);
    CHECK(e.expected.find(")") != std::string::npos);
  }

  try {
    PotentialExpr::parse("q1 q1", {"q1"});
    FAIL("expected a parse error");
  } catch (const expr_parse_error& e) {
    CHECK(e.offset == 3);
  }
}

TEST_CASE("unknown identifiers are rejected with their position") {
  try {
    PotentialExpr::parse("0.5*phi^2", {"q1"});
    FAIL("expected a parse error");
  } catch (const expr_parse_error& e) {
    CHECK(e.offset == 4);
    CHECK(std::string(e.what()).find("phi") != std::string::npos);
  }
}

TEST_CASE("domain errors surface as evaluation errors") {
  double neg[1] = {-2.0};
  CHECK_THROWS_AS(PotentialExpr::parse("sqrt(q1)", {"q1"}).eval(neg), expr_eval_error);
  double zero[1] = {0.0};
  CHECK_THROWS_AS(PotentialExpr::parse("log(q1)", {"q1"}).eval(zero), expr_eval_error);
  CHECK_THROWS_AS(PotentialExpr::parse("1/q1", {"q1"}).eval(zero), expr_eval_error);
  // Total on finite inputs otherwise.
  double big[1] = {37.5};
  CHECK(std::isfinite(PotentialExpr::parse("tanh(q1)+exp(-q1)", {"q1"}).eval(big)));
}

TEST_CASE("multiple variables") {
  PotentialExpr e = PotentialExpr::parse("x1*q1 + sin(x2)", {"x1", "x2", "q1"});
  double at[3] = {2.0, 0.0, 3.0};
  CHECK(e.eval(at) == doctest::Approx(6.0));
  PotentialExpr dx1 = e.derivative(0);
  CHECK(dx1.eval(at) == doctest::Approx(3.0));
  PotentialExpr dq = e.derivative(2);
  CHECK(dq.eval(at) == doctest::Approx(2.0));
}

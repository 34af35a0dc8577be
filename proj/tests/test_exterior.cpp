#include <doctest.h>

#include <random>

#include "dwgeom/chart.hpp"
#include "dwgeom/exterior.hpp"
#include "dwgeom/form_field.hpp"
#include "dwgeom/phase_space.hpp"
#include "oracles.hpp"

using namespace dwgeom;

namespace {

Form random_int_form(int dim, int degree, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coeff(-3, 3);
  Form f(dim, degree);
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << dim); ++m)
    if (std::popcount(m) == degree) f.add(m, coeff(rng));
  return f;
}

Multivector random_int_vector(int dim, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coeff(-3, 3);
  Multivector v(dim, 1);
  for (int k = 0; k < dim; ++k) v.add(std::uint64_t{1} << k, coeff(rng));
  return v;
}

}  // namespace

TEST_CASE("odd-degree self-wedge vanishes") {
  ChartSpec spec(1, 1);
  Form dq = Form::basis_covector(spec.dim(), spec.q_index(0));
  CHECK(wedge(dq, dq).is_zero());
}

TEST_CASE("1-form wedge anticommutes coefficientwise") {
  ChartSpec spec(1, 1);
  Form dq = Form::basis_covector(spec.dim(), spec.q_index(0));
  Form dp = Form::basis_covector(spec.dim(), spec.p_index());
  CHECK(max_abs_diff(wedge(dq, dp), -1.0 * wedge(dp, dq)) == 0.0);
}

TEST_CASE("contracted volume forms at n = 2") {
  ChartSpec spec(2, 1);
  Form d2x_1 = volume_form_contracted(spec, 0);
  Form d2x_2 = volume_form_contracted(spec, 1);
  Form dx1 = Form::basis_covector(spec.dim(), spec.x_index(0));
  Form dx2 = Form::basis_covector(spec.dim(), spec.x_index(1));
  CHECK(max_abs_diff(d2x_1, dx2) == 0.0);
  CHECK(max_abs_diff(d2x_2, -1.0 * dx1) == 0.0);

  // dx^mu ^ d^2x_nu = delta^mu_nu dx^1 ^ dx^2
  Form vol = volume_form(spec);
  CHECK(max_abs_diff(wedge(dx1, d2x_1), vol) == 0.0);
  CHECK(max_abs_diff(wedge(dx2, d2x_2), vol) == 0.0);
  CHECK(wedge(dx1, d2x_2).is_zero());
  CHECK(wedge(dx2, d2x_1).is_zero());
}

TEST_CASE("basis contractions") {
  ChartSpec spec(1, 1);
  Form dq = Form::basis_covector(spec.dim(), spec.q_index(0));
  Form dp = Form::basis_covector(spec.dim(), spec.p_index());
  Multivector dq_dir = Multivector::basis_vector(spec.dim(), spec.q_index(0));
  CHECK(max_abs_diff(contract(dq_dir, wedge(dq, dp)), dp) == 0.0);

  ChartSpec spec2(2, 1);
  Multivector d1 = Multivector::basis_vector(spec2.dim(), 0);
  Multivector d2 = Multivector::basis_vector(spec2.dim(), 1);
  Form result = contract(wedge(d1, d2), volume_form(spec2));
  CHECK(result.degree() == 0);
  CHECK(result.coeff(0) == doctest::Approx(1.0));
}

TEST_CASE("iterated contraction equals nested single contractions") {
  std::mt19937_64 rng(7);
  const int D = 6;
  for (int trial = 0; trial < 50; ++trial) {
    Multivector z1 = random_int_vector(D, rng);
    Multivector z2 = random_int_vector(D, rng);
    Form alpha = random_int_form(D, 3, rng);
    Form lhs = contract(wedge(z1, z2), alpha);
    Form rhs = contract(z2, contract(z1, alpha));
    CHECK(max_abs_diff(lhs, rhs) == 0.0);

    // Independent check against the antisymmetrized-sum evaluator: the
    // remaining slot is probed with every basis direction.
    std::vector<double> v1 = oracles::components(z1, D);
    std::vector<double> v2 = oracles::components(z2, D);
    for (int k = 0; k < D; ++k) {
      std::vector<double> probe(D, 0.0);
      probe[k] = 1.0;
      double expected = oracles::evaluate_form(alpha, {v1, v2, probe});
      double got = oracles::evaluate_form(lhs, {probe});
      CHECK(got == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("wedge graded anticommutativity on random pairs") {
  std::mt19937_64 rng(11);
  const int D = 6;
  std::uniform_int_distribution<int> deg(1, 2);
  for (int trial = 0; trial < 200; ++trial) {
    int ra = deg(rng), rb = deg(rng);
    Form a = random_int_form(D, ra, rng);
    Form b = random_int_form(D, rb, rng);
    double sign = (ra * rb) % 2 == 0 ? 1.0 : -1.0;
    CHECK(max_abs_diff(wedge(a, b), sign * wedge(b, a)) == 0.0);
  }
}

TEST_CASE("wedge associativity on random triples") {
  std::mt19937_64 rng(13);
  const int D = 6;
  for (int trial = 0; trial < 50; ++trial) {
    Form a = random_int_form(D, 1, rng);
    Form b = random_int_form(D, 1, rng);
    Form c = random_int_form(D, 2, rng);
    CHECK(max_abs_diff(wedge(wedge(a, b), c), wedge(a, wedge(b, c))) == 0.0);
  }
}

TEST_CASE("degree-1 contraction is a graded derivation") {
  std::mt19937_64 rng(17);
  const int D = 6;
  for (int trial = 0; trial < 50; ++trial) {
    Multivector z = random_int_vector(D, rng);
    Form a = random_int_form(D, 2, rng);
    Form b = random_int_form(D, 1, rng);
    Form lhs = contract(z, wedge(a, b));
    Form rhs = wedge(contract(z, a), b) + wedge(a, contract(z, b));  // (-1)^2 = +1
    CHECK(max_abs_diff(lhs, rhs) == 0.0);

    // Odd-degree first factor flips the sign of the second term.
    Form a1 = random_int_form(D, 1, rng);
    Form b2 = random_int_form(D, 2, rng);
    Form lhs_odd = contract(z, wedge(a1, b2));
    Form rhs_odd = wedge(contract(z, a1), b2) - wedge(a1, contract(z, b2));
    CHECK(max_abs_diff(lhs_odd, rhs_odd) == 0.0);
  }
}

TEST_CASE("wedge_all detects dependence and matches minor determinants") {
  std::mt19937_64 rng(19);
  const int D = 4;
  Multivector z = random_int_vector(D, rng);
  std::vector<Multivector> same{z, z};
  CHECK(wedge_all(same).is_zero());

  std::vector<Multivector> basis{Multivector::basis_vector(D, 0),
                                 Multivector::basis_vector(D, 1)};
  Multivector b01 = wedge_all(basis);
  CHECK(b01.coeff(0b0011) == doctest::Approx(1.0));
  CHECK(b01.coeffs().size() == 1);

  for (int trial = 0; trial < 20; ++trial) {
    Multivector u = random_int_vector(D, rng);
    Multivector v = random_int_vector(D, rng);
    Multivector w = wedge(u, v);
    std::vector<std::vector<double>> rows{oracles::components(u, D),
                                          oracles::components(v, D)};
    bool independent = false;
    for (std::uint64_t m = 0; m < 16; ++m) {
      if (std::popcount(m) != 2) continue;
      double minor = oracles::wedge_coefficient(rows, m);
      CHECK(w.coeff(m) == doctest::Approx(minor));
      if (minor != 0.0) independent = true;
    }
    CHECK(w.is_zero() == !independent);
    // Plucker relation for decomposable 2-vectors in 4 dimensions.
    double p01 = w.coeff(0b0011), p02 = w.coeff(0b0101), p03 = w.coeff(0b1001);
    double p12 = w.coeff(0b0110), p13 = w.coeff(0b1010), p23 = w.coeff(0b1100);
    CHECK(p01 * p23 - p02 * p13 + p03 * p12 == doctest::Approx(0.0));
  }
}

TEST_CASE("degree and chart guards") {
  Form a(4, 3), b(4, 2);
  CHECK_THROWS_AS(wedge(a, b), algebra_error);
  Form c(5, 1);
  CHECK_THROWS_AS(wedge(a, c), algebra_error);
  Multivector z(4, 3);
  z.set(0b0111, 1.0);
  Form f(4, 2);
  f.set(0b0011, 1.0);
  CHECK_THROWS_AS(contract(z, f), algebra_error);
}

TEST_CASE("exterior derivative of a constant field vanishes") {
  FormField f;
  f.dim = 4;
  f.degree = 1;
  f.eval = [](std::span<const double>) {
    Form out(4, 1);
    out.set(0b0001, 2.5);
    out.set(0b0100, -1.0);
    return out;
  };
  std::vector<double> at{0.3, -0.2, 1.1, 0.0};
  CHECK(exterior_derivative(f, at).max_abs_coeff() == doctest::Approx(0.0));
}

TEST_CASE("finite-difference d matches a hand-derived polynomial differential") {
  // f = (x0^2 x1) dx0 + (x1 x2) dx2 over dimension 3:
  // df = x0^2 dx1 ^ dx0 + x2 dx1 ^ dx2 = -x0^2 dx0 ^ dx1 + x2 dx1 ^ dx2.
  FormField f;
  f.dim = 3;
  f.degree = 1;
  f.eval = [](std::span<const double> at) {
    Form out(3, 1);
    out.set(0b001, at[0] * at[0] * at[1]);
    out.set(0b100, at[1] * at[2]);
    return out;
  };
  std::vector<double> at{0.7, -0.4, 1.3};
  Form expected(3, 2);
  expected.set(0b011, -at[0] * at[0]);
  expected.set(0b110, at[2]);
  Form got = exterior_derivative(f, at);
  CHECK(max_abs_diff(got, expected) < 1e-9);

  // d(d f) at finite-difference tolerance.
  FormField df;
  df.dim = 3;
  df.degree = 2;
  df.eval = [f](std::span<const double> p) { return exterior_derivative(f, p, 1e-4); };
  CHECK(exterior_derivative(df, at, 1e-4).max_abs_coeff() < 1e-6);
}

TEST_CASE("analytic and finite-difference derivatives agree on smooth fields") {
  ChartSpec spec(2, 1);
  FormField theta = theta_field(spec);
  FormField theta_fd = theta;
  theta_fd.partial = nullptr;
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double step = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> at(spec.dim());
    for (double& v : at) v = unit(rng);
    Form a = exterior_derivative(theta, at, step);
    Form b = exterior_derivative(theta_fd, at, step);
    double scale = std::max(1.0, a.max_abs_coeff());
    CHECK(max_abs_diff(a, b) / scale < 10.0 * step * step);
  }
}

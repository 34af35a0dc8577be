#include <doctest.h>

#include <random>

#include "dwgeom/dedonder_weyl.hpp"
#include "dwgeom/phase_space.hpp"
#include "dwgeom/theory.hpp"
#include "oracles.hpp"

using namespace dwgeom;

TEST_CASE("theta coefficients on the mechanics chart") {
  ChartSpec spec(1, 1);
  ChartPoint pt = ChartPoint::zero(spec);
  pt.x = {0.4};
  pt.q = {1.2};
  pt.pmom = {0.7};  // p_q
  pt.p = -2.5;      // p = -E, E = 2.5

  Form theta = build_theta(spec, pt);
  // theta = p_q dq - p dt: coefficient p_q on dq, -p (= E) on dt.
  CHECK(theta.coeff(std::uint64_t{1} << spec.q_index(0)) == doctest::Approx(0.7));
  CHECK(theta.coeff(std::uint64_t{1} << spec.x_index(0)) == doctest::Approx(2.5));
  CHECK(theta.coeffs().size() == 2);
}

TEST_CASE("theta vanishes with zero momenta") {
  ChartSpec spec(2, 2);
  CHECK(build_theta(spec, ChartPoint::zero(spec)).is_zero());
}

TEST_CASE("theta at n = 2 picks up the d^2x_mu sign") {
  ChartSpec spec(2, 1);
  ChartPoint pt = ChartPoint::zero(spec);
  pt.pm(spec, 0, 0) = 3.0;  // p^1_1
  Form theta = build_theta(spec, pt);
  // 3 dq ^ d^2x_1 = 3 dq ^ dx^2 = -3 dx^2 ^ dq.
  std::uint64_t mask = (std::uint64_t{1} << spec.x_index(1)) | (std::uint64_t{1} << spec.q_index(0));
  CHECK(theta.coeff(mask) == doctest::Approx(-3.0));
  CHECK(theta.coeffs().size() == 1);
}

TEST_CASE("omega on the mechanics chart") {
  ChartSpec spec(1, 1);
  Form omega = omega_form(spec);
  // dq ^ dp_q + dp ^ dt = dq ^ dp_q - dt ^ dp in canonical order.
  std::uint64_t m_qp = (std::uint64_t{1} << spec.q_index(0)) | (std::uint64_t{1} << spec.p_index(0, 0));
  std::uint64_t m_tp = (std::uint64_t{1} << spec.x_index(0)) | (std::uint64_t{1} << spec.p_index());
  CHECK(omega.coeff(m_qp) == doctest::Approx(1.0));
  CHECK(omega.coeff(m_tp) == doctest::Approx(-1.0));
  CHECK(omega.coeffs().size() == 2);
}

TEST_CASE("omega has N*n + 1 nonzero coefficients") {
  for (int n = 1; n <= 3; ++n)
    for (int N = 1; N <= 2; ++N)
      CHECK(omega_form(ChartSpec(n, N)).coeffs().size() ==
            static_cast<std::size_t>(N * n + 1));
}

TEST_CASE("omega equals -dTheta exactly and by finite differences") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int n = 1; n <= 3; ++n) {
    for (int N = 1; N <= 2; ++N) {
      ChartSpec spec(n, N);
      Form omega = omega_form(spec);
      FormField theta = theta_field(spec);
      FormField theta_fd = theta;
      theta_fd.partial = nullptr;
      for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> at(spec.dim());
        for (double& v : at) v = unit(rng);
        CHECK(max_abs_diff(-1.0 * exterior_derivative(theta, at), omega) == 0.0);
        CHECK(max_abs_diff(-1.0 * exterior_derivative(theta_fd, at), omega) < 1e-8);
      }
    }
  }
}

TEST_CASE("omega is constant and closed") {
  ChartSpec spec(2, 1);
  FormField omega = build_omega(spec);
  std::vector<double> a(spec.dim(), 0.25), b(spec.dim(), -1.75);
  CHECK(max_abs_diff(omega(a), omega(b)) == 0.0);
  CHECK(exterior_derivative(omega, a).max_abs_coeff() < 1e-8);

  FormField omega_fd = omega;
  omega_fd.partial = nullptr;
  CHECK(exterior_derivative(omega_fd, a).max_abs_coeff() < 1e-8);
}

TEST_CASE("nondegeneracy on the mechanics chart is the rank-4 pairing") {
  NondegeneracyReport rep = nondegeneracy_check(ChartSpec(1, 1), 10);
  CHECK(rep.full_rank);
  // Columns of v -> i_v omega are signed basis forms, so every singular
  // value is exactly 1.
  CHECK(rep.sigma_min == doctest::Approx(1.0));
  CHECK(rep.min_sample_ratio > 0.0);
}

TEST_CASE("deleting the dp^d^nx term opens the d/dp kernel") {
  ChartSpec spec(2, 1);
  Form broken = omega_form(spec);
  broken -= wedge(Form::basis_covector(spec.dim(), spec.p_index()), volume_form(spec));
  NondegeneracyReport rep = nondegeneracy_check(broken, 5);
  CHECK_FALSE(rep.full_rank);
  REQUIRE(rep.kernel.size() == static_cast<std::size_t>(spec.dim()));
  CHECK(std::abs(rep.kernel[spec.p_index()]) == doctest::Approx(1.0));
}

TEST_CASE("nondegeneracy sweep with an independent rank oracle at D = 6") {
  for (int n = 1; n <= 3; ++n)
    for (int N = 1; N <= 2; ++N) CHECK(nondegeneracy_check(ChartSpec(n, N), 5).full_rank);

  // Brute-force Gram determinant for the n = 2, N = 1 chart.
  ChartSpec spec(2, 1);
  Form omega = omega_form(spec);
  const int D = spec.dim();
  std::vector<Form> cols;
  for (int k = 0; k < D; ++k) cols.push_back(contract(Multivector::basis_vector(D, k), omega));
  std::vector<std::uint64_t> masks;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << D); ++m)
    if (std::popcount(m) == 2) masks.push_back(m);
  std::vector<std::vector<double>> gram(D, std::vector<double>(D, 0.0));
  for (int a = 0; a < D; ++a)
    for (int b = 0; b < D; ++b)
      for (std::uint64_t m : masks) gram[a][b] += cols[a].coeff(m) * cols[b].coeff(m);
  CHECK(oracles::det(gram) > 0.5);
}

TEST_CASE("projection to the configuration space") {
  ChartSpec spec(2, 1);
  ChartPoint pt = ChartPoint::zero(spec);
  pt.x = {0.1, 0.2};
  pt.q = {3.0};
  pt.pm(spec, 0, 0) = 5.0;
  pt.p = -1.0;
  ConfigPoint e = project_to_E(pt);
  CHECK(e.x == pt.x);
  CHECK(e.q == pt.q);

  // Re-embedding with zero momenta and projecting again is idempotent.
  ChartPoint back = ChartPoint::zero(spec);
  back.x = e.x;
  back.q = e.q;
  ConfigPoint e2 = project_to_E(back);
  CHECK(e2.x == e.x);
  CHECK(e2.q == e.q);

  // Legendre lift keeps the jet's (x, q).
  Theory th = make_free_scalar(1.0);
  JetPoint j;
  j.x = {0.3, -0.4};
  j.q = {1.5};
  j.v = {2.0, 1.0};
  ConfigPoint pe = project_to_E(legendre_transform(th.L, j));
  CHECK(pe.x == j.x);
  CHECK(pe.q == j.q);
}

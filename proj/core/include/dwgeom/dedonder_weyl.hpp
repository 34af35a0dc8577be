#pragma once

#include <random>

#include "dwgeom/exterior.hpp"
#include "dwgeom/phase_space.hpp"
#include "dwgeom/theory.hpp"

namespace dwgeom {

struct singular_lagrangian_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Covariant Legendre transform of a jet:
///   p^mu_i = dL/dq^i_mu,  p = L - (dL/dq^i_mu) q^i_mu,  (x, q) copied.
ChartPoint legendre_transform(const LagrangianDensity& L, const JetPoint& j);

/// Newton inversion of p^mu_i = dL/dq^i_mu(x, q, v) for v. Throws
/// singular_lagrangian_error when Newton fails to converge in 50 iterations.
JetPoint invert_polymomenta(const LagrangianDensity& L, Coords x, Coords q, Coords pmom);

/// H(x, q, p) = p^mu_i v^i_mu - L with v from invert_polymomenta. Partials
/// come from the envelope identities dH/dp = v, dH/dq = -dL/dq; the explicit
/// x-derivative falls back to central differences of L.
DWHamiltonian hamiltonian_from_lagrangian(const LagrangianDensity& L);

struct DwRhs {
  std::vector<double> dq_dx;  // n*N, mu-major: dH/dp^mu_i
  std::vector<double> div_p;  // N: -dH/dq^i, the prescribed value of d_mu p^mu_i
};

DwRhs dw_rhs(const DWHamiltonian& H, Coords x, Coords q, Coords pmom);

/// Trace-free gauge freedom (Z'_mu)^nu_i in the momentum components of X_h:
/// only the divergence d_mu p^mu_i is fixed by the field equations.
class Gauge {
 public:
  Gauge(int n, int N) : n_(n), N_(N), a_(static_cast<std::size_t>(n) * n * N, 0.0) {}

  static Gauge zero(int n, int N) { return Gauge(n, N); }
  static Gauge random(int n, int N, std::mt19937_64& rng, double scale = 1.0);

  int n() const { return n_; }
  int N() const { return N_; }
  double& at(int mu, int nu, int i) { return a_[(mu * n_ + nu) * N_ + i]; }
  double at(int mu, int nu, int i) const { return a_[(mu * n_ + nu) * N_ + i]; }

  /// Throws when sum_mu (Z'_mu)^mu_i != 0 for some i.
  void validate() const;

 private:
  int n_, N_;
  std::vector<double> a_;
};

/// Separable Hamiltonian n-vectorfield X_h = Z_1 ^ ... ^ Z_n with the
/// maximal-rank normalization: the x-part of Z_mu is exactly d/dx^mu.
struct HamiltonianMultivector {
  std::vector<Multivector> Z;  // n degree-1 factors
  Gauge gauge;                 // the trace-free momentum freedom used
  Multivector assembled;       // their wedge, degree n

  HamiltonianMultivector() : gauge(1, 1), assembled(1, 0) {}
};

/// Builds X_h at a point:
///   (Z_mu)^i    = dH/dp^mu_i
///   (Z_mu)^nu_i = -(1/n) delta^nu_mu dH/dq^i + (Z'_mu)^nu_i
///   (Z_mu)_0    solved exactly from the dx-components of the defining
///               relation (they are diagonal in (Z_mu)_0).
HamiltonianMultivector build_hamiltonian_nvector(const DWHamiltonian& H, const ChartPoint& at,
                                                 const Gauge& gauge);

/// The differential of the Hamiltonian zero-form paired with X_h by
/// i_{X_h} omega = dh. With the slot convention i_{Z_1^...^Z_r}a =
/// a(Z_1,...,Z_r, .) and the chart's omega, the zero-form reproducing
/// Hamilton's equations at n = 1 is h = (-1)^{n+1} (H - p); the orientation
/// factor keeps the p-pairing consistent for every n. `include_p_term`
/// exists so callers can probe the necessity of the p-dependence.
Form hamiltonian_differential(const DWHamiltonian& H, const ChartPoint& at,
                              bool include_p_term = true);

struct DefiningRelationReport {
  double residual = 0.0;  // max |coefficient| of i_X omega - dh
  bool pass = false;      // residual < 1e-8
};

DefiningRelationReport verify_defining_relation(const DWHamiltonian& H,
                                                const HamiltonianMultivector& X,
                                                const ChartPoint& at,
                                                bool include_p_term = true);

/// Three consecutive time levels of a periodic 1+1D grid solution, used to
/// finite-difference the tangent vectors of the lifted solution.
struct GridPatchView {
  std::span<const double> phi_prev, phi_mid, phi_next;
  std::span<const double> pi_prev, pi_mid, pi_next;  // pi^t
  double dx = 0.0;
  double dt = 0.0;  // spacing between the levels
};

struct LiftResiduals {
  double dq_time = 0.0;   // |d_t phi - dH/dp^t|
  double dq_space = 0.0;  // |d_x phi - dH/dp^x|
  double trace = 0.0;     // |d_t pi^t + d_x pi^x + dH/dq|
  double max() const;
};

/// Checks the lifted-solution tangent components against the X_h component
/// equations at one interior node. Throws on a time-boundary node.
LiftResiduals lift_solution_tangent(const DWHamiltonian& H, const GridPatchView& patch,
                                    int node);

/// Solves dH/dp^x(q, (p^t, p^x)) = slope for the spatial momentum p^x
/// (1D Newton; closed form in one step for quadratic kinetic terms).
double spatial_momentum_from_slope(const DWHamiltonian& H, double q, double pi_t,
                                   double slope);

}  // namespace dwgeom

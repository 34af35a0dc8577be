#pragma once

#include <functional>
#include <span>
#include <string>

#include "dwgeom/chart.hpp"

namespace dwgeom {

using Coords = std::span<const double>;

/// Lagrangian density on first-jet coordinates (x^mu, q^i, q^i_mu) with
/// analytic first derivatives. `regular` asserts that the velocity Hessian is
/// invertible on the working domain; it is theory metadata, not detected.
struct LagrangianDensity {
  int n = 0;
  int N = 0;
  bool regular = true;
  std::function<double(Coords x, Coords q, Coords v)> value;
  std::function<double(Coords x, Coords q, Coords v, int i)> d_q;
  std::function<double(Coords x, Coords q, Coords v, int mu, int i)> d_v;

  double operator()(const JetPoint& j) const { return value(j.x, j.q, j.v); }
};

/// De Donder-Weyl Hamiltonian H(x^mu, q^i, p^mu_i) with analytic partials.
/// Independent of the chart coordinate p by construction.
struct DWHamiltonian {
  int n = 0;
  int N = 0;
  std::function<double(Coords x, Coords q, Coords p)> value;
  std::function<double(Coords x, Coords q, Coords p, int mu)> d_x;
  std::function<double(Coords x, Coords q, Coords p, int i)> d_q;
  std::function<double(Coords x, Coords q, Coords p, int mu, int i)> d_p;
};

/// A named scalar field theory (N = 1) with standard kinetic term in
/// signature (+,-,...,-): L = 1/2 (q_1)^2 - 1/2 sum_{mu>1} (q_mu)^2 - V(q).
struct Theory {
  std::string name;
  int n = 0;
  int N = 1;
  double mass = 0.0;
  LagrangianDensity L;
  DWHamiltonian H;
  std::function<double(double)> V;
  std::function<double(double)> dV;

  ChartSpec chart() const { return ChartSpec(n, N); }
};

/// Scalar theory with the standard kinetic term and the given potential.
Theory make_scalar_theory(std::string name, int n, std::function<double(double)> V,
                          std::function<double(double)> dV);

Theory make_oscillator();               // n = 1, V = q^2/2
Theory make_free_scalar(double mass);   // n = 2, V = m^2 q^2 / 2
Theory make_sine_gordon();              // n = 2, V = 1 - cos q

/// Looks up a builtin by name: "oscillator", "free-scalar", "sine-gordon".
/// mass applies to "free-scalar" only.
Theory builtin_theory(const std::string& name, double mass = 1.0);

}  // namespace dwgeom

#pragma once

#include <iosfwd>

#include "dwgeom/dedonder_weyl.hpp"
#include "dwgeom/theory.hpp"

namespace dwgeom {

struct divergence_error : std::runtime_error {
  divergence_error(const std::string& what, double t_fail)
      : std::runtime_error(what), t(t_fail) {}
  double t;
};

struct GridSpec {
  int Nx = 0;       // spatial points; Nx == 1 selects mechanics mode
  double dx = 0.0;  // spacing
  double dt = 0.0;  // time step
  double T = 0.0;   // final time
  double cfl = 1.0;

  double length() const { return Nx * dx; }
  bool cfl_ok() const { return Nx == 1 || dt <= cfl * dx; }
  /// Shape validation. CFL is a separate, advisory guard (cfl_ok) so that a
  /// deliberately unstable run can still be launched to exercise the
  /// divergence detection.
  void check() const;
};

/// Discretized field phi and temporal polymomentum pi^t on a periodic grid.
struct FieldState {
  double t = 0.0;
  std::vector<double> phi;
  std::vector<double> pi0;

  bool finite() const;
};

/// One explicit RK4 step of the method-of-lines system
///   d_t phi  = dH/dp^t,
///   d_t pi^t = -dH/dq - d_x pi^x,
/// with pi^x reconstructed pointwise from the constraint dH/dp^x = d_x phi.
FieldState step(const Theory& th, const FieldState& s, const GridSpec& grid);

struct Trajectory {
  double sample_dt = 0.0;
  std::vector<FieldState> samples;
  std::vector<double> energies;  // conserved functional per sample
};

Trajectory evolve(const Theory& th, FieldState s0, const GridSpec& grid,
                  int sample_every = 1);

/// Independent cross-check: leapfrog integration of phi_tt = phi_xx - V'(phi)
/// on a compact stencil. Shares nothing with step() except the potential.
Trajectory euler_lagrange_oracle(const Theory& th, const FieldState& s0, const GridSpec& grid,
                                 int sample_every = 1);

/// Conserved functional sum_x (pi^t^2/2 + (d_x phi)^2/2 + V(phi)) dx
/// (the plain Hamiltonian for mechanics mode).
double total_energy(const Theory& th, const FieldState& s, const GridSpec& grid);

/// pi^x per node, reconstructed from the spatial constraint.
std::vector<double> spatial_momenta(const Theory& th, const FieldState& s, const GridSpec& grid);

/// Lifted-tangent residuals from three consecutive trajectory samples.
/// Throws std::out_of_range at a time-boundary sample.
LiftResiduals lift_residuals_at(const Theory& th, const Trajectory& traj, const GridSpec& grid,
                                int time_index, int node);

FieldState plane_wave_state(const GridSpec& grid, double amplitude, int mode, double mass,
                            double t0 = 0.0);
FieldState standing_wave_state(const GridSpec& grid, double amplitude, int mode, double mass,
                               double t0 = 0.0);
FieldState gaussian_state(const GridSpec& grid, double amplitude, double width);
FieldState mechanics_state(double q0, double p0);

/// Exact plane-wave value A cos(kx - w t) with w^2 = k^2 + m^2.
double plane_wave_value(double amplitude, double k, double mass, double x, double t);

/// Columns: t, x, phi, pi0, pi1, energy-density; one row per (sample, node).
void write_trajectory_csv(std::ostream& os, const Theory& th, const GridSpec& grid,
                          const Trajectory& traj);

}  // namespace dwgeom

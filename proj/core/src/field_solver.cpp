#include "dwgeom/field_solver.hpp"

#include <cmath>
#include <ostream>

#include "dwgeom/csv.hpp"

namespace dwgeom {

void GridSpec::check() const {
  if (Nx != 1 && Nx < 8) throw std::invalid_argument("grid needs Nx >= 8 (or Nx == 1 for mechanics)");
  if (dx <= 0.0 || dt <= 0.0 || T <= 0.0) throw std::invalid_argument("grid spacings must be positive");
  if (cfl <= 0.0 || cfl > 1.0) throw std::invalid_argument("cfl must lie in (0, 1]");
}

bool FieldState::finite() const {
  for (double v : phi)
    if (!std::isfinite(v)) return false;
  for (double v : pi0)
    if (!std::isfinite(v)) return false;
  return true;
}

namespace {

struct Rhs {
  std::vector<double> dphi;
  std::vector<double> dpi0;
};

// Method-of-lines right-hand side; pi^x is eliminated through the pointwise
// spatial constraint each evaluation, so the constraint holds at all stages.
Rhs eval_rhs(const Theory& th, const std::vector<double>& phi, const std::vector<double>& pi0,
             const GridSpec& grid) {
  const int Nx = grid.Nx;
  Rhs r;
  r.dphi.assign(Nx, 0.0);
  r.dpi0.assign(Nx, 0.0);
  std::vector<double> x0(th.n, 0.0);

  if (th.n == 1) {
    std::vector<double> q{phi[0]}, p{pi0[0]};
    r.dphi[0] = th.H.d_p(x0, q, p, 0, 0);
    r.dpi0[0] = -th.H.d_q(x0, q, p, 0);
    return r;
  }

  auto wrap = [Nx](int j) { return ((j % Nx) + Nx) % Nx; };
  std::vector<double> px(Nx, 0.0);
  for (int j = 0; j < Nx; ++j) {
    double slope = (phi[wrap(j + 1)] - phi[wrap(j - 1)]) / (2.0 * grid.dx);
    px[j] = spatial_momentum_from_slope(th.H, phi[j], pi0[j], slope);
  }
  for (int j = 0; j < Nx; ++j) {
    std::vector<double> q{phi[j]}, p{pi0[j], px[j]};
    r.dphi[j] = th.H.d_p(x0, q, p, 0, 0);
    double div_px = (px[wrap(j + 1)] - px[wrap(j - 1)]) / (2.0 * grid.dx);
    r.dpi0[j] = -th.H.d_q(x0, q, p, 0) - div_px;
  }
  return r;
}

}  // namespace

FieldState step(const Theory& th, const FieldState& s, const GridSpec& grid) {
  if (!s.finite()) throw divergence_error("state is not finite", s.t);
  const int Nx = grid.Nx;
  const double dt = grid.dt;

  auto axpy = [Nx](const std::vector<double>& base, double a, const std::vector<double>& d) {
    std::vector<double> out(Nx);
    for (int j = 0; j < Nx; ++j) out[j] = base[j] + a * d[j];
    return out;
  };

  Rhs k1 = eval_rhs(th, s.phi, s.pi0, grid);
  Rhs k2 = eval_rhs(th, axpy(s.phi, 0.5 * dt, k1.dphi), axpy(s.pi0, 0.5 * dt, k1.dpi0), grid);
  Rhs k3 = eval_rhs(th, axpy(s.phi, 0.5 * dt, k2.dphi), axpy(s.pi0, 0.5 * dt, k2.dpi0), grid);
  Rhs k4 = eval_rhs(th, axpy(s.phi, dt, k3.dphi), axpy(s.pi0, dt, k3.dpi0), grid);

  FieldState out;
  out.t = s.t + dt;
  out.phi.resize(Nx);
  out.pi0.resize(Nx);
  for (int j = 0; j < Nx; ++j) {
    out.phi[j] = s.phi[j] + dt / 6.0 * (k1.dphi[j] + 2.0 * k2.dphi[j] + 2.0 * k3.dphi[j] + k4.dphi[j]);
    out.pi0[j] = s.pi0[j] + dt / 6.0 * (k1.dpi0[j] + 2.0 * k2.dpi0[j] + 2.0 * k3.dpi0[j] + k4.dpi0[j]);
  }
  if (!out.finite()) throw divergence_error("time step diverged", out.t);
  return out;
}

double total_energy(const Theory& th, const FieldState& s, const GridSpec& grid) {
  const int Nx = grid.Nx;
  if (th.n == 1) {
    std::vector<double> x0(1, 0.0), q{s.phi[0]}, p{s.pi0[0]};
    return th.H.value(x0, q, p);
  }
  auto wrap = [Nx](int j) { return ((j % Nx) + Nx) % Nx; };
  double e = 0.0;
  for (int j = 0; j < Nx; ++j) {
    double slope = (s.phi[wrap(j + 1)] - s.phi[wrap(j - 1)]) / (2.0 * grid.dx);
    e += 0.5 * s.pi0[j] * s.pi0[j] + 0.5 * slope * slope + th.V(s.phi[j]);
  }
  return e * grid.dx;
}

std::vector<double> spatial_momenta(const Theory& th, const FieldState& s, const GridSpec& grid) {
  const int Nx = grid.Nx;
  std::vector<double> px(Nx, 0.0);
  if (th.n == 1) return px;
  auto wrap = [Nx](int j) { return ((j % Nx) + Nx) % Nx; };
  for (int j = 0; j < Nx; ++j) {
    double slope = (s.phi[wrap(j + 1)] - s.phi[wrap(j - 1)]) / (2.0 * grid.dx);
    px[j] = spatial_momentum_from_slope(th.H, s.phi[j], s.pi0[j], slope);
  }
  return px;
}

Trajectory evolve(const Theory& th, FieldState s0, const GridSpec& grid, int sample_every) {
  grid.check();
  if (sample_every < 1) throw std::invalid_argument("sample_every must be >= 1");
  const int steps = static_cast<int>(std::llround(grid.T / grid.dt));
  Trajectory traj;
  traj.sample_dt = sample_every * grid.dt;
  traj.samples.push_back(s0);
  traj.energies.push_back(total_energy(th, s0, grid));
  FieldState s = std::move(s0);
  for (int k = 1; k <= steps; ++k) {
    s = step(th, s, grid);
    if (k % sample_every == 0) {
      traj.samples.push_back(s);
      traj.energies.push_back(total_energy(th, s, grid));
    }
  }
  return traj;
}

Trajectory euler_lagrange_oracle(const Theory& th, const FieldState& s0, const GridSpec& grid,
                                 int sample_every) {
  grid.check();
  if (sample_every < 1) throw std::invalid_argument("sample_every must be >= 1");
  const int Nx = grid.Nx;
  const double dt = grid.dt;
  auto wrap = [Nx](int j) { return ((j % Nx) + Nx) % Nx; };

  // phi_tt = phi_xx - V'(phi) on the compact three-point stencil.
  auto accel = [&](const std::vector<double>& phi) {
    std::vector<double> a(Nx, 0.0);
    for (int j = 0; j < Nx; ++j) {
      double lap = 0.0;
      if (Nx > 1)
        lap = (phi[wrap(j + 1)] - 2.0 * phi[j] + phi[wrap(j - 1)]) / (grid.dx * grid.dx);
      a[j] = lap - th.dV(phi[j]);
    }
    return a;
  };

  const int steps = static_cast<int>(std::llround(grid.T / grid.dt));
  std::vector<double> prev = s0.phi;
  std::vector<double> a0 = accel(prev);
  std::vector<double> cur(Nx, 0.0);
  for (int j = 0; j < Nx; ++j)
    cur[j] = prev[j] + dt * s0.pi0[j] + 0.5 * dt * dt * a0[j];

  Trajectory traj;
  traj.sample_dt = sample_every * grid.dt;

  auto push_sample = [&](double t, const std::vector<double>& mid,
                         const std::vector<double>& lo, const std::vector<double>& hi) {
    FieldState s;
    s.t = t;
    s.phi = mid;
    s.pi0.resize(Nx);
    for (int j = 0; j < Nx; ++j) s.pi0[j] = (hi[j] - lo[j]) / (2.0 * dt);
    traj.samples.push_back(s);
    traj.energies.push_back(total_energy(th, traj.samples.back(), grid));
  };

  {
    FieldState first;
    first.t = s0.t;
    first.phi = prev;
    first.pi0 = s0.pi0;
    traj.samples.push_back(first);
    traj.energies.push_back(total_energy(th, first, grid));
  }

  for (int k = 1; k <= steps; ++k) {
    std::vector<double> acc = accel(cur);
    std::vector<double> next(Nx);
    for (int j = 0; j < Nx; ++j)
      next[j] = 2.0 * cur[j] - prev[j] + dt * dt * acc[j];
    for (double v : next)
      if (!std::isfinite(v)) throw divergence_error("leapfrog diverged", s0.t + k * dt);
    if (k % sample_every == 0) push_sample(s0.t + k * dt, cur, prev, next);
    prev = std::move(cur);
    cur = std::move(next);
  }
  return traj;
}

LiftResiduals lift_residuals_at(const Theory& th, const Trajectory& traj, const GridSpec& grid,
                                int time_index, int node) {
  if (time_index <= 0 || time_index + 1 >= static_cast<int>(traj.samples.size()))
    throw std::out_of_range("lifted-tangent check needs an interior sample time");
  GridPatchView patch;
  patch.phi_prev = traj.samples[time_index - 1].phi;
  patch.phi_mid = traj.samples[time_index].phi;
  patch.phi_next = traj.samples[time_index + 1].phi;
  patch.pi_prev = traj.samples[time_index - 1].pi0;
  patch.pi_mid = traj.samples[time_index].pi0;
  patch.pi_next = traj.samples[time_index + 1].pi0;
  patch.dx = grid.dx;
  patch.dt = traj.sample_dt;
  return lift_solution_tangent(th.H, patch, node);
}

FieldState plane_wave_state(const GridSpec& grid, double amplitude, int mode, double mass,
                            double t0) {
  const double k = 2.0 * M_PI * mode / grid.length();
  const double w = std::sqrt(k * k + mass * mass);
  FieldState s;
  s.t = t0;
  s.phi.resize(grid.Nx);
  s.pi0.resize(grid.Nx);
  for (int j = 0; j < grid.Nx; ++j) {
    double x = j * grid.dx;
    s.phi[j] = amplitude * std::cos(k * x - w * t0);
    s.pi0[j] = amplitude * w * std::sin(k * x - w * t0);
  }
  return s;
}

FieldState standing_wave_state(const GridSpec& grid, double amplitude, int mode, double mass,
                               double t0) {
  const double k = 2.0 * M_PI * mode / grid.length();
  const double w = std::sqrt(k * k + mass * mass);
  FieldState s;
  s.t = t0;
  s.phi.resize(grid.Nx);
  s.pi0.resize(grid.Nx);
  for (int j = 0; j < grid.Nx; ++j) {
    double x = j * grid.dx;
    s.phi[j] = amplitude * std::cos(k * x) * std::cos(w * t0);
    s.pi0[j] = -amplitude * w * std::cos(k * x) * std::sin(w * t0);
  }
  return s;
}

FieldState gaussian_state(const GridSpec& grid, double amplitude, double width) {
  FieldState s;
  s.t = 0.0;
  s.phi.resize(grid.Nx);
  s.pi0.assign(grid.Nx, 0.0);
  const double mid = 0.5 * grid.length();
  for (int j = 0; j < grid.Nx; ++j) {
    double x = j * grid.dx - mid;
    s.phi[j] = amplitude * std::exp(-x * x / (2.0 * width * width));
  }
  return s;
}

FieldState mechanics_state(double q0, double p0) {
  FieldState s;
  s.t = 0.0;
  s.phi = {q0};
  s.pi0 = {p0};
  return s;
}

double plane_wave_value(double amplitude, double k, double mass, double x, double t) {
  const double w = std::sqrt(k * k + mass * mass);
  return amplitude * std::cos(k * x - w * t);
}

void write_trajectory_csv(std::ostream& os, const Theory& th, const GridSpec& grid,
                          const Trajectory& traj) {
  CsvWriter csv(os);
  csv.header({"t", "x", "phi", "pi0", "pi1", "energy-density"});
  const int Nx = grid.Nx;
  auto wrap = [Nx](int j) { return ((j % Nx) + Nx) % Nx; };
  for (const FieldState& s : traj.samples) {
    std::vector<double> px = spatial_momenta(th, s, grid);
    for (int j = 0; j < Nx; ++j) {
      double density;
      if (th.n == 1) {
        std::vector<double> x0(1, 0.0), q{s.phi[0]}, p{s.pi0[0]};
        density = th.H.value(x0, q, p);
      } else {
        double slope = (s.phi[wrap(j + 1)] - s.phi[wrap(j - 1)]) / (2.0 * grid.dx);
        density = 0.5 * s.pi0[j] * s.pi0[j] + 0.5 * slope * slope + th.V(s.phi[j]);
      }
      csv.row({s.t, j * grid.dx, s.phi[j], s.pi0[j], px[j], density});
    }
  }
}

}  // namespace dwgeom

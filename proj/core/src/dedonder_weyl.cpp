#include "dwgeom/dedonder_weyl.hpp"

#include <cmath>

namespace dwgeom {

namespace {

constexpr int kNewtonMaxIter = 50;
constexpr double kNewtonTol = 1e-12;

// Solves A x = b in place by Gaussian elimination with partial pivoting.
std::vector<double> solve_dense(std::vector<double> A, std::vector<double> b) {
  const int m = static_cast<int>(b.size());
  for (int col = 0; col < m; ++col) {
    int piv = col;
    for (int r = col + 1; r < m; ++r)
      if (std::abs(A[r * m + col]) > std::abs(A[piv * m + col])) piv = r;
    if (std::abs(A[piv * m + col]) < 1e-300)
      throw singular_lagrangian_error("singular velocity Hessian in Newton solve");
    if (piv != col) {
      for (int c = 0; c < m; ++c) std::swap(A[piv * m + c], A[col * m + c]);
      std::swap(b[piv], b[col]);
    }
    for (int r = col + 1; r < m; ++r) {
      double f = A[r * m + col] / A[col * m + col];
      if (f == 0.0) continue;
      for (int c = col; c < m; ++c) A[r * m + c] -= f * A[col * m + c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(m, 0.0);
  for (int r = m - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < m; ++c) s -= A[r * m + c] * x[c];
    x[r] = s / A[r * m + r];
  }
  return x;
}

}  // namespace

ChartPoint legendre_transform(const LagrangianDensity& L, const JetPoint& j) {
  const int n = L.n, N = L.N;
  ChartPoint pt;
  pt.x = j.x;
  pt.q = j.q;
  pt.pmom.assign(static_cast<std::size_t>(n) * N, 0.0);
  double pv = 0.0;
  for (int mu = 0; mu < n; ++mu) {
    for (int i = 0; i < N; ++i) {
      double pmi = L.d_v(j.x, j.q, j.v, mu, i);
      pt.pmom[mu * N + i] = pmi;
      pv += pmi * j.v[mu * N + i];
    }
  }
  pt.p = L.value(j.x, j.q, j.v) - pv;
  return pt;
}

JetPoint invert_polymomenta(const LagrangianDensity& L, Coords x, Coords q, Coords pmom) {
  const int n = L.n, N = L.N;
  const int m = n * N;
  JetPoint j;
  j.x.assign(x.begin(), x.end());
  j.q.assign(q.begin(), q.end());
  j.v.assign(m, 0.0);

  auto residual = [&](const std::vector<double>& v, std::vector<double>& g) {
    double worst = 0.0;
    for (int mu = 0; mu < n; ++mu)
      for (int i = 0; i < N; ++i) {
        double r = L.d_v(x, q, v, mu, i) - pmom[mu * N + i];
        g[mu * N + i] = r;
        worst = std::max(worst, std::abs(r));
      }
    return worst;
  };

  std::vector<double> g(m), jac(m * m), vh(m);
  for (int iter = 0; iter < kNewtonMaxIter; ++iter) {
    if (residual(j.v, g) < kNewtonTol) return j;
    // Jacobian d(dL/dv)/dv by central differences.
    for (int col = 0; col < m; ++col) {
      vh = j.v;
      double h = 1e-6 * std::max(1.0, std::abs(j.v[col]));
      vh[col] = j.v[col] + h;
      for (int row = 0; row < m; ++row)
        jac[row * m + col] = L.d_v(x, q, vh, row / N, row % N);
      vh[col] = j.v[col] - h;
      for (int row = 0; row < m; ++row)
        jac[row * m + col] =
            (jac[row * m + col] - L.d_v(x, q, vh, row / N, row % N)) / (2.0 * h);
    }
    std::vector<double> delta = solve_dense(jac, g);
    for (int k = 0; k < m; ++k) j.v[k] -= delta[k];
  }
  if (residual(j.v, g) < kNewtonTol) return j;
  throw singular_lagrangian_error("polymomenta inversion did not converge");
}

DWHamiltonian hamiltonian_from_lagrangian(const LagrangianDensity& L) {
  if (!L.regular)
    throw singular_lagrangian_error("Lagrangian is flagged non-regular");
  DWHamiltonian H;
  H.n = L.n;
  H.N = L.N;
  H.value = [L](Coords x, Coords q, Coords p) {
    JetPoint j = invert_polymomenta(L, x, q, p);
    double pv = 0.0;
    for (int k = 0; k < L.n * L.N; ++k) pv += p[k] * j.v[k];
    return pv - L.value(x, q, j.v);
  };
  // Envelope identities at the stationary velocity.
  H.d_p = [L](Coords x, Coords q, Coords p, int mu, int i) {
    return invert_polymomenta(L, x, q, p).v[mu * L.N + i];
  };
  H.d_q = [L](Coords x, Coords q, Coords p, int i) {
    JetPoint j = invert_polymomenta(L, x, q, p);
    return -L.d_q(x, q, j.v, i);
  };
  H.d_x = [L](Coords x, Coords q, Coords p, int mu) {
    JetPoint j = invert_polymomenta(L, x, q, p);
    std::vector<double> xs(x.begin(), x.end());
    double h = 1e-6 * std::max(1.0, std::abs(xs[mu]));
    double save = xs[mu];
    xs[mu] = save + h;
    double lp = L.value(xs, q, j.v);
    xs[mu] = save - h;
    double lm = L.value(xs, q, j.v);
    return -(lp - lm) / (2.0 * h);
  };
  return H;
}

DwRhs dw_rhs(const DWHamiltonian& H, Coords x, Coords q, Coords pmom) {
  DwRhs r;
  r.dq_dx.assign(static_cast<std::size_t>(H.n) * H.N, 0.0);
  r.div_p.assign(H.N, 0.0);
  for (int mu = 0; mu < H.n; ++mu)
    for (int i = 0; i < H.N; ++i) r.dq_dx[mu * H.N + i] = H.d_p(x, q, pmom, mu, i);
  for (int i = 0; i < H.N; ++i) r.div_p[i] = -H.d_q(x, q, pmom, i);
  return r;
}

Gauge Gauge::random(int n, int N, std::mt19937_64& rng, double scale) {
  Gauge g(n, N);
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (int mu = 0; mu < n; ++mu)
    for (int nu = 0; nu < n; ++nu)
      for (int i = 0; i < N; ++i) g.at(mu, nu, i) = dist(rng);
  // Project onto the trace-free constraint sum_mu (Z'_mu)^mu_i = 0.
  for (int i = 0; i < N; ++i) {
    double trace = 0.0;
    for (int mu = 0; mu < n; ++mu) trace += g.at(mu, mu, i);
    for (int mu = 0; mu < n; ++mu) g.at(mu, mu, i) -= trace / n;
  }
  return g;
}

void Gauge::validate() const {
  for (int i = 0; i < N_; ++i) {
    double trace = 0.0;
    for (int mu = 0; mu < n_; ++mu) trace += at(mu, mu, i);
    if (std::abs(trace) > 1e-12)
      throw algebra_error("gauge violates the trace-free constraint");
  }
}

Form hamiltonian_differential(const DWHamiltonian& H, const ChartPoint& at,
                              bool include_p_term) {
  ChartSpec spec(H.n, H.N);
  at.check_shape(spec);
  const double orient = (H.n % 2 == 1) ? 1.0 : -1.0;  // (-1)^{n+1}
  Form dh(spec.dim(), 1);
  for (int mu = 0; mu < H.n; ++mu)
    dh.add(std::uint64_t{1} << spec.x_index(mu), orient * H.d_x(at.x, at.q, at.pmom, mu));
  for (int i = 0; i < H.N; ++i)
    dh.add(std::uint64_t{1} << spec.q_index(i), orient * H.d_q(at.x, at.q, at.pmom, i));
  for (int mu = 0; mu < H.n; ++mu)
    for (int i = 0; i < H.N; ++i)
      dh.add(std::uint64_t{1} << spec.p_index(mu, i),
             orient * H.d_p(at.x, at.q, at.pmom, mu, i));
  if (include_p_term) dh.add(std::uint64_t{1} << spec.p_index(), -orient);
  return dh;
}

HamiltonianMultivector build_hamiltonian_nvector(const DWHamiltonian& H, const ChartPoint& at,
                                                 const Gauge& gauge) {
  if (gauge.n() != H.n || gauge.N() != H.N)
    throw algebra_error("gauge shape does not match the Hamiltonian");
  gauge.validate();
  ChartSpec spec(H.n, H.N);
  at.check_shape(spec);
  const int n = H.n, N = H.N, D = spec.dim();

  HamiltonianMultivector X;
  X.gauge = gauge;
  X.Z.reserve(n);
  for (int mu = 0; mu < n; ++mu) {
    Multivector Zmu(D, 1);
    Zmu.set(std::uint64_t{1} << spec.x_index(mu), 1.0);
    for (int i = 0; i < N; ++i)
      Zmu.add(std::uint64_t{1} << spec.q_index(i), H.d_p(at.x, at.q, at.pmom, mu, i));
    for (int nu = 0; nu < n; ++nu)
      for (int i = 0; i < N; ++i) {
        double c = gauge.at(mu, nu, i);
        if (nu == mu) c -= H.d_q(at.x, at.q, at.pmom, i) / n;
        Zmu.add(std::uint64_t{1} << spec.p_index(nu, i), c);
      }
    X.Z.push_back(std::move(Zmu));
  }

  // The p-components (Z_mu)_0 enter the dx^mu-coefficient of i_X omega
  // diagonally with weight (-1)^{n-1}; solve for them exactly.
  Form omega = omega_form(spec);
  Form dh = hamiltonian_differential(H, at);
  Form beta0 = contract(wedge_all(X.Z), omega);
  const double diag = (n % 2 == 1) ? 1.0 : -1.0;  // (-1)^{n-1}
  for (int mu = 0; mu < n; ++mu) {
    std::uint64_t dxmask = std::uint64_t{1} << spec.x_index(mu);
    double c = diag * (dh.coeff(dxmask) - beta0.coeff(dxmask));
    X.Z[mu].add(std::uint64_t{1} << spec.p_index(), c);
  }
  X.assembled = wedge_all(X.Z);
  return X;
}

DefiningRelationReport verify_defining_relation(const DWHamiltonian& H,
                                                const HamiltonianMultivector& X,
                                                const ChartPoint& at, bool include_p_term) {
  ChartSpec spec(H.n, H.N);
  Form lhs = contract(X.assembled, omega_form(spec));
  Form rhs = hamiltonian_differential(H, at, include_p_term);
  DefiningRelationReport rep;
  rep.residual = max_abs_diff(lhs, rhs);
  rep.pass = rep.residual < 1e-8;
  return rep;
}

double spatial_momentum_from_slope(const DWHamiltonian& H, double q, double pi_t,
                                   double slope) {
  if (H.n != 2) throw algebra_error("spatial momentum solve expects a 1+1D theory");
  std::vector<double> x0(2, 0.0), qs{q}, p{pi_t, -slope};
  for (int iter = 0; iter < kNewtonMaxIter; ++iter) {
    double g = H.d_p(x0, qs, p, 1, 0) - slope;
    if (std::abs(g) < kNewtonTol) return p[1];
    double h = 1e-6 * std::max(1.0, std::abs(p[1]));
    double save = p[1];
    p[1] = save + h;
    double gp = H.d_p(x0, qs, p, 1, 0) - slope;
    p[1] = save - h;
    double gm = H.d_p(x0, qs, p, 1, 0) - slope;
    p[1] = save;
    double dg = (gp - gm) / (2.0 * h);
    if (std::abs(dg) < 1e-300)
      throw singular_lagrangian_error("flat momentum constraint in spatial solve");
    p[1] = save - g / dg;
  }
  throw singular_lagrangian_error("spatial momentum solve did not converge");
}

double LiftResiduals::max() const {
  return std::max(dq_time, std::max(dq_space, trace));
}

LiftResiduals lift_solution_tangent(const DWHamiltonian& H, const GridPatchView& patch,
                                    int node) {
  if (H.n != 2) throw algebra_error("lifted-tangent check expects a 1+1D theory");
  const int Nx = static_cast<int>(patch.phi_mid.size());
  if (Nx == 0 || patch.phi_prev.size() != patch.phi_mid.size() ||
      patch.phi_next.size() != patch.phi_mid.size() ||
      patch.pi_prev.size() != patch.phi_mid.size() ||
      patch.pi_mid.size() != patch.phi_mid.size() ||
      patch.pi_next.size() != patch.phi_mid.size())
    throw std::out_of_range("grid patch levels are missing or misaligned");
  if (node < 0 || node >= Nx) throw std::out_of_range("node outside the grid patch");
  if (patch.dx <= 0.0 || patch.dt <= 0.0) throw std::out_of_range("patch spacing must be positive");

  auto wrap = [Nx](int j) { return ((j % Nx) + Nx) % Nx; };
  auto slope = [&](std::span<const double> f, int j) {
    return (f[wrap(j + 1)] - f[wrap(j - 1)]) / (2.0 * patch.dx);
  };

  std::vector<double> x0(2, 0.0);
  auto px_at = [&](int j) {
    int k = wrap(j);
    return spatial_momentum_from_slope(H, patch.phi_mid[k], patch.pi_mid[k],
                                       slope(patch.phi_mid, k));
  };

  const double q = patch.phi_mid[node];
  const double pt = patch.pi_mid[node];
  const double px = px_at(node);
  std::vector<double> qs{q}, p{pt, px};

  const double dphi_dt = (patch.phi_next[node] - patch.phi_prev[node]) / (2.0 * patch.dt);
  const double dphi_dx = slope(patch.phi_mid, node);
  const double dpit_dt = (patch.pi_next[node] - patch.pi_prev[node]) / (2.0 * patch.dt);
  const double dpix_dx = (px_at(node + 1) - px_at(node - 1)) / (2.0 * patch.dx);

  LiftResiduals r;
  r.dq_time = std::abs(dphi_dt - H.d_p(x0, qs, p, 0, 0));
  r.dq_space = std::abs(dphi_dx - H.d_p(x0, qs, p, 1, 0));
  r.trace = std::abs(dpit_dt + dpix_dx + H.d_q(x0, qs, p, 0));
  return r;
}

}  // namespace dwgeom

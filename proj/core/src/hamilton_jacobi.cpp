#include "dwgeom/hamilton_jacobi.hpp"

#include <cmath>

namespace dwgeom {

namespace {

std::vector<double> perturbed(Coords v, int k, double delta) {
  std::vector<double> out(v.begin(), v.end());
  out[k] += delta;
  return out;
}

// E-chart helpers: coordinates x^1..x^n, q^1..q^N; masks as in the exterior
// module, with the x-block occupying the low indices exactly as on P.
std::uint64_t e_volume_mask(int n) { return (std::uint64_t{1} << n) - 1; }

Form e_volume(int n, int N) {
  Form f(n + N, n);
  f.set(e_volume_mask(n), 1.0);
  return f;
}

Form e_volume_contracted(int n, int N, int mu) {
  return contract(Multivector::basis_vector(n + N, mu), e_volume(n, N));
}

Form e_two_horizontal(int n, int N, std::span<const double> momenta, double affine) {
  Form tau(n + N, n);
  for (int mu = 0; mu < n; ++mu) {
    Form dnx_mu = e_volume_contracted(n, N, mu);
    for (int i = 0; i < N; ++i) {
      double c = momenta[mu * N + i];
      if (c == 0.0) continue;
      tau += c * wedge(Form::basis_covector(n + N, n + i), dnx_mu);
    }
  }
  tau += affine * e_volume(n, N);
  return tau;
}

}  // namespace

ChartPoint PhaseSection::lift(const ConfigPoint& e) const {
  ChartPoint z;
  z.x = e.x;
  z.q = e.q;
  z.pmom = momenta(e.x, e.q);
  z.p = affine(e.x, e.q);
  return z;
}

std::vector<double> PhaseSection::d_momenta_dx(Coords x, Coords q, int nu) const {
  if (momenta_dx) return momenta_dx(x, q, nu);
  double h = fd_step * std::max(1.0, std::abs(x[nu]));
  std::vector<double> plus = momenta(perturbed(x, nu, h), q);
  std::vector<double> minus = momenta(perturbed(x, nu, -h), q);
  for (std::size_t k = 0; k < plus.size(); ++k) plus[k] = (plus[k] - minus[k]) / (2.0 * h);
  return plus;
}

std::vector<double> PhaseSection::d_momenta_dq(Coords x, Coords q, int j) const {
  if (momenta_dq) return momenta_dq(x, q, j);
  double h = fd_step * std::max(1.0, std::abs(q[j]));
  std::vector<double> plus = momenta(x, perturbed(q, j, h));
  std::vector<double> minus = momenta(x, perturbed(q, j, -h));
  for (std::size_t k = 0; k < plus.size(); ++k) plus[k] = (plus[k] - minus[k]) / (2.0 * h);
  return plus;
}

double PhaseSection::d_affine_dx(Coords x, Coords q, int nu) const {
  if (affine_dx) return affine_dx(x, q, nu);
  double h = fd_step * std::max(1.0, std::abs(x[nu]));
  return (affine(perturbed(x, nu, h), q) - affine(perturbed(x, nu, -h), q)) / (2.0 * h);
}

double PhaseSection::d_affine_dq(Coords x, Coords q, int j) const {
  if (affine_dq) return affine_dq(x, q, j);
  double h = fd_step * std::max(1.0, std::abs(q[j]));
  return (affine(x, perturbed(q, j, h)) - affine(x, perturbed(q, j, -h))) / (2.0 * h);
}

double HJPotential::d_dx(Coords x, Coords q, int mu, int nu) const {
  if (dS_dx) return dS_dx(x, q, mu, nu);
  double h = fd_step * std::max(1.0, std::abs(x[nu]));
  return (S(perturbed(x, nu, h), q, mu) - S(perturbed(x, nu, -h), q, mu)) / (2.0 * h);
}

double HJPotential::d_dq(Coords x, Coords q, int mu, int j) const {
  if (dS_dq) return dS_dq(x, q, mu, j);
  double h = fd_step * std::max(1.0, std::abs(q[j]));
  return (S(x, perturbed(q, j, h), mu) - S(x, perturbed(q, j, -h), mu)) / (2.0 * h);
}

PhaseSection section_from_potential(const HJPotential& S) {
  PhaseSection T;
  T.n = S.n;
  T.N = S.N;
  T.momenta = [S](Coords x, Coords q) {
    std::vector<double> m(static_cast<std::size_t>(S.n) * S.N, 0.0);
    for (int mu = 0; mu < S.n; ++mu)
      for (int j = 0; j < S.N; ++j) m[mu * S.N + j] = S.d_dq(x, q, mu, j);
    return m;
  };
  T.affine = [S](Coords x, Coords q) {
    double t0 = 0.0;
    for (int mu = 0; mu < S.n; ++mu) t0 += S.d_dx(x, q, mu, mu);
    return t0;
  };
  return T;
}

double hj_residual(const DWHamiltonian& H, const HJPotential& S, const ConfigPoint& at) {
  std::vector<double> momenta(static_cast<std::size_t>(S.n) * S.N, 0.0);
  double div = 0.0;
  for (int mu = 0; mu < S.n; ++mu) {
    div += S.d_dx(at.x, at.q, mu, mu);
    for (int j = 0; j < S.N; ++j) momenta[mu * S.N + j] = S.d_dq(at.x, at.q, mu, j);
  }
  return div + H.value(at.x, at.q, momenta);
}

std::vector<ConfigPoint> DomainBox::lattice() const {
  const int n = static_cast<int>(x_lo.size());
  const int N = static_cast<int>(q_lo.size());
  const int ppa = points_per_axis;
  const int axes = n + N;
  std::vector<ConfigPoint> pts;
  std::vector<int> idx(axes, 0);
  auto coord = [&](int axis, int k) {
    double lo = axis < n ? x_lo[axis] : q_lo[axis - n];
    double hi = axis < n ? x_hi[axis] : q_hi[axis - n];
    return ppa == 1 ? lo : lo + (hi - lo) * k / (ppa - 1);
  };
  while (true) {
    ConfigPoint e;
    e.x.resize(n);
    e.q.resize(N);
    for (int a = 0; a < axes; ++a) {
      if (a < n)
        e.x[a] = coord(a, idx[a]);
      else
        e.q[a - n] = coord(a, idx[a]);
    }
    pts.push_back(std::move(e));
    int a = 0;
    while (a < axes && ++idx[a] == ppa) idx[a++] = 0;
    if (a == axes) break;
  }
  return pts;
}

SectionConditionReport check_section_conditions(const DWHamiltonian& H, const PhaseSection& T,
                                         std::span<const ConfigPoint> samples) {
  const int n = T.n, N = T.N;
  SectionConditionReport rep;
  for (const ConfigPoint& e : samples) {
    std::vector<double> Tm = T.momenta(e.x, e.q);
    std::vector<std::vector<double>> dT_dx(n), dT_dq(N);
    for (int nu = 0; nu < n; ++nu) dT_dx[nu] = T.d_momenta_dx(e.x, e.q, nu);
    for (int j = 0; j < N; ++j) dT_dq[j] = T.d_momenta_dq(e.x, e.q, j);

    std::vector<double> Hp(static_cast<std::size_t>(n) * N);
    for (int mu = 0; mu < n; ++mu)
      for (int j = 0; j < N; ++j) Hp[mu * N + j] = H.d_p(e.x, e.q, Tm, mu, j);

    SectionConditionRow row;
    row.at = e;
    for (int i = 0; i < N; ++i) {
      double conv = 0.0, bare = 0.0;
      for (int mu = 0; mu < n; ++mu) {
        conv += dT_dx[mu][mu * N + i];
        bare += dT_dx[mu][mu * N + i];
        for (int j = 0; j < N; ++j) conv += Hp[mu * N + j] * dT_dq[j][mu * N + i];
      }
      row.t1 = std::max(row.t1, std::abs(conv + H.d_q(e.x, e.q, Tm, i)));
      row.t3 = std::max(row.t3, std::abs(bare - T.d_affine_dq(e.x, e.q, i)));
      row.t4_literal = std::max(row.t4_literal, std::abs(H.d_q(e.x, e.q, Tm, i)));
    }
    // (T2) is the derivative of the on-shell defect H o T + T_0 along the
    // projected frame; the explicit dH/dx enters at frozen T arguments, the
    // rest is the chain rule through the section components.
    std::vector<double> dg(n + N, 0.0);
    for (int k = 0; k < n + N; ++k) {
      const std::vector<double>& dT = k < n ? dT_dx[k] : dT_dq[k - n];
      double g = k < n ? H.d_x(e.x, e.q, Tm, k) : H.d_q(e.x, e.q, Tm, k - n);
      for (int mu = 0; mu < n; ++mu)
        for (int j = 0; j < N; ++j) g += Hp[mu * N + j] * dT[mu * N + j];
      g += k < n ? T.d_affine_dx(e.x, e.q, k) : T.d_affine_dq(e.x, e.q, k - n);
      dg[k] = g;
    }
    for (int nu = 0; nu < n; ++nu) {
      double along = dg[nu];
      for (int j = 0; j < N; ++j) along += Hp[nu * N + j] * dg[n + j];
      row.t2 = std::max(row.t2, std::abs(along));
      for (int j = 0; j < N; ++j) row.t4 = std::max(row.t4, std::abs(Hp[nu * N + j]));
    }
    rep.t1 = std::max(rep.t1, row.t1);
    rep.t2 = std::max(rep.t2, row.t2);
    rep.t3 = std::max(rep.t3, row.t3);
    rep.t4 = std::max(rep.t4, row.t4);
    rep.t4_literal = std::max(rep.t4_literal, row.t4_literal);
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

std::vector<std::vector<double>> project_distribution(const DWHamiltonian& H,
                                                      const PhaseSection& T,
                                                      const ConfigPoint& at,
                                                      const Gauge& gauge) {
  ChartSpec spec(H.n, H.N);
  HamiltonianMultivector X = build_hamiltonian_nvector(H, T.lift(at), gauge);
  std::vector<std::vector<double>> out;
  out.reserve(H.n);
  for (int mu = 0; mu < H.n; ++mu) {
    std::vector<double> v(H.n + H.N, 0.0);
    for (int k = 0; k < H.n; ++k) v[k] = X.Z[mu].component(spec.x_index(k));
    for (int i = 0; i < H.N; ++i) v[H.n + i] = X.Z[mu].component(spec.q_index(i));
    out.push_back(std::move(v));
  }
  return out;
}

FoliationReport foliation_integrability_check(const DWHamiltonian& H, const PhaseSection& T,
                                              std::span<const ConfigPoint> samples,
                                              double fd_step) {
  const int n = T.n, N = T.N;
  Gauge g0 = Gauge::zero(n, N);
  FoliationReport rep;

  auto q_components = [&](const ConfigPoint& e) {
    std::vector<std::vector<double>> Z = project_distribution(H, T, e, g0);
    return Z;  // Z[mu] has n x-components then N q-components
  };

  auto displace = [&](const ConfigPoint& e, const std::vector<double>& dir, double h) {
    ConfigPoint out = e;
    for (int k = 0; k < n; ++k) out.x[k] += h * dir[k];
    for (int i = 0; i < N; ++i) out.q[i] += h * dir[n + i];
    return out;
  };

  for (const ConfigPoint& e : samples) {
    std::vector<std::vector<double>> Z = q_components(e);
    for (int mu = 0; mu < n; ++mu) {
      for (int nu = mu + 1; nu < n; ++nu) {
        // [Z_mu, Z_nu]^k = Z_mu(Z_nu^k) - Z_nu(Z_mu^k); the x-components are
        // constant, so only the q-components survive.
        std::vector<std::vector<double>> Zp_mu = q_components(displace(e, Z[mu], fd_step));
        std::vector<std::vector<double>> Zm_mu = q_components(displace(e, Z[mu], -fd_step));
        std::vector<std::vector<double>> Zp_nu = q_components(displace(e, Z[nu], fd_step));
        std::vector<std::vector<double>> Zm_nu = q_components(displace(e, Z[nu], -fd_step));
        double worst = 0.0;
        for (int i = 0; i < N; ++i) {
          double d_mu = (Zp_mu[nu][n + i] - Zm_mu[nu][n + i]) / (2.0 * fd_step);
          double d_nu = (Zp_nu[mu][n + i] - Zm_nu[mu][n + i]) / (2.0 * fd_step);
          worst = std::max(worst, std::abs(d_mu - d_nu));
        }
        rep.rows.push_back(FoliationRow{e, mu + 1, nu + 1, worst});
        rep.max_out_of_span = std::max(rep.max_out_of_span, worst);
      }
    }
    if (n == 1) rep.rows.push_back(FoliationRow{e, 1, 1, 0.0});
  }
  return rep;
}

GeometricFormReport geometric_form_check(const DWHamiltonian& H, const PhaseSection& T,
                                         std::span<const ConfigPoint> samples) {
  const int n = T.n, N = T.N;
  const int dimE = n + N;

  FormField tau;
  tau.dim = dimE;
  tau.degree = n;
  tau.eval = [&T, n, N](std::span<const double> flat) {
    Coords x(flat.data(), n), q(flat.data() + n, N);
    return e_two_horizontal(n, N, T.momenta(x, q), T.affine(x, q));
  };
  tau.partial = [&T, n, N](std::span<const double> flat, int k) {
    Coords x(flat.data(), n), q(flat.data() + n, N);
    std::vector<double> dm = k < n ? T.d_momenta_dx(x, q, k) : T.d_momenta_dq(x, q, k - n);
    double da = k < n ? T.d_affine_dx(x, q, k) : T.d_affine_dq(x, q, k - n);
    return e_two_horizontal(n, N, dm, da);
  };

  SectionConditionReport coord = check_section_conditions(H, T, samples);

  GeometricFormReport rep;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const ConfigPoint& e = samples[s];
    std::vector<double> flat;
    flat.insert(flat.end(), e.x.begin(), e.x.end());
    flat.insert(flat.end(), e.q.begin(), e.q.end());

    Form dtau = exterior_derivative(tau, flat);

    // d of the on-shell defect H o T + T_0, assembled with the chain rule.
    std::vector<double> Tm = T.momenta(e.x, e.q);
    Form dg(dimE, 1);
    for (int k = 0; k < dimE; ++k) {
      std::vector<double> dm = k < n ? T.d_momenta_dx(e.x, e.q, k) : T.d_momenta_dq(e.x, e.q, k - n);
      double g = k < n ? H.d_x(e.x, e.q, Tm, k) : H.d_q(e.x, e.q, Tm, k - n);
      for (int mu = 0; mu < n; ++mu)
        for (int j = 0; j < N; ++j) g += H.d_p(e.x, e.q, Tm, mu, j) * dm[mu * N + j];
      g += k < n ? T.d_affine_dx(e.x, e.q, k) : T.d_affine_dq(e.x, e.q, k - n);
      dg.add(std::uint64_t{1} << k, g);
    }

    GeometricFormRow row;
    row.at = e;
    row.dT = dtau.max_abs_coeff();
    row.dh = dg.max_abs_coeff();
    const SectionConditionRow& cr = coord.rows[s];
    row.coord = std::max(cr.t1, std::max(cr.t2, cr.t3));
    rep.dT_max = std::max(rep.dT_max, row.dT);
    rep.dh_max = std::max(rep.dh_max, row.dh);
    rep.coord_max = std::max(rep.coord_max, row.coord);
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

Form potential_differential(const HJPotential& S, const ConfigPoint& at) {
  const int n = S.n, N = S.N;
  std::vector<double> momenta(static_cast<std::size_t>(n) * N, 0.0);
  double div = 0.0;
  for (int mu = 0; mu < n; ++mu) {
    div += S.d_dx(at.x, at.q, mu, mu);
    for (int j = 0; j < N; ++j) momenta[mu * N + j] = S.d_dq(at.x, at.q, mu, j);
  }
  return e_two_horizontal(n, N, momenta, div);
}

double theta_of_dS_residual(const HJPotential& S, const ConfigPoint& at) {
  const int n = S.n, N = S.N;
  Form dS = potential_differential(S, at);

  // Identify the 2-horizontal form with a phase point through the
  // Poincare-Cartan structure (p^mu_i on dq^i ^ d^n x_mu, -p on d^n x), then
  // rebuild Theta at that point and restrict it back to E's chart. The x/q
  // blocks share indices between the two charts, so restriction is a mask
  // reinterpretation.
  ChartSpec spec(n, N);
  ChartPoint z = ChartPoint::zero(spec);
  z.x = at.x;
  z.q = at.q;
  for (int mu = 0; mu < n; ++mu) {
    for (int i = 0; i < N; ++i) {
      Form unit = wedge(Form::basis_covector(n + N, n + i), e_volume_contracted(n, N, mu));
      const auto& cs = unit.coeffs();
      if (cs.empty()) continue;
      auto [mask, sign] = *cs.begin();
      z.pmom[mu * N + i] = dS.coeff(mask) / sign;
    }
  }
  z.p = -dS.coeff(e_volume_mask(n));

  Form theta = build_theta(spec, z);
  Form restricted(n + N, n);
  for (const auto& [mask, c] : theta.coeffs()) restricted.add(mask, c);
  return max_abs_diff(restricted, dS);
}

PhaseSection fiber_translate(const PhaseSection& T, const Theory& th,
                             std::function<std::vector<double>(Coords)> f,
                             std::function<std::vector<double>(Coords, int)> df_dx) {
  PhaseSection out;
  out.n = T.n;
  out.N = T.N;
  const int n = T.n, N = T.N;
  auto shifted_q = [f, N](Coords x, Coords q) {
    std::vector<double> fq = f(x);
    for (int i = 0; i < N; ++i) fq[i] += q[i];
    return fq;
  };
  auto momentum_shift = [df_dx, th, n, N](Coords x, const std::vector<double>& q_shifted) {
    // Legendre momenta of the jet of -f.
    std::vector<double> v(static_cast<std::size_t>(n) * N, 0.0);
    for (int mu = 0; mu < n; ++mu) {
      std::vector<double> d = df_dx(x, mu);
      for (int i = 0; i < N; ++i) v[mu * N + i] = -d[i];
    }
    std::vector<double> shift(static_cast<std::size_t>(n) * N, 0.0);
    for (int mu = 0; mu < n; ++mu)
      for (int i = 0; i < N; ++i) shift[mu * N + i] = th.L.d_v(x, q_shifted, v, mu, i);
    return shift;
  };
  out.momenta = [T, shifted_q, momentum_shift](Coords x, Coords q) {
    std::vector<double> qs = shifted_q(x, q);
    std::vector<double> m = T.momenta(x, qs);
    std::vector<double> sh = momentum_shift(x, qs);
    for (std::size_t k = 0; k < m.size(); ++k) m[k] += sh[k];
    return m;
  };
  out.affine = [T, th, shifted_q, out_momenta = out.momenta](Coords x, Coords q) {
    std::vector<double> qs = shifted_q(x, q);
    std::vector<double> m_old = T.momenta(x, qs);
    std::vector<double> m_new = out_momenta(x, q);
    // Preserve the on-shell defect H o T + T_0 pointwise.
    return T.affine(x, qs) + th.H.value(x, qs, m_old) - th.H.value(x, q, m_new);
  };
  return out;
}

HJPotential hj_zero_potential(int n, int N) {
  HJPotential S;
  S.n = n;
  S.N = N;
  S.S = [](Coords, Coords, int) { return 0.0; };
  S.dS_dx = [](Coords, Coords, int, int) { return 0.0; };
  S.dS_dq = [](Coords, Coords, int, int) { return 0.0; };
  return S;
}

HJPotential hj_free_particle_potential() {
  HJPotential S;
  S.n = 1;
  S.N = 1;
  S.S = [](Coords x, Coords q, int) { return q[0] * q[0] / (2.0 * x[0]); };
  S.dS_dx = [](Coords x, Coords q, int, int) { return -q[0] * q[0] / (2.0 * x[0] * x[0]); };
  S.dS_dq = [](Coords x, Coords q, int, int) { return q[0] / x[0]; };
  return S;
}

HJPotential hj_oscillator_potential() {
  HJPotential S;
  S.n = 1;
  S.N = 1;
  S.S = [](Coords x, Coords q, int) { return 0.5 * q[0] * q[0] / std::tan(x[0]); };
  S.dS_dx = [](Coords x, Coords q, int, int) {
    double s = std::sin(x[0]);
    return -0.5 * q[0] * q[0] / (s * s);
  };
  S.dS_dq = [](Coords x, Coords q, int, int) { return q[0] / std::tan(x[0]); };
  return S;
}

}  // namespace dwgeom

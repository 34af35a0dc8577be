#include "dwgeom/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace dwgeom {

Form volume_form(const ChartSpec& spec) {
  Form f(spec.dim(), spec.n());
  std::uint64_t mask = (spec.n() == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << spec.n()) - 1);
  f.set(mask, 1.0);
  return f;
}

Form volume_form_contracted(const ChartSpec& spec, int mu) {
  Multivector dmu = Multivector::basis_vector(spec.dim(), spec.x_index(mu));
  return contract(dmu, volume_form(spec));
}

Form build_theta(const ChartSpec& spec, const ChartPoint& at) {
  at.check_shape(spec);
  Form theta(spec.dim(), spec.n());
  for (int mu = 0; mu < spec.n(); ++mu) {
    Form dnx_mu = volume_form_contracted(spec, mu);
    for (int i = 0; i < spec.N(); ++i) {
      double c = at.pm(spec, mu, i);
      if (c == 0.0) continue;
      Form dq = Form::basis_covector(spec.dim(), spec.q_index(i));
      theta += c * wedge(dq, dnx_mu);
    }
  }
  theta -= at.p * volume_form(spec);
  return theta;
}

FormField theta_field(const ChartSpec& spec) {
  FormField f;
  f.dim = spec.dim();
  f.degree = spec.n();
  f.eval = [spec](std::span<const double> flat) {
    return build_theta(spec, ChartPoint::from_flat(spec, flat));
  };
  // Theta is linear in (p^mu_i, p) and independent of (x, q).
  f.partial = [spec](std::span<const double>, int k) {
    Form d(spec.dim(), spec.n());
    if (k == spec.p_index()) {
      d -= volume_form(spec);
      return d;
    }
    for (int mu = 0; mu < spec.n(); ++mu) {
      for (int i = 0; i < spec.N(); ++i) {
        if (k == spec.p_index(mu, i)) {
          Form dq = Form::basis_covector(spec.dim(), spec.q_index(i));
          d += wedge(dq, volume_form_contracted(spec, mu));
          return d;
        }
      }
    }
    return d;
  };
  return f;
}

Form omega_form(const ChartSpec& spec) {
  Form omega(spec.dim(), spec.n() + 1);
  for (int mu = 0; mu < spec.n(); ++mu) {
    Form dnx_mu = volume_form_contracted(spec, mu);
    for (int i = 0; i < spec.N(); ++i) {
      Form dq = Form::basis_covector(spec.dim(), spec.q_index(i));
      Form dp = Form::basis_covector(spec.dim(), spec.p_index(mu, i));
      omega += wedge(wedge(dq, dp), dnx_mu);
    }
  }
  Form dpaff = Form::basis_covector(spec.dim(), spec.p_index());
  omega += wedge(dpaff, volume_form(spec));
  return omega;
}

FormField build_omega(const ChartSpec& spec) {
  Form omega = omega_form(spec);
  FormField f;
  f.dim = spec.dim();
  f.degree = spec.n() + 1;
  f.eval = [omega](std::span<const double>) { return omega; };
  f.partial = [dim = spec.dim(), deg = spec.n() + 1](std::span<const double>, int) {
    return Form(dim, deg);
  };
  return f;
}

ConfigPoint project_to_E(const ChartPoint& pt) { return ConfigPoint{pt.x, pt.q}; }

namespace {

// Eigenvalues and eigenvectors of a small symmetric matrix by cyclic Jacobi.
void jacobi_eigen(std::vector<double>& a, int n, std::vector<double>& eigvals,
                  std::vector<double>& eigvecs) {
  eigvecs.assign(n * n, 0.0);
  for (int i = 0; i < n; ++i) eigvecs[i * n + i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = a[p * n + q];
        if (std::abs(apq) < 1e-300) continue;
        double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          double vkp = eigvecs[k * n + p], vkq = eigvecs[k * n + q];
          eigvecs[k * n + p] = c * vkp - s * vkq;
          eigvecs[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }
  eigvals.assign(n, 0.0);
  for (int i = 0; i < n; ++i) eigvals[i] = a[i * n + i];
}

NondegeneracyReport check_form(const Form& omega, int dim, int samples, std::uint64_t seed) {
  // Assemble the linear map v -> i_v omega column by column over the union of
  // result masks, then rank-check through the Gram matrix.
  std::vector<Form> columns;
  columns.reserve(dim);
  std::set<std::uint64_t> masks;
  for (int k = 0; k < dim; ++k) {
    Form col = contract(Multivector::basis_vector(dim, k), omega);
    for (const auto& [m, c] : col.coeffs()) masks.insert(m);
    columns.push_back(std::move(col));
  }
  std::vector<std::uint64_t> rows(masks.begin(), masks.end());
  std::vector<double> gram(dim * dim, 0.0);
  for (int a = 0; a < dim; ++a) {
    for (int b = a; b < dim; ++b) {
      double dot = 0.0;
      for (std::uint64_t m : rows) dot += columns[a].coeff(m) * columns[b].coeff(m);
      gram[a * dim + b] = dot;
      gram[b * dim + a] = dot;
    }
  }
  std::vector<double> eigvals, eigvecs;
  jacobi_eigen(gram, dim, eigvals, eigvecs);
  int argmin = 0;
  double lmin = eigvals[0], lmax = eigvals[0];
  for (int i = 1; i < dim; ++i) {
    if (eigvals[i] < lmin) { lmin = eigvals[i]; argmin = i; }
    lmax = std::max(lmax, eigvals[i]);
  }
  NondegeneracyReport rep;
  rep.sigma_min = std::sqrt(std::max(lmin, 0.0));
  rep.full_rank = lmax > 0.0 && lmin > 1e-12 * lmax;
  if (!rep.full_rank) {
    rep.kernel.resize(dim);
    for (int k = 0; k < dim; ++k) rep.kernel[k] = eigvecs[k * dim + argmin];
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  rep.samples = samples;
  rep.min_sample_ratio = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    std::vector<double> comps(dim);
    double norm = 0.0;
    for (double& c : comps) { c = dist(rng); norm += c * c; }
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    Form image = contract(Multivector::from_components(comps), omega);
    double inorm = 0.0;
    for (const auto& [m, c] : image.coeffs()) inorm += c * c;
    rep.min_sample_ratio = std::min(rep.min_sample_ratio, std::sqrt(inorm) / norm);
  }
  if (samples == 0) rep.min_sample_ratio = 0.0;
  return rep;
}

}  // namespace

NondegeneracyReport nondegeneracy_check(const ChartSpec& spec, int samples, std::uint64_t seed) {
  if (samples < 1) throw chart_error("nondegeneracy check requires samples >= 1");
  return check_form(omega_form(spec), spec.dim(), samples, seed);
}

NondegeneracyReport nondegeneracy_check(const Form& omega, int samples, std::uint64_t seed) {
  return check_form(omega, omega.dim(), samples, seed);
}

}  // namespace dwgeom

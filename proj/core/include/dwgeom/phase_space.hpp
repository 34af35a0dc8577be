#pragma once

#include <optional>
#include <random>

#include "dwgeom/chart.hpp"
#include "dwgeom/exterior.hpp"
#include "dwgeom/form_field.hpp"

namespace dwgeom {

/// Volume form d^n x = dx^1 ^ ... ^ dx^n.
Form volume_form(const ChartSpec& spec);

/// d^n x_mu = i_{d/dx^mu} d^n x.
Form volume_form_contracted(const ChartSpec& spec, int mu);

/// Poincare-Cartan n-form at a point:
///   Theta = p^mu_i dq^i ^ d^n x_mu - p d^n x.
Form build_theta(const ChartSpec& spec, const ChartPoint& at);

/// Theta as a form field with analytic coordinate partials.
FormField theta_field(const ChartSpec& spec);

/// Multisymplectic (n+1)-form, constant over the chart:
///   omega = -dTheta = dq^i ^ dp^mu_i ^ d^n x_mu + dp ^ d^n x.
FormField build_omega(const ChartSpec& spec);

/// The constant coefficient table of omega.
Form omega_form(const ChartSpec& spec);

struct NondegeneracyReport {
  bool full_rank = false;
  double sigma_min = 0.0;                // smallest singular value of v -> i_v omega
  std::vector<double> kernel;            // a kernel direction when rank-deficient
  int samples = 0;
  double min_sample_ratio = 0.0;         // min over random v of |i_v omega| / |v|
};

/// Checks that v -> i_v omega has trivial kernel on degree-1 multivectors.
NondegeneracyReport nondegeneracy_check(const ChartSpec& spec, int samples,
                                        std::uint64_t seed = 0);

/// Same check against an arbitrary constant (n+1)-form over a chart of the
/// given dimension.
NondegeneracyReport nondegeneracy_check(const Form& omega, int samples,
                                        std::uint64_t seed = 0);

/// Bundle projection P -> E: drops the polymomenta and the affine coordinate.
ConfigPoint project_to_E(const ChartPoint& pt);

}  // namespace dwgeom

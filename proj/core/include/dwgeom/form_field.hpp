#pragma once

#include <functional>

#include "dwgeom/exterior.hpp"

namespace dwgeom {

/// Point-dependent form over a coordinate chart. Points are flat coordinate
/// vectors of length dim. When the analytic partial-derivative evaluator is
/// absent, derivatives fall back to central finite differences.
struct FormField {
  int dim = 0;
  int degree = 0;
  std::function<Form(std::span<const double>)> eval;
  /// Partial derivative of every coefficient w.r.t. coordinate k.
  std::function<Form(std::span<const double>, int)> partial;

  Form operator()(std::span<const double> at) const;
};

inline constexpr double kDefaultFdStep = 1e-5;

/// Exterior derivative d(f) at a point: analytic partials when supplied,
/// otherwise central differences with step scaled by max(1, |coordinate|).
Form exterior_derivative(const FormField& f, std::span<const double> at,
                         double step = kDefaultFdStep);

}  // namespace dwgeom

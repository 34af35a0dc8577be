#include "dwgeom/form_field.hpp"

#include <cmath>

namespace dwgeom {

Form FormField::operator()(std::span<const double> at) const {
  Form f = eval(at);
  if (f.dim() != dim || f.degree() != degree)
    throw algebra_error("form field evaluator returned wrong dimension or degree");
  return f;
}

Form exterior_derivative(const FormField& f, std::span<const double> at, double step) {
  if (step <= 0.0) throw algebra_error("exterior derivative requires step > 0");
  Form d(f.dim, f.degree + 1);
  std::vector<double> pt(at.begin(), at.end());
  for (int k = 0; k < f.dim; ++k) {
    Form dk(f.dim, f.degree);
    if (f.partial) {
      dk = f.partial(at, k);
    } else {
      double h = step * std::max(1.0, std::abs(pt[k]));
      double saved = pt[k];
      pt[k] = saved + h;
      Form plus = f(pt);
      pt[k] = saved - h;
      Form minus = f(pt);
      pt[k] = saved;
      dk = (1.0 / (2.0 * h)) * (plus - minus);
    }
    d += wedge(Form::basis_covector(f.dim, k), dk);
  }
  return d;
}

}  // namespace dwgeom

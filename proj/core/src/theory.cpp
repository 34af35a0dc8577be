#include "dwgeom/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace dwgeom {

namespace {

// Metric weight of direction mu in the kinetic term, signature (+,-,...,-).
double sig(int mu) { return mu == 0 ? 1.0 : -1.0; }

}  // namespace

Theory make_scalar_theory(std::string name, int n, std::function<double(double)> V,
                          std::function<double(double)> dV) {
  Theory th;
  th.name = std::move(name);
  th.n = n;
  th.N = 1;
  th.V = V;
  th.dV = dV;

  th.L.n = n;
  th.L.N = 1;
  th.L.regular = true;
  th.L.value = [n, V](Coords, Coords q, Coords v) {
    double kin = 0.0;
    for (int mu = 0; mu < n; ++mu) kin += 0.5 * sig(mu) * v[mu] * v[mu];
    return kin - V(q[0]);
  };
  th.L.d_q = [dV](Coords, Coords q, Coords, int) { return -dV(q[0]); };
  th.L.d_v = [](Coords, Coords, Coords v, int mu, int) { return sig(mu) * v[mu]; };

  th.H.n = n;
  th.H.N = 1;
  th.H.value = [n, V](Coords, Coords q, Coords p) {
    double kin = 0.0;
    for (int mu = 0; mu < n; ++mu) kin += 0.5 * sig(mu) * p[mu] * p[mu];
    return kin + V(q[0]);
  };
  th.H.d_x = [](Coords, Coords, Coords, int) { return 0.0; };
  th.H.d_q = [dV](Coords, Coords q, Coords, int) { return dV(q[0]); };
  th.H.d_p = [](Coords, Coords, Coords p, int mu, int) { return sig(mu) * p[mu]; };
  return th;
}

Theory make_oscillator() {
  return make_scalar_theory(
      "oscillator", 1, [](double q) { return 0.5 * q * q; }, [](double q) { return q; });
}

Theory make_free_scalar(double mass) {
  Theory th = make_scalar_theory(
      "free-scalar", 2, [mass](double q) { return 0.5 * mass * mass * q * q; },
      [mass](double q) { return mass * mass * q; });
  th.mass = mass;
  return th;
}

Theory make_sine_gordon() {
  return make_scalar_theory(
      "sine-gordon", 2, [](double q) { return 1.0 - std::cos(q); },
      [](double q) { return std::sin(q); });
}

Theory builtin_theory(const std::string& name, double mass) {
  if (name == "oscillator") return make_oscillator();
  if (name == "free-scalar") return make_free_scalar(mass);
  if (name == "sine-gordon") return make_sine_gordon();
  throw std::invalid_argument("unknown builtin theory: " + name);
}

}  // namespace dwgeom

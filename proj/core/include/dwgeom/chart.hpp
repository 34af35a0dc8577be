#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dwgeom {

struct chart_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Coordinate chart of the multisymplectic phase space over an n-dimensional
/// base with N field components. The D = (N+1)(n+1) coordinates are ordered
/// x^1..x^n, q^1..q^N, p^mu_i (mu-major), p.
class ChartSpec {
 public:
  ChartSpec(int n, int N);
  ChartSpec(int n, int N, std::vector<std::string> names);

  int n() const { return n_; }
  int N() const { return N_; }
  int dim() const { return (N_ + 1) * (n_ + 1); }

  // 0-based chart indices; mu in [0, n), i in [0, N)
  int x_index(int mu) const { return mu; }
  int q_index(int i) const { return n_ + i; }
  int p_index(int mu, int i) const { return n_ + N_ + mu * N_ + i; }
  int p_index() const { return dim() - 1; }

  const std::vector<std::string>& names() const { return names_; }

 private:
  void validate() const;

  int n_;
  int N_;
  std::vector<std::string> names_;
};

/// A point (x^mu, q^i, p^mu_i, p) of the phase space chart.
struct ChartPoint {
  std::vector<double> x;     // size n
  std::vector<double> q;     // size N
  std::vector<double> pmom;  // size n*N, mu-major
  double p = 0.0;

  double& pm(const ChartSpec& spec, int mu, int i) { return pmom[mu * spec.N() + i]; }
  double pm(const ChartSpec& spec, int mu, int i) const { return pmom[mu * spec.N() + i]; }

  std::vector<double> to_flat(const ChartSpec& spec) const;
  static ChartPoint from_flat(const ChartSpec& spec, std::span<const double> flat);
  static ChartPoint zero(const ChartSpec& spec);

  void check_shape(const ChartSpec& spec) const;
};

/// A point (x^mu, q^i) of the extended configuration space E.
struct ConfigPoint {
  std::vector<double> x;
  std::vector<double> q;
};

/// First-jet coordinates (x^mu, q^i, q^i_mu).
struct JetPoint {
  std::vector<double> x;
  std::vector<double> q;
  std::vector<double> v;  // size n*N, mu-major

  double& vm(const ChartSpec& spec, int mu, int i) { return v[mu * spec.N() + i]; }
  double vm(const ChartSpec& spec, int mu, int i) const { return v[mu * spec.N() + i]; }
};

}  // namespace dwgeom

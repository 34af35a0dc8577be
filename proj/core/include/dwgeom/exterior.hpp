#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dwgeom {

struct algebra_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Coefficients smaller than this are dropped after arithmetic; they are
/// below double-precision meaningfulness and would only rot the sparsity.
inline constexpr double kCoeffEpsilon = 1e-15;

namespace detail {

// Antisymmetric coefficient table of fixed degree over a basis of dimension
// dim <= 64. A strictly increasing index tuple is encoded as a bitmask; the
// map is ordered, so iteration (and hence any serialization) is deterministic.
class AltTable {
 public:
  AltTable(int dim, int degree);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  bool is_zero() const { return coeffs_.empty(); }

  // mask must have popcount == degree
  void add(std::uint64_t mask, double c);
  void set(std::uint64_t mask, double c);
  double coeff(std::uint64_t mask) const;
  const std::map<std::uint64_t, double>& coeffs() const { return coeffs_; }

  AltTable& operator+=(const AltTable& o);
  AltTable& operator-=(const AltTable& o);
  AltTable& operator*=(double s);

  double max_abs_coeff() const;
  void prune();

  std::string to_string(std::span<const std::string> labels, const char* basis_prefix) const;

 private:
  int dim_;
  int degree_;
  std::map<std::uint64_t, double> coeffs_;
};

AltTable wedge(const AltTable& a, const AltTable& b);

// i_{e_T} applied to a table of covariant type: T's indices are inserted into
// the leading argument slots in increasing order (slot convention
// i_{Z_1^...^Z_r} a = a(Z_1,...,Z_r, .)).
AltTable contract(const AltTable& multi, const AltTable& form);

double max_abs_diff(const AltTable& a, const AltTable& b);

}  // namespace detail

/// Antisymmetric contravariant tensor (wedge of tangent directions).
class Multivector {
 public:
  Multivector(int dim, int degree) : t_(dim, degree) {}

  static Multivector basis_vector(int dim, int index);
  /// Degree-1 multivector with the given components.
  static Multivector from_components(std::span<const double> components);

  int dim() const { return t_.dim(); }
  int degree() const { return t_.degree(); }
  bool is_zero() const { return t_.is_zero(); }

  void add(std::uint64_t mask, double c) { t_.add(mask, c); }
  void set(std::uint64_t mask, double c) { t_.set(mask, c); }
  double coeff(std::uint64_t mask) const { return t_.coeff(mask); }
  /// Component of a degree-1 multivector along basis direction k.
  double component(int k) const { return t_.coeff(std::uint64_t{1} << k); }
  const std::map<std::uint64_t, double>& coeffs() const { return t_.coeffs(); }

  double max_abs_coeff() const { return t_.max_abs_coeff(); }
  std::string to_string(std::span<const std::string> labels = {}) const;

  Multivector& operator+=(const Multivector& o) { t_ += o.t_; return *this; }
  Multivector& operator-=(const Multivector& o) { t_ -= o.t_; return *this; }
  Multivector& operator*=(double s) { t_ *= s; return *this; }

  const detail::AltTable& table() const { return t_; }
  detail::AltTable& table() { return t_; }

 private:
  detail::AltTable t_;
};

/// Antisymmetric covariant tensor (differential form with constant
/// coefficients over a chart basis).
class Form {
 public:
  Form(int dim, int degree) : t_(dim, degree) {}

  static Form basis_covector(int dim, int index);
  static Form constant(int dim, double value);

  int dim() const { return t_.dim(); }
  int degree() const { return t_.degree(); }
  bool is_zero() const { return t_.is_zero(); }

  void add(std::uint64_t mask, double c) { t_.add(mask, c); }
  void set(std::uint64_t mask, double c) { t_.set(mask, c); }
  double coeff(std::uint64_t mask) const { return t_.coeff(mask); }
  const std::map<std::uint64_t, double>& coeffs() const { return t_.coeffs(); }

  double max_abs_coeff() const { return t_.max_abs_coeff(); }
  std::string to_string(std::span<const std::string> labels = {}) const;

  Form& operator+=(const Form& o) { t_ += o.t_; return *this; }
  Form& operator-=(const Form& o) { t_ -= o.t_; return *this; }
  Form& operator*=(double s) { t_ *= s; return *this; }

  const detail::AltTable& table() const { return t_; }
  detail::AltTable& table() { return t_; }

 private:
  detail::AltTable t_;
};

Multivector wedge(const Multivector& a, const Multivector& b);
Form wedge(const Form& a, const Form& b);

Multivector operator+(Multivector a, const Multivector& b);
Multivector operator-(Multivector a, const Multivector& b);
Multivector operator*(double s, Multivector a);
Form operator+(Form a, const Form& b);
Form operator-(Form a, const Form& b);
Form operator*(double s, Form a);

/// i_X applied to a form, X of degree r <= deg(a); slot convention
/// i_{Z_1^...^Z_r} a = a(Z_1,...,Z_r, .) extended linearly in X.
Form contract(const Multivector& X, const Form& a);

/// Wedge of a list of degree-1 multivectors. The zero multivector signals
/// linear dependence of the list.
Multivector wedge_all(std::span<const Multivector> vectors);

double max_abs_diff(const Multivector& a, const Multivector& b);
double max_abs_diff(const Form& a, const Form& b);

}  // namespace dwgeom

#include "dwgeom/exterior.hpp"

#include <bit>
#include <cmath>
#include <sstream>

namespace dwgeom {
namespace detail {

namespace {

int popcount(std::uint64_t m) { return std::popcount(m); }

// Parity of #{(a,b) : a in A, b in B, a > b}; the sign of sorting the
// concatenation (A increasing)(B increasing) into one increasing tuple.
int merge_sign(std::uint64_t a, std::uint64_t b) {
  int inversions = 0;
  std::uint64_t rest = b;
  while (rest) {
    int bbit = std::countr_zero(rest);
    rest &= rest - 1;
    inversions += popcount(a >> (bbit + 1));
  }
  return (inversions & 1) ? -1 : 1;
}

}  // namespace

AltTable::AltTable(int dim, int degree) : dim_(dim), degree_(degree) {
  if (dim < 0 || dim > 64) throw algebra_error("basis dimension must be in [0, 64]");
  if (degree < 0 || degree > dim) throw algebra_error("degree out of range for basis dimension");
}

void AltTable::add(std::uint64_t mask, double c) {
  if (popcount(mask) != degree_) throw algebra_error("index tuple size does not match degree");
  if (mask >> dim_) throw algebra_error("basis index out of range");
  double& slot = coeffs_[mask];
  slot += c;
  if (std::abs(slot) < kCoeffEpsilon) coeffs_.erase(mask);
}

void AltTable::set(std::uint64_t mask, double c) {
  if (popcount(mask) != degree_) throw algebra_error("index tuple size does not match degree");
  if (mask >> dim_) throw algebra_error("basis index out of range");
  if (std::abs(c) < kCoeffEpsilon) {
    coeffs_.erase(mask);
  } else {
    coeffs_[mask] = c;
  }
}

double AltTable::coeff(std::uint64_t mask) const {
  auto it = coeffs_.find(mask);
  return it == coeffs_.end() ? 0.0 : it->second;
}

AltTable& AltTable::operator+=(const AltTable& o) {
  if (dim_ != o.dim_ || degree_ != o.degree_)
    throw algebra_error("mismatched operands in addition");
  for (const auto& [m, c] : o.coeffs_) add(m, c);
  return *this;
}

AltTable& AltTable::operator-=(const AltTable& o) {
  if (dim_ != o.dim_ || degree_ != o.degree_)
    throw algebra_error("mismatched operands in subtraction");
  for (const auto& [m, c] : o.coeffs_) add(m, -c);
  return *this;
}

AltTable& AltTable::operator*=(double s) {
  for (auto it = coeffs_.begin(); it != coeffs_.end();) {
    it->second *= s;
    if (std::abs(it->second) < kCoeffEpsilon) {
      it = coeffs_.erase(it);
    } else {
      ++it;
    }
  }
  return *this;
}

double AltTable::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& [mask, c] : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

void AltTable::prune() {
  for (auto it = coeffs_.begin(); it != coeffs_.end();) {
    if (std::abs(it->second) < kCoeffEpsilon) {
      it = coeffs_.erase(it);
    } else {
      ++it;
    }
  }
}

std::string AltTable::to_string(std::span<const std::string> labels,
                                const char* basis_prefix) const {
  if (coeffs_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [mask, c] : coeffs_) {
    if (!first) os << " + ";
    first = false;
    os << c;
    std::uint64_t rest = mask;
    bool first_idx = true;
    while (rest) {
      int k = std::countr_zero(rest);
      rest &= rest - 1;
      os << (first_idx ? " " : "^");
      first_idx = false;
      if (k < static_cast<int>(labels.size())) {
        os << basis_prefix << labels[k];
      } else {
        os << basis_prefix << "e" << k;
      }
    }
  }
  return os.str();
}

AltTable wedge(const AltTable& a, const AltTable& b) {
  if (a.dim() != b.dim()) throw algebra_error("wedge operands over different charts");
  int deg = a.degree() + b.degree();
  if (deg > a.dim()) throw algebra_error("wedge degree exceeds basis dimension");
  AltTable r(a.dim(), deg);
  for (const auto& [ma, ca] : a.coeffs()) {
    for (const auto& [mb, cb] : b.coeffs()) {
      if (ma & mb) continue;
      r.add(ma | mb, merge_sign(ma, mb) * ca * cb);
    }
  }
  r.prune();
  return r;
}

namespace {

// i_{e_k} on a single basis form term.
void contract_single_index(int k, const AltTable& form, AltTable& out, double scale) {
  std::uint64_t bit = std::uint64_t{1} << k;
  for (const auto& [m, c] : form.coeffs()) {
    if (!(m & bit)) continue;
    int pos = popcount(m & (bit - 1));
    double sign = (pos & 1) ? -1.0 : 1.0;
    out.add(m & ~bit, scale * sign * c);
  }
}

}  // namespace

AltTable contract(const AltTable& multi, const AltTable& form) {
  if (multi.dim() != form.dim()) throw algebra_error("contract operands over different charts");
  if (multi.degree() > form.degree())
    throw algebra_error("contraction degree exceeds form degree");
  AltTable r(form.dim(), form.degree() - multi.degree());
  for (const auto& [tm, tc] : multi.coeffs()) {
    // e_T = e_{t1}^...^e_{tr} with t1 < ... < tr inserts t1 into the first
    // slot, so the single contractions apply in increasing index order.
    AltTable cur = form;
    std::uint64_t rest = tm;
    while (rest && !cur.is_zero()) {
      int k = std::countr_zero(rest);
      rest &= rest - 1;
      AltTable next(cur.dim(), cur.degree() - 1);
      contract_single_index(k, cur, next, 1.0);
      cur = std::move(next);
    }
    if (!rest) {
      cur *= tc;
      r += cur;
    }
  }
  r.prune();
  return r;
}

double max_abs_diff(const AltTable& a, const AltTable& b) {
  AltTable d = a;
  d -= b;
  return d.max_abs_coeff();
}

}  // namespace detail

Multivector Multivector::basis_vector(int dim, int index) {
  Multivector v(dim, 1);
  v.set(std::uint64_t{1} << index, 1.0);
  return v;
}

Multivector Multivector::from_components(std::span<const double> components) {
  Multivector v(static_cast<int>(components.size()), 1);
  for (std::size_t k = 0; k < components.size(); ++k)
    v.set(std::uint64_t{1} << k, components[k]);
  return v;
}

std::string Multivector::to_string(std::span<const std::string> labels) const {
  return t_.to_string(labels, "d/d");
}

Form Form::basis_covector(int dim, int index) {
  Form f(dim, 1);
  f.set(std::uint64_t{1} << index, 1.0);
  return f;
}

Form Form::constant(int dim, double value) {
  Form f(dim, 0);
  f.set(0, value);
  return f;
}

std::string Form::to_string(std::span<const std::string> labels) const {
  return t_.to_string(labels, "d");
}

Multivector wedge(const Multivector& a, const Multivector& b) {
  Multivector r(a.dim(), 0);
  r.table() = detail::wedge(a.table(), b.table());
  return r;
}

Form wedge(const Form& a, const Form& b) {
  Form r(a.dim(), 0);
  r.table() = detail::wedge(a.table(), b.table());
  return r;
}

Multivector operator+(Multivector a, const Multivector& b) { a += b; return a; }
Multivector operator-(Multivector a, const Multivector& b) { a -= b; return a; }
Multivector operator*(double s, Multivector a) { a *= s; return a; }
Form operator+(Form a, const Form& b) { a += b; return a; }
Form operator-(Form a, const Form& b) { a -= b; return a; }
Form operator*(double s, Form a) { a *= s; return a; }

Form contract(const Multivector& X, const Form& a) {
  Form r(a.dim(), 0);
  r.table() = detail::contract(X.table(), a.table());
  return r;
}

Multivector wedge_all(std::span<const Multivector> vectors) {
  if (vectors.empty()) throw algebra_error("wedge_all needs at least one vector");
  Multivector r = vectors[0];
  for (std::size_t k = 1; k < vectors.size(); ++k) r = wedge(r, vectors[k]);
  return r;
}

double max_abs_diff(const Multivector& a, const Multivector& b) {
  return detail::max_abs_diff(a.table(), b.table());
}

double max_abs_diff(const Form& a, const Form& b) {
  return detail::max_abs_diff(a.table(), b.table());
}

}  // namespace dwgeom

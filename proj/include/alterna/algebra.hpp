#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace alterna {

inline constexpr int kMaxAlgebraDim = 32;

// Coefficient vector over the real basis of a finite-dimensional algebra.
// Fixed capacity keeps the integration loops free of heap traffic.
class Element {
 public:
  Element() = default;
  explicit Element(int dim) : n_(dim) {
    if (dim < 0 || dim > kMaxAlgebraDim) throw std::invalid_argument("Element: bad dimension");
  }
  int dim() const { return n_; }
  double& operator[](int i) { return c_[i]; }
  double operator[](int i) const { return c_[i]; }
  double* data() { return c_.data(); }
  const double* data() const { return c_.data(); }

 private:
  std::array<double, kMaxAlgebraDim> c_{};
  int n_ = 0;
};

inline void check_same_dim(const Element& a, const Element& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("Element: dimension mismatch");
}

inline Element& operator+=(Element& a, const Element& b) {
  check_same_dim(a, b);
  for (int i = 0; i < a.dim(); ++i) a[i] += b[i];
  return a;
}

inline Element& operator-=(Element& a, const Element& b) {
  check_same_dim(a, b);
  for (int i = 0; i < a.dim(); ++i) a[i] -= b[i];
  return a;
}

inline Element& operator*=(Element& a, double s) {
  for (int i = 0; i < a.dim(); ++i) a[i] *= s;
  return a;
}

inline Element operator+(Element a, const Element& b) { return a += b; }
inline Element operator-(Element a, const Element& b) { return a -= b; }
inline Element operator*(double s, Element a) { return a *= s; }
inline Element operator*(Element a, double s) { return a *= s; }
inline Element operator/(Element a, double s) { return a *= 1.0 / s; }
inline Element operator-(Element a) { return a *= -1.0; }

// y += s * x
inline Element& axpy(Element& y, double s, const Element& x) {
  check_same_dim(y, x);
  for (int i = 0; i < y.dim(); ++i) y[i] += s * x[i];
  return y;
}

inline double norm(const Element& a) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += a[i] * a[i];
  return std::sqrt(s);
}

inline double max_abs(const Element& a) {
  double m = 0.0;
  for (int i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

inline bool all_finite(const Element& a) {
  for (int i = 0; i < a.dim(); ++i)
    if (!std::isfinite(a[i])) return false;
  return true;
}

struct AlgebraError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Real algebra with unity at basis index 0, a sparse structure-constant table
// and a signed-permutation anti-involution. Built-in constructors produce
// integer tables, so the basis-level law checks are exact in floating point.
class Algebra {
 public:
  struct Term {
    int u;
    double v;
  };

  static Algebra complex_numbers();
  static Algebra quaternions();
  static Algebra octonions();       // Cayley-Dickson doubling of the quaternions
  static Algebra clifford(int m);   // Cl(0, m), blades ordered by (grade, lex)
  static Algebra from_file(const std::string& path);
  static Algebra from_json_text(const std::string& text);
  static Algebra by_name(const std::string& kind);  // "complex", "quaternions", ...

  Algebra(int dim, std::string name,
          const std::vector<std::array<double, 4>>& structure,   // (s, t, u, value)
          const std::vector<std::array<double, 3>>& involution,  // (s, s', sign)
          std::vector<std::string> basis_names = {});

  // Throws AlgebraError naming the violated invariant.
  void validate(double tol = 1e-10) const;

  int dim() const { return dim_; }
  const std::string& name() const { return name_; }
  const std::string& basis_name(int s) const { return basis_names_[s]; }

  Element zero() const { return Element(dim_); }
  Element one() const { return basis(0); }
  Element basis(int s) const;
  Element from_real(double r) const;

  Element mul(const Element& x, const Element& y) const;
  Element conj(const Element& x) const;
  Element trace(const Element& x) const;  // x + conj(x)
  Element qnorm(const Element& x) const;  // x * conj(x)
  Element associator(const Element& x, const Element& y, const Element& z) const;

  bool is_imaginary_unit(const Element& x, double tol = 1e-10) const;
  bool quadratic_cone_contains(const Element& x, double tol = 1e-10) const;
  // r if x == r * 1 within tol, otherwise empty.
  std::optional<double> real_scalar(const Element& x, double tol = 1e-10) const;

  // Basis product v_s * v_t as a sparse term list (table introspection).
  std::vector<Term> product_terms(int s, int t) const;
  // Image of v_s under the involution: (index, sign).
  std::pair<int, double> involution_image(int s) const { return {invo_perm_[s], invo_sign_[s]}; }

  std::string to_json_text() const;

 private:
  Algebra() = default;
  void build_offsets(std::vector<std::vector<Term>>& rows);

  int dim_ = 0;
  std::string name_;
  std::vector<int> off_;      // dim*dim + 1 offsets into terms_
  std::vector<Term> terms_;
  std::vector<int> invo_perm_;
  std::vector<double> invo_sign_;
  std::vector<std::string> basis_names_;
};

}  // namespace alterna

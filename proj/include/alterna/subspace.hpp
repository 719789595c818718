#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "alterna/algebra.hpp"

namespace alterna {

// Point of M^n stored as n blocks of (m+1) real coordinates. j is 1-based
// throughout the library (matching the variable index of the operators),
// the in-block coordinate s is 0-based with s = 0 the real direction.
class MultiPoint {
 public:
  MultiPoint() = default;
  MultiPoint(int n, int stride) : n_(n), stride_(stride) {
    if (n < 1 || stride < 1 || n * stride > kMaxAlgebraDim)
      throw std::invalid_argument("MultiPoint: bad shape");
  }
  static MultiPoint from_coords(int n, int stride, std::span<const double> coords);

  int n() const { return n_; }
  int stride() const { return stride_; }
  int dim() const { return n_ * stride_; }

  double& operator[](int flat) { return x_[flat]; }
  double operator[](int flat) const { return x_[flat]; }
  double& coord(int j, int s) { return x_[(j - 1) * stride_ + s]; }
  double coord(int j, int s) const { return x_[(j - 1) * stride_ + s]; }
  std::span<const double> block(int j) const { return {x_.data() + (j - 1) * stride_, size_t(stride_)}; }
  double* data() { return x_.data(); }
  const double* data() const { return x_.data(); }

 private:
  std::array<double, kMaxAlgebraDim> x_{};
  int n_ = 0, stride_ = 0;
};

MultiPoint operator+(MultiPoint a, const MultiPoint& b);
MultiPoint operator-(MultiPoint a, const MultiPoint& b);
MultiPoint operator*(double s, MultiPoint a);
double norm(const MultiPoint& p);
double dot(const MultiPoint& a, const MultiPoint& b);

struct BasisViolation {
  std::string condition;
  int s = -1, t = -1;
  double residual = 0.0;
};

struct ValidationReport {
  std::vector<BasisViolation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

// Hypercomplex subspace of an algebra: an orthonormal-style basis
// (v_0 = 1, v_1, ..., v_m) of imaginary units spanning M inside the
// quadratic cone.
class Subspace {
 public:
  Subspace(std::shared_ptr<const Algebra> algebra, std::vector<Element> basis);

  // Built-in models: H-CJ, H-reduced, H-full, O-full, Cl02-paravec, Cl03-paravec.
  static std::shared_ptr<const Subspace> preset(const std::string& name);
  static const std::vector<std::string>& preset_names();

  const Algebra& algebra() const { return *algebra_; }
  std::shared_ptr<const Algebra> algebra_ptr() const { return algebra_; }
  int m() const { return m_; }
  int stride() const { return m_ + 1; }
  const Element& basis_vector(int s) const { return basis_[s]; }
  const std::string& name() const { return name_; }

  // Reports every violated basis condition instead of failing on the first.
  ValidationReport validate(double tol = 1e-10) const;

  Element embed(int j, const MultiPoint& p) const;  // sum_s x_{j,s} v_s
  Element embed_block(std::span<const double> block) const;
  Element embed_conj_block(std::span<const double> block) const;  // sum_s x_s conj(v_s)

 private:
  std::shared_ptr<const Algebra> algebra_;
  std::vector<Element> basis_;
  int m_;
  std::string name_ = "custom";
};

using SubspacePtr = std::shared_ptr<const Subspace>;

struct NormBoundEstimate {
  double c_hat = 0.0;
  long long samples = 0;
};

// Sampled estimate of the smallest C with |xy| <= C |x| |y| for unit x in M:
// the max operator norm of left multiplication, refined by hill climbing.
NormBoundEstimate norm_bound_constant(const Subspace& M, long long samples = 20000,
                                      std::uint64_t seed = 42);

}  // namespace alterna

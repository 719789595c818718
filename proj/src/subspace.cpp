#include "alterna/subspace.hpp"

#include <cmath>
#include <sstream>

#include "alterna/numerics.hpp"

namespace alterna {

MultiPoint MultiPoint::from_coords(int n, int stride, std::span<const double> coords) {
  MultiPoint p(n, stride);
  if (static_cast<int>(coords.size()) != n * stride)
    throw std::invalid_argument("MultiPoint: coordinate count does not match n * (m+1)");
  for (int i = 0; i < n * stride; ++i) p.x_[i] = coords[i];
  return p;
}

MultiPoint operator+(MultiPoint a, const MultiPoint& b) {
  for (int i = 0; i < a.dim(); ++i) a[i] += b[i];
  return a;
}

MultiPoint operator-(MultiPoint a, const MultiPoint& b) {
  for (int i = 0; i < a.dim(); ++i) a[i] -= b[i];
  return a;
}

MultiPoint operator*(double s, MultiPoint a) {
  for (int i = 0; i < a.dim(); ++i) a[i] *= s;
  return a;
}

double norm(const MultiPoint& p) {
  double s = 0.0;
  for (int i = 0; i < p.dim(); ++i) s += p[i] * p[i];
  return std::sqrt(s);
}

double dot(const MultiPoint& a, const MultiPoint& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

std::string ValidationReport::to_string() const {
  if (ok()) return "ok";
  std::ostringstream os;
  for (const auto& v : violations) {
    os << v.condition;
    if (v.s >= 0) os << " [s=" << v.s;
    if (v.t >= 0) os << ", t=" << v.t;
    if (v.s >= 0) os << "]";
    os << " residual=" << v.residual << "\n";
  }
  return os.str();
}

Subspace::Subspace(std::shared_ptr<const Algebra> algebra, std::vector<Element> basis)
    : algebra_(std::move(algebra)), basis_(std::move(basis)) {
  if (!algebra_) throw std::invalid_argument("Subspace: null algebra");
  if (basis_.empty()) throw std::invalid_argument("Subspace: empty basis");
  m_ = static_cast<int>(basis_.size()) - 1;
  for (const Element& v : basis_)
    if (v.dim() != algebra_->dim())
      throw std::invalid_argument("Subspace: basis element dimension mismatch");
}

ValidationReport Subspace::validate(double tol) const {
  ValidationReport rep;
  const Algebra& A = *algebra_;
  double r0 = max_abs(basis_[0] - A.one());
  if (r0 > tol) rep.violations.push_back({"v_0 != 1", 0, -1, r0});
  for (int s = 1; s <= m_; ++s) {
    double rt = max_abs(A.trace(basis_[s]));
    if (rt > tol) rep.violations.push_back({"t(v_s) != 0", s, -1, rt});
    Element n = A.qnorm(basis_[s]);
    n[0] -= 1.0;
    double rn = max_abs(n);
    if (rn > tol) rep.violations.push_back({"n(v_s) != 1", s, -1, rn});
    if (!A.quadratic_cone_contains(basis_[s], tol))
      rep.violations.push_back({"v_s outside quadratic cone", s, -1, 1.0});
  }
  for (int s = 1; s <= m_; ++s) {
    for (int t = s + 1; t <= m_; ++t) {
      Element tr = A.trace(A.mul(basis_[s], A.conj(basis_[t])));
      double r = max_abs(tr);
      if (r > tol) rep.violations.push_back({"t(v_s conj(v_t)) != 0", s, t, r});
    }
  }
  return rep;
}

Element Subspace::embed(int j, const MultiPoint& p) const {
  if (j < 1 || j > p.n()) throw std::invalid_argument("embed: variable index out of range");
  if (p.stride() != stride()) throw std::invalid_argument("embed: point stride does not match subspace");
  return embed_block(p.block(j));
}

Element Subspace::embed_block(std::span<const double> block) const {
  if (static_cast<int>(block.size()) != stride())
    throw std::invalid_argument("embed_block: block size does not match subspace");
  Element r(algebra_->dim());
  for (int s = 0; s <= m_; ++s) axpy(r, block[s], basis_[s]);
  return r;
}

Element Subspace::embed_conj_block(std::span<const double> block) const {
  if (static_cast<int>(block.size()) != stride())
    throw std::invalid_argument("embed_conj_block: block size does not match subspace");
  Element r(algebra_->dim());
  for (int s = 0; s <= m_; ++s) {
    Element c = algebra_->conj(basis_[s]);
    axpy(r, block[s], c);
  }
  return r;
}

const std::vector<std::string>& Subspace::preset_names() {
  static const std::vector<std::string> names = {"H-CJ",        "H-reduced",    "H-full",
                                                 "O-full",      "Cl02-paravec", "Cl03-paravec"};
  return names;
}

std::shared_ptr<const Subspace> Subspace::preset(const std::string& name) {
  auto make = [&](std::shared_ptr<const Algebra> a, std::vector<int> idx) {
    std::vector<Element> basis;
    basis.push_back(a->one());
    for (int i : idx) basis.push_back(a->basis(i));
    auto s = std::make_shared<Subspace>(a, std::move(basis));
    s->name_ = name;
    return s;
  };
  if (name == "H-CJ") {
    auto a = std::make_shared<Algebra>(Algebra::quaternions());
    return make(a, {1});
  }
  if (name == "H-reduced") {
    auto a = std::make_shared<Algebra>(Algebra::quaternions());
    return make(a, {1, 2});
  }
  if (name == "H-full") {
    auto a = std::make_shared<Algebra>(Algebra::quaternions());
    return make(a, {1, 2, 3});
  }
  if (name == "O-full") {
    auto a = std::make_shared<Algebra>(Algebra::octonions());
    return make(a, {1, 2, 3, 4, 5, 6, 7});
  }
  if (name == "Cl02-paravec") {
    auto a = std::make_shared<Algebra>(Algebra::clifford(2));
    return make(a, {1, 2});
  }
  if (name == "Cl03-paravec") {
    auto a = std::make_shared<Algebra>(Algebra::clifford(3));
    return make(a, {1, 2, 3});
  }
  throw std::invalid_argument("unknown subspace preset: " + name);
}

NormBoundEstimate norm_bound_constant(const Subspace& M, long long samples, std::uint64_t seed) {
  const Algebra& A = M.algebra();
  const int dim = A.dim();
  const int k = M.stride();

  auto op_norm = [&](const std::vector<double>& coeff) {
    // Left-multiplication matrix columns are x * e_t.
    Element x(A.dim());
    for (int s = 0; s < k; ++s) axpy(x, coeff[s], M.basis_vector(s));
    std::vector<double> L(dim * dim, 0.0);
    for (int t = 0; t < dim; ++t) {
      Element col = A.mul(x, A.basis(t));
      for (int u = 0; u < dim; ++u) L[u * dim + t] = col[u];
    }
    std::vector<double> g(dim * dim, 0.0);  // L^T L
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        double s = 0.0;
        for (int u = 0; u < dim; ++u) s += L[u * dim + i] * L[u * dim + j];
        g[i * dim + j] = s;
      }
    auto ev = sym_eigenvalues(std::move(g), dim);
    return std::sqrt(std::max(0.0, ev.back()));
  };

  Rng rng(mix_seed(seed, 0xB0D7));
  auto random_unit = [&]() {
    std::vector<double> c(k);
    double n2 = 0.0;
    do {
      n2 = 0.0;
      for (int s = 0; s < k; ++s) {
        c[s] = rng.normal();
        n2 += c[s] * c[s];
      }
    } while (n2 < 1e-12);
    double inv = 1.0 / std::sqrt(n2);
    for (double& v : c) v *= inv;
    return c;
  };

  double best = 0.0;
  std::vector<double> best_c;
  for (long long i = 0; i < samples; ++i) {
    auto c = random_unit();
    double v = op_norm(c);
    if (v > best) {
      best = v;
      best_c = c;
    }
  }
  // Local refinement around the best sample.
  double radius = 0.3;
  for (int it = 0; it < 300; ++it) {
    std::vector<double> c(k);
    double n2 = 0.0;
    for (int s = 0; s < k; ++s) {
      c[s] = best_c[s] + radius * rng.normal();
      n2 += c[s] * c[s];
    }
    double inv = 1.0 / std::sqrt(n2);
    for (double& v : c) v *= inv;
    double v = op_norm(c);
    if (v > best) {
      best = v;
      best_c = c;
    } else {
      radius *= 0.97;
    }
  }
  return {best, samples};
}

}  // namespace alterna

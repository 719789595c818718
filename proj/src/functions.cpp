#include "alterna/functions.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "alterna/kernels.hpp"

namespace alterna {

namespace {

double fd_step(const MultiPoint& x, int k, double h_rel) {
  double h = h_rel * std::max(1.0, std::abs(x[k]));
  volatile double probe = x[k] + h;
  if (probe == x[k]) throw std::invalid_argument("finite difference: step underflows coordinate");
  return h;
}

Element central4(const std::function<Element(const MultiPoint&)>& F, const MultiPoint& x, int k,
                 double h) {
  MultiPoint p = x;
  auto at = [&](double off) {
    p[k] = x[k] + off;
    return F(p);
  };
  Element v = at(2 * h) * -1.0 + at(h) * 8.0 + at(-h) * -8.0 + at(-2 * h);
  return v * (1.0 / (12.0 * h));
}

Element fd_partial_impl(const std::function<Element(const MultiPoint&)>& F, const MultiPoint& x,
                        int k, const FdOptions& opt, double* spread) {
  double h = fd_step(x, k, opt.h_rel);
  Element d1 = central4(F, x, k, h);
  if (!opt.richardson) {
    if (spread) *spread = 0.0;
    return d1;
  }
  Element d2 = central4(F, x, k, 0.5 * h);
  Element out = (d2 * 16.0 - d1) * (1.0 / 15.0);
  if (spread) *spread = max_abs(d2 - d1) / 15.0;
  return out;
}

using BasisFactor = std::function<Element(const Subspace&, int s)>;

DiracResult dirac_like(const FieldFunction& F, int j, const MultiPoint& x, const FdOptions& opt,
                       bool force_fd, bool right_side, const BasisFactor& factor) {
  if (!F.eval) throw std::invalid_argument("dirac: function has no eval");
  if (j < 1 || j > F.n) throw std::invalid_argument("dirac: variable index out of range");
  const Subspace& S = *F.S;
  const Algebra& A = S.algebra();
  if (F.analytic_dbar && !force_fd && !right_side && factor == nullptr)
    return {F.analytic_dbar(j, x), DiracResult::Method::analytic, 0.0};
  Element acc = A.zero();
  double err = 0.0;
  int stride = S.stride();
  for (int s = 0; s < stride; ++s) {
    double sp = 0.0;
    Element d = fd_partial_impl(F.eval, x, (j - 1) * stride + s, opt, &sp);
    err = std::max(err, sp);
    Element b = factor ? factor(S, s) : S.basis_vector(s);
    acc += right_side ? A.mul(d, b) : A.mul(b, d);
  }
  return {acc, DiracResult::Method::fd, err};
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::vector<double> parse_reals(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const auto& tok : split(s, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw std::invalid_argument("parse_function: bad number '" + tok + "' in " + what);
    }
  }
  return out;
}

int parse_int(const std::string& tok, const std::string& what) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("parse_function: bad integer '" + tok + "' in " + what);
  }
}

Element coeffs_to_element(const Algebra& A, const std::vector<double>& c, const std::string& what) {
  if (c.size() == 1) return A.from_real(c[0]);
  if (int(c.size()) != A.dim())
    throw std::invalid_argument("parse_function: " + what + " needs 1 or " +
                                std::to_string(A.dim()) + " coefficients");
  Element e = A.zero();
  for (int i = 0; i < A.dim(); ++i) e[i] = c[std::size_t(i)];
  return e;
}

}  // namespace

double fd_partial_scalar(const std::function<double(const MultiPoint&)>& g, const MultiPoint& x,
                         int k, const FdOptions& opt) {
  double h = fd_step(x, k, opt.h_rel);
  auto d = [&](double step) {
    MultiPoint p = x;
    auto at = [&](double off) {
      p[k] = x[k] + off;
      return g(p);
    };
    return (-at(2 * step) + 8 * at(step) - 8 * at(-step) + at(-2 * step)) / (12 * step);
  };
  double d1 = d(h);
  if (!opt.richardson) return d1;
  return (16 * d(0.5 * h) - d1) / 15;
}

Element fd_partial(const std::function<Element(const MultiPoint&)>& F, const MultiPoint& x, int k,
                   const FdOptions& opt) {
  return fd_partial_impl(F, x, k, opt, nullptr);
}

DiracResult dirac(const FieldFunction& F, int j, const MultiPoint& x, const FdOptions& opt,
                  bool force_fd) {
  return dirac_like(F, j, x, opt, force_fd, false, nullptr);
}

DiracResult conj_dirac(const FieldFunction& F, int j, const MultiPoint& x, const FdOptions& opt) {
  return dirac_like(F, j, x, opt, true, false,
                    [](const Subspace& S, int s) { return S.algebra().conj(S.basis_vector(s)); });
}

DiracResult right_dirac(const FieldFunction& F, int j, const MultiPoint& x, const FdOptions& opt) {
  return dirac_like(F, j, x, opt, true, true, nullptr);
}

Element laplacian_block_fd(const std::function<Element(const MultiPoint&)>& F, const MultiPoint& x,
                           int j, int stride, double h_rel) {
  double scale = std::max(1.0, norm(x));
  Element acc = F(x) * 0.0;
  Element f0 = F(x);
  for (int s = 0; s < stride; ++s) {
    int k = (j - 1) * stride + s;
    double h = h_rel * scale;
    MultiPoint p = x;
    auto at = [&](double off) {
      p[k] = x[k] + off;
      return F(p);
    };
    Element second = at(2 * h) * -1.0 + at(h) * 16.0 + f0 * -30.0 + at(-h) * 16.0 + at(-2 * h) * -1.0;
    acc += second * (1.0 / (12.0 * h * h));
  }
  return acc;
}

bool is_monogenic_at(const FieldFunction& F, const MultiPoint& x, double tol, const FdOptions& opt,
                     bool force_fd) {
  for (int j = 1; j <= F.n; ++j)
    if (max_abs(dirac(F, j, x, opt, force_fd).value) > tol) return false;
  return true;
}

FieldFunction ff_constant(SubspacePtr S, int n, const Element& c) {
  FieldFunction f;
  f.S = S;
  f.n = n;
  const Algebra& A = S->algebra();
  check_same_dim(c, A.zero());
  f.eval = [c](const MultiPoint&) { return c; };
  Element z = A.zero();
  f.analytic_dbar = [z](int, const MultiPoint&) { return z; };
  f.label = "constant";
  return f;
}

FieldFunction ff_coordinate(SubspacePtr S, int n, int j, int s) {
  if (j < 1 || j > n || s < 0 || s >= S->stride())
    throw std::invalid_argument("ff_coordinate: index out of range");
  FieldFunction f;
  f.S = S;
  f.n = n;
  const Algebra& A = S->algebra();
  f.eval = [S, j, s](const MultiPoint& x) { return S->algebra().from_real(x.coord(j, s)); };
  Element vs = S->basis_vector(s), z = A.zero();
  f.analytic_dbar = [j, vs, z](int i, const MultiPoint&) { return i == j ? vs : z; };
  f.label = "coordinate:" + std::to_string(j) + "," + std::to_string(s);
  return f;
}

FieldFunction ff_fueter(SubspacePtr S, int n, int j, int s) {
  if (j < 1 || j > n || s < 1 || s >= S->stride())
    throw std::invalid_argument("ff_fueter: need 1 <= j <= n and 1 <= s <= m");
  FieldFunction f;
  f.S = S;
  f.n = n;
  const Algebra& A = S->algebra();
  Element vs = S->basis_vector(s), z = A.zero();
  f.eval = [S, j, s, vs](const MultiPoint& x) {
    Element e = S->algebra().from_real(x.coord(j, s));
    axpy(e, -x.coord(j, 0), vs);
    return e;
  };
  f.analytic_dbar = [z](int, const MultiPoint&) { return z; };
  f.label = "fueter:" + std::to_string(j) + "," + std::to_string(s);
  return f;
}

FieldFunction ff_cauchy_pullback(SubspacePtr S, int n, int j, const std::vector<double>& a) {
  if (j < 1 || j > n) throw std::invalid_argument("ff_cauchy_pullback: variable index out of range");
  if (int(a.size()) != S->stride())
    throw std::invalid_argument("ff_cauchy_pullback: center needs m+1 coordinates");
  FieldFunction f;
  f.S = S;
  f.n = n;
  KernelContext K = make_kernel_context(S, 1);
  int stride = S->stride();
  f.eval = [K, a, j, stride](const MultiPoint& x) {
    MultiPoint u(1, stride);
    for (int s = 0; s < stride; ++s) u[s] = x.coord(j, s) - a[std::size_t(s)];
    return cauchy_kernel(K, u);
  };
  Element z = S->algebra().zero();
  f.analytic_dbar = [z](int, const MultiPoint&) { return z; };
  f.smoothness = Smoothness::singular_off_domain;
  f.label = "cauchy_pullback:" + std::to_string(j);
  return f;
}

FieldFunction ff_poly_x0_sq(SubspacePtr S, int n, int j) {
  if (j < 1 || j > n) throw std::invalid_argument("ff_poly_x0_sq: variable index out of range");
  FieldFunction f;
  f.S = S;
  f.n = n;
  const Algebra& A = S->algebra();
  f.eval = [S, j](const MultiPoint& x) {
    double t = x.coord(j, 0);
    return S->algebra().from_real(t * t);
  };
  Element z = A.zero();
  f.analytic_dbar = [S, j, z](int i, const MultiPoint& x) {
    return i == j ? S->algebra().from_real(2.0 * x.coord(j, 0)) : z;
  };
  f.label = "poly_x0_sq:" + std::to_string(j);
  return f;
}

FieldFunction ff_bump(SubspacePtr S, int n, const std::vector<double>& center, double radius,
                      const Element& amplitude) {
  int dim = S->stride() * n;
  if (int(center.size()) != dim) throw std::invalid_argument("ff_bump: center needs stride*n coordinates");
  if (!(radius > 0.0)) throw std::invalid_argument("ff_bump: radius must be positive");
  FieldFunction f;
  f.S = S;
  f.n = n;
  const Algebra& A = S->algebra();
  check_same_dim(amplitude, A.zero());
  auto psi = [center, radius, dim](const MultiPoint& x) {
    double r2 = 0.0;
    for (int k = 0; k < dim; ++k) r2 += (x[k] - center[std::size_t(k)]) * (x[k] - center[std::size_t(k)]);
    double t2 = r2 / (radius * radius);
    if (t2 >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - t2));
  };
  Element amp = amplitude, z = A.zero();
  f.eval = [psi, amp](const MultiPoint& x) { return amp * psi(x); };
  int stride = S->stride();
  f.analytic_dbar = [psi, amp, z, center, radius, dim, stride, S](int j, const MultiPoint& x) {
    double r2 = 0.0;
    for (int k = 0; k < dim; ++k) r2 += (x[k] - center[std::size_t(k)]) * (x[k] - center[std::size_t(k)]);
    if (r2 >= radius * radius || r2 == 0.0) return z;
    double p = psi(x), t2 = r2 / (radius * radius), om = 1.0 - t2;
    // d psi / d x_k = psi * (-2 (x_k - c_k) / (radius^2 om^2))
    const Algebra& A = S->algebra();
    Element acc = z;
    for (int s = 0; s < stride; ++s) {
      int k = (j - 1) * stride + s;
      double d = p * (-2.0 * (x[k] - center[std::size_t(k)]) / (radius * radius * om * om));
      acc += A.mul(S->basis_vector(s), amp) * d;
    }
    return acc;
  };
  f.smoothness = Smoothness::smooth_compact;
  std::vector<double> c(center);
  f.support = DomainSpec::make_ball(c, radius);
  f.label = "bump";
  return f;
}

FieldFunction parse_function(SubspacePtr S, int n, const std::string& descr) {
  auto colon = descr.find(':');
  std::string head = descr.substr(0, colon);
  std::string rest = colon == std::string::npos ? "" : descr.substr(colon + 1);
  const Algebra& A = S->algebra();
  if (head == "constant") {
    if (rest.empty()) return ff_constant(S, n, A.one());
    return ff_constant(S, n, coeffs_to_element(A, parse_reals(rest, "constant"), "constant"));
  }
  if (head == "coordinate" || head == "fueter" || head == "poly_x0_sq" ||
      head == "cauchy_pullback") {
    auto toks = split(rest, ',');
    if (toks.empty()) throw std::invalid_argument("parse_function: " + head + " needs arguments");
    int j = parse_int(toks[0], head);
    if (head == "poly_x0_sq") return ff_poly_x0_sq(S, n, j);
    if (head == "cauchy_pullback") {
      std::vector<double> a;
      for (std::size_t i = 1; i < toks.size(); ++i)
        a.push_back(parse_reals(toks[i], head)[0]);
      return ff_cauchy_pullback(S, n, j, a);
    }
    if (toks.size() != 2) throw std::invalid_argument("parse_function: " + head + " needs j,s");
    int s = parse_int(toks[1], head);
    return head == "coordinate" ? ff_coordinate(S, n, j, s) : ff_fueter(S, n, j, s);
  }
  if (head == "bump") {
    auto parts = split(rest, ';');
    if (parts.size() != 3)
      throw std::invalid_argument("parse_function: bump needs center;radius;amplitude");
    auto center = parse_reals(parts[0], "bump center");
    double radius = parse_reals(parts[1], "bump radius").at(0);
    Element amp = coeffs_to_element(A, parse_reals(parts[2], "bump amplitude"), "bump amplitude");
    return ff_bump(S, n, center, radius, amp);
  }
  throw std::invalid_argument("parse_function: unknown function '" + head + "'");
}

std::function<Element(const MultiPoint&)> dbar_of(const FieldFunction& F, int j, const FdOptions& opt) {
  if (F.analytic_dbar) {
    auto g = F.analytic_dbar;
    return [g, j](const MultiPoint& x) { return g(j, x); };
  }
  FieldFunction copy = F;
  return [copy, j, opt](const MultiPoint& x) { return dirac(copy, j, x, opt).value; };
}

}  // namespace alterna

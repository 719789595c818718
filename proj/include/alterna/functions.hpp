#pragma once

#include <functional>
#include <optional>
#include <string>

#include "alterna/quadrature.hpp"
#include "alterna/subspace.hpp"

namespace alterna {

enum class Smoothness { smooth, smooth_compact, singular_off_domain };

// Algebra-valued function of n hypercomplex variables. analytic_dbar, when
// set, supplies dbar_j F in closed form; otherwise callers fall back to
// finite differences. support, when set, is a domain known to contain the
// support (eval must return exact zero outside it).
struct FieldFunction {
  SubspacePtr S;
  int n = 1;
  std::function<Element(const MultiPoint&)> eval;
  std::function<Element(int j, const MultiPoint&)> analytic_dbar;
  Smoothness smoothness = Smoothness::smooth;
  std::optional<DomainSpec> support;
  std::string label;
};

struct FdOptions {
  double h_rel = 1e-3;     // step = h_rel * max(1, |coordinate|)
  bool richardson = true;  // one extrapolation step from h and h/2
};

struct DiracResult {
  Element value;
  enum class Method { analytic, fd } method = Method::analytic;
  double est_error = 0.0;  // FD step-halving spread; 0 when analytic
};

// 4th-order central difference along flat coordinate k.
double fd_partial_scalar(const std::function<double(const MultiPoint&)>& g, const MultiPoint& x,
                         int k, const FdOptions& opt = {});
Element fd_partial(const std::function<Element(const MultiPoint&)>& F, const MultiPoint& x, int k,
                   const FdOptions& opt = {});

// dbar_j F = sum_s v_s (dF/dx_{j,s}); its kernel is the monogenic functions.
DiracResult dirac(const FieldFunction& F, int j, const MultiPoint& x, const FdOptions& opt = {},
                  bool force_fd = false);
// sum_s conj(v_s) (dF/dx_{j,s})
DiracResult conj_dirac(const FieldFunction& F, int j, const MultiPoint& x,
                       const FdOptions& opt = {});
// Right-sided variant sum_s (dF/dx_{j,s}) v_s.
DiracResult right_dirac(const FieldFunction& F, int j, const MultiPoint& x,
                        const FdOptions& opt = {});

// Componentwise FD Laplacian restricted to the block-j coordinates.
Element laplacian_block_fd(const std::function<Element(const MultiPoint&)>& F, const MultiPoint& x,
                           int j, int stride, double h_rel = 3e-3);

bool is_monogenic_at(const FieldFunction& F, const MultiPoint& x, double tol,
                     const FdOptions& opt = {}, bool force_fd = false);

// Catalog. Labels follow the textual descriptors accepted by parse_function.
FieldFunction ff_constant(SubspacePtr S, int n, const Element& c);
FieldFunction ff_coordinate(SubspacePtr S, int n, int j, int s);
// Fueter-type variable x_{j,s} - x_{j,0} v_s (s >= 1), monogenic.
FieldFunction ff_fueter(SubspacePtr S, int n, int j, int s);
// One-variable Cauchy kernel in the j-th slice, centered at a (stride
// coords); monogenic wherever x_j != a.
FieldFunction ff_cauchy_pullback(SubspacePtr S, int n, int j, const std::vector<double>& a);
// x_{j,0}^2 * 1 — deliberately non-monogenic, with closed-form dbar.
FieldFunction ff_poly_x0_sq(SubspacePtr S, int n, int j);
// amplitude * exp(-1/(1 - t^2)), t = |x - center| / radius; exact zero
// outside the ball, smooth everywhere.
FieldFunction ff_bump(SubspacePtr S, int n, const std::vector<double>& center, double radius,
                      const Element& amplitude);

// Descriptors: "constant:<r | c0,c1,...>", "coordinate:j,s", "fueter:j,s",
// "cauchy_pullback:j,a0,...", "poly_x0_sq:j", "bump:c0,...;radius;<r | coeffs>".
FieldFunction parse_function(SubspacePtr S, int n, const std::string& descr);

// dbar_j F as a plain callable: analytic form if present, FD otherwise.
std::function<Element(const MultiPoint&)> dbar_of(const FieldFunction& F, int j,
                                                  const FdOptions& opt = {});

}  // namespace alterna

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "alterna/functions.hpp"
#include "alterna/kernels.hpp"
#include "alterna/quadrature.hpp"

namespace alterna {

struct EvalResult {
  Element value;
  double est_error = 0.0;
  bool ill_conditioned = false;
  std::string note;
};

// Boundary integral sum_j K_j(y-x)(nu_j(y) f(y)) dS over the boundary of
// `domain`, for x off the boundary. Flags ill_conditioned when x sits within
// a few node spacings of the boundary (the rule cannot resolve the kernel
// peak there).
EvalResult bm_integral(const KernelContext& K, const FieldFunction& f, const DomainSpec& domain,
                       const MultiPoint& x, const QuadratureConfig& config);

// Volume potential sum_j int_Omega K_j(y-x)(g(j,y)) dV for x strictly inside
// a convex domain. The domain is decomposed into cones over the boundary
// nodes; the kernel homogeneity of degree 1-D cancels the radial Jacobian
// exactly, so the radial Gauss rule sees a smooth integrand.
Element star_volume_multi(const KernelContext& K, const DomainSpec& domain, const MultiPoint& x,
                          const QuadratureConfig& config,
                          const std::function<Element(int j, const MultiPoint&)>& g);

// Reproduction via boundary minus volume term: returns the combined value,
// which equals f(x) inside the domain and 0 outside.
EvalResult cauchy_pompeiu(const KernelContext& K, const FieldFunction& f, const DomainSpec& domain,
                          const MultiPoint& x, const QuadratureConfig& config);

// Teodorescu transform (n = 1): T[f](x) = -int_Omega E(y-x) f(y) dV(y),
// a right inverse of the Cauchy-Riemann operator.
EvalResult teodorescu(const KernelContext& K, const FieldFunction& f, const DomainSpec& domain,
                      const MultiPoint& x, const QuadratureConfig& config);

struct PVConfig {
  std::vector<double> epsilons;  // empty: take QuadratureConfig::pv_epsilons
  enum class Extrapolation { power_fit, none } extrapolation = Extrapolation::power_fit;
};

struct PVResult {
  Element value;          // extrapolated to eps -> 0
  double est_error = 0.0;
  std::vector<double> epsilons;
  std::vector<Element> ladder;  // I(eps) per epsilon
  double beta = 0.0;            // fitted decay exponent (0: constant model)
};

// Principal value of the boundary integral at x on the boundary: the
// epsilon-excluded integrals I(eps) are computed exactly on Gamma \ B(x,eps)
// and extrapolated by a power-law fit A + B eps^beta.
PVResult bm_singular_pv(const KernelContext& K, const FieldFunction& f, const DomainSpec& domain,
                        const MultiPoint& x, const QuadratureConfig& config,
                        const PVConfig& pv = {});

struct SolidAngle {
  double analytic = 0.0;
  double mc = 0.0;
  double mc_err = 0.0;
};

// Solid-angle fraction tau(x) of the tangent cone at x: vol(S(x,eps) cap
// Omega) / vol(S(x,eps)). Analytic for boxes (2^-k with k active
// constraints) and spheres (1/2); mc estimates it by direction sampling.
SolidAngle solid_angle(const DomainSpec& domain, const MultiPoint& x, long long samples,
                       std::uint64_t seed);

struct ApproachSpec {
  MultiPoint direction;  // approach axis; must be non-tangential at x
  double h0 = 0.2;
  int levels = 4;  // ladder h0, h0/2, ..., extrapolated to h = 0
};

struct JumpResult {
  Element interior, exterior, pv;
  double tau = 0.0;
  double est_error = 0.0;
  // Residuals of: interior = pv + (1-tau) f(x); exterior = pv - tau f(x);
  // interior - exterior = f(x).
  double plus_residual = 0.0, minus_residual = 0.0, jump_residual = 0.0;
};

// Non-tangential limits of the boundary integral on both sides of x in
// Gamma, by polynomial extrapolation of the approach ladder, together with
// the principal value and the jump identities.
JumpResult plemelj_limits(const KernelContext& K, const FieldFunction& f, const DomainSpec& domain,
                          const MultiPoint& x, const ApproachSpec& approach,
                          const QuadratureConfig& config, const PVConfig& pv = {});

// Solve dbar_j f = g_j for compactly supported compatible data (n >= 2):
//   f(x) = -int E(u - x_1) g_1(u, x_2, ..., x_n) du
// over the block-1 bounding box of supp g_1 (inflated 10%). g[0] must carry
// support metadata.
EvalResult solve_inhomogeneous(const KernelContext& K, const std::vector<FieldFunction>& g,
                               const MultiPoint& x, const QuadratureConfig& config);

struct CompatReport {
  double max_residual = 0.0;
  // One row per ordered pair (i, j): max over probes of
  // |dbar_i(conj_dirac_j g_j) - laplacian_j g_i|.
  std::vector<double> residuals;
  bool ok(double tol) const { return max_residual <= tol; }
};

// Compatibility of the inhomogeneous system at the probe points (nested
// finite differences where no closed forms are available).
CompatReport check_compatibility(const std::vector<FieldFunction>& g,
                                 const std::vector<MultiPoint>& probes, const FdOptions& opt = {});

// Integral form of the compatibility condition in variable pair (1, j):
//   int sum_s v_s (E(u - x_1) (d_{1,s} g_j - d_{j,s} g_1)(u, x^0)) du,
// which vanishes for compatible data.
Element check_compatibility_integral(const KernelContext& K, const std::vector<FieldFunction>& g,
                                     int j, const MultiPoint& x, const QuadratureConfig& config);

// C-infinity radial cutoff: 1 for r <= R1, 0 for r >= R2.
double radial_cutoff(double r, double R1, double R2);
double radial_cutoff_deriv(double r, double R1, double R2);

struct CutoffSpec {
  double plateau_factor = 1.1;  // R1 = factor * circumradius(hole)
  double support_factor = 1.4;  // R2
};

struct HartogsExtension {
  FieldFunction extended;        // f0 - g, monogenic across the hole
  FieldFunction f0;              // (1 - phi) f, zero on the cutoff plateau
  std::vector<FieldFunction> h;  // dbar_j f0, supported in the cutoff shell
  double plateau_radius = 0.0, support_radius = 0.0;
};

// Monogenic extension across a compact hole (n >= 2): f monogenic on
// omega \ hole extends to all of omega. The correction g solving
// dbar_j g = h_j vanishes (up to quadrature) outside the cutoff shell, so
// `extended` agrees with f there and fills the hole.
HartogsExtension hartogs_extend(const KernelContext& K, const FieldFunction& f,
                                const DomainSpec& omega, const DomainSpec& hole,
                                const QuadratureConfig& config, const CutoffSpec& cutoff = {});

}  // namespace alterna

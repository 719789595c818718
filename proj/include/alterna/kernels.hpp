#pragma once

#include "alterna/quadrature.hpp"
#include "alterna/subspace.hpp"

namespace alterna {

// Shared data for kernel evaluation over n copies of the subspace M:
// D = (m+1)n is the real dimension and sigma the area of the unit
// (D-1)-sphere, the normalizer of the reproducing kernels.
struct KernelContext {
  SubspacePtr S;
  int n = 1;
  int D = 0;
  double sigma = 0.0;
};

KernelContext make_kernel_context(SubspacePtr S, int n);

// One-variable Cauchy kernel E(x) = conj(x) / (sigma |x|^(m+1)).
// Requires a context with n == 1. Throws std::domain_error at x = 0.
Element cauchy_kernel(const KernelContext& K, const MultiPoint& x);

// j-th reproducing kernel component K_j(x) = conj(x_j) / (sigma |x|^D),
// where x_j is the j-th algebra block and |x| the full euclidean norm.
// Homogeneous of degree 1 - D.
Element bm_component(const KernelContext& K, const MultiPoint& x, int j);

// Fundamental solution of the Laplacian on R^D:
//   D == 2: -(1/2pi) log|x|;   D > 2: |x|^(2-D) / ((2-D) sigma).
double fundamental_solution(const KernelContext& K, const MultiPoint& x);

// The j-th term of the kernel divergence sum_j dbar_j K_j, which is real:
//   ((m+1)/sigma) (|x|^-D - n |x_j|^2 |x|^(-D-2)).
// The terms sum to zero away from the origin.
double bm_divergence_term(const KernelContext& K, const MultiPoint& x, int j);
double bm_divergence(const KernelContext& K, const MultiPoint& x);

// Analytic partial d K_j / d x_{i,t}:
//   delta_{ij} conj(v_t) / (sigma |x|^D) - D x_{i,t} conj(x_j) / (sigma |x|^(D+2)).
Element bm_component_partial(const KernelContext& K, const MultiPoint& x, int i, int t, int j);

// Weighted boundary pairing sum_j K_j(diff) * (nu_j * fval), times the node
// weight. The parenthesization K * (nu * f) is part of the contract: in a
// nonassociative algebra regrouping it changes the value.
Element bm_pair(const KernelContext& K, const MultiPoint& diff, const BoundaryNode& node,
                const Element& fval);

}  // namespace alterna

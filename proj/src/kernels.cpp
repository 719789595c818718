#include "alterna/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "alterna/numerics.hpp"

namespace alterna {

namespace {

double norm_checked(const MultiPoint& x) {
  double r = norm(x);
  if (r == 0.0) throw std::domain_error("kernel evaluated at its singular point");
  return r;
}

void check_block(const KernelContext& K, int j, const char* where) {
  if (j < 1 || j > K.n)
    throw std::invalid_argument(std::string(where) + ": block index " + std::to_string(j) +
                                " outside 1.." + std::to_string(K.n));
}

}  // namespace

KernelContext make_kernel_context(SubspacePtr S, int n) {
  if (!S) throw std::invalid_argument("make_kernel_context: null subspace");
  if (n < 1) throw std::invalid_argument("make_kernel_context: n must be >= 1");
  int D = (S->m() + 1) * n;
  if (D > kMaxAlgebraDim) throw std::invalid_argument("make_kernel_context: (m+1)n too large");
  return {std::move(S), n, D, sphere_area(D)};
}

Element cauchy_kernel(const KernelContext& K, const MultiPoint& x) {
  if (K.n != 1) throw std::invalid_argument("cauchy_kernel: context must have n == 1");
  double r = norm_checked(x);
  return K.S->embed_conj_block(x.block(1)) * (1.0 / (K.sigma * std::pow(r, K.D)));
}

Element bm_component(const KernelContext& K, const MultiPoint& x, int j) {
  check_block(K, j, "bm_component");
  double r = norm_checked(x);
  return K.S->embed_conj_block(x.block(j)) * (1.0 / (K.sigma * std::pow(r, K.D)));
}

double fundamental_solution(const KernelContext& K, const MultiPoint& x) {
  double r = norm_checked(x);
  if (K.D == 2) return -std::log(r) / (2.0 * M_PI);
  return std::pow(r, 2 - K.D) / ((2 - K.D) * K.sigma);
}

double bm_divergence_term(const KernelContext& K, const MultiPoint& x, int j) {
  check_block(K, j, "bm_divergence_term");
  double r = norm_checked(x);
  double rj2 = 0.0;
  for (double c : x.block(j)) rj2 += c * c;
  double rmD = std::pow(r, -K.D);
  int m = K.S->m();
  return (m + 1) / K.sigma * (rmD - K.n * rj2 * rmD / (r * r));
}

double bm_divergence(const KernelContext& K, const MultiPoint& x) {
  double s = 0.0;
  for (int j = 1; j <= K.n; ++j) s += bm_divergence_term(K, x, j);
  return s;
}

Element bm_component_partial(const KernelContext& K, const MultiPoint& x, int i, int t, int j) {
  check_block(K, i, "bm_component_partial");
  check_block(K, j, "bm_component_partial");
  double r = norm_checked(x);
  const Subspace& S = *K.S;
  const Algebra& A = S.algebra();
  double rmD = std::pow(r, -K.D);
  Element out = A.zero();
  if (i == j) out = A.conj(S.basis_vector(t)) * (rmD / K.sigma);
  Element xjc = S.embed_conj_block(x.block(j));
  axpy(out, -K.D * x.coord(i, t) * rmD / (r * r * K.sigma), xjc);
  return out;
}

Element bm_pair(const KernelContext& K, const MultiPoint& diff, const BoundaryNode& node,
                const Element& fval) {
  const Subspace& S = *K.S;
  const Algebra& A = S.algebra();
  Element acc = A.zero();
  for (int j = 1; j <= K.n; ++j) {
    Element kj = bm_component(K, diff, j);
    Element nu = S.embed_block(node.normal.block(j));
    acc += A.mul(kj, A.mul(nu, fval));
  }
  return acc * node.weight;
}

}  // namespace alterna

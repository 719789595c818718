#pragma once

#include <cstdint>
#include <vector>

namespace alterna {

struct GaussRule {
  std::vector<double> x;  // nodes on [-1, 1], ascending
  std::vector<double> w;
};

// Gauss-Legendre rule of order q, cached per order.
const GaussRule& gauss_legendre(int q);

// Surface area of the unit (dim-1)-sphere in R^dim, via log-gamma so that
// dimensions up to 16 stay well scaled.
double sphere_area(int dim);

// SplitMix64. Streams are addressable by index through mix_seed, which keeps
// Monte Carlo node sets deterministic under any partitioning.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next_u64();
  double uniform01();  // in (0, 1]
  double uniform(double a, double b);
  double normal();

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Eigenvalues of the symmetric n x n matrix `a` (row-major), ascending.
// Cyclic Jacobi; n is small (algebra dimensions).
std::vector<double> sym_eigenvalues(std::vector<double> a, int n);

// Polynomial (Neville) extrapolation of samples (h_i, y_i) to h = 0.
// est_err, when given, receives the spread of the last extrapolation column.
double neville_to_zero(const std::vector<double>& hs, const std::vector<double>& ys,
                       double* est_err = nullptr);

struct PowerFit {
  double a = 0.0;     // extrapolated value
  double b = 0.0;
  double beta = 0.0;  // 0 means the constant model won
  double rss = 0.0;
};

// Least-squares fit y ~ a + b * eps^beta with beta scanned over a grid and
// refined by golden section. Falls back to the constant model when it explains
// the data at least as well.
PowerFit fit_power_law(const std::vector<double>& eps, const std::vector<double>& y);

}  // namespace alterna

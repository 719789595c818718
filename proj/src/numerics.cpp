#include "alterna/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace alterna {

const GaussRule& gauss_legendre(int q) {
  if (q < 1 || q > 256) throw std::invalid_argument("gauss_legendre: order out of range");
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(q);
  if (it != cache.end()) return it->second;

  GaussRule r;
  r.x.assign(q, 0.0);
  r.w.assign(q, 0.0);
  for (int i = 0; i < (q + 1) / 2; ++i) {
    // Chebyshev initial guess, then Newton on P_q.
    double x = std::cos(M_PI * (i + 0.75) / (q + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= q; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      // p1 = P_q, p0 = P_{q-1}
      dp = q * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.x[i] = -x;
    r.x[q - 1 - i] = x;
    r.w[i] = w;
    r.w[q - 1 - i] = w;
  }
  auto pos = cache.emplace(q, std::move(r)).first;
  return pos->second;
}

double sphere_area(int dim) {
  if (dim < 1) throw std::invalid_argument("sphere_area: dim must be positive");
  return 2.0 * std::exp(0.5 * dim * std::log(M_PI) - std::lgamma(0.5 * dim));
}

std::uint64_t Rng::next_u64() {
  state_ += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double Rng::uniform01() { return ((next_u64() >> 11) + 1.0) * 0x1.0p-53; }

double Rng::uniform(double a, double b) { return a + (b - a) * uniform01(); }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform01();
  double u2 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double th = 2.0 * M_PI * u2;
  spare_ = r * std::sin(th);
  has_spare_ = true;
  return r * std::cos(th);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed ^ (stream * 0xD1342543DE82EF95ull + 0x632BE59BD9B4E019ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::vector<double> sym_eigenvalues(std::vector<double> a, int n) {
  if (n < 1 || static_cast<int>(a.size()) != n * n)
    throw std::invalid_argument("sym_eigenvalues: bad matrix size");
  auto at = [&](int i, int j) -> double& { return a[i * n + j]; };
  double fro = 0.0;
  for (double v : a) fro += v * v;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
    if (off <= fro * 1e-30 + 1e-300) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = at(p, q);
        if (std::abs(apq) < 1e-300) continue;
        double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = at(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

double neville_to_zero(const std::vector<double>& hs, const std::vector<double>& ys,
                       double* est_err) {
  const int n = static_cast<int>(ys.size());
  if (n == 0 || hs.size() != ys.size())
    throw std::invalid_argument("neville_to_zero: bad sample sizes");
  if (n == 1) {
    if (est_err) *est_err = 0.0;
    return ys[0];
  }
  // T[i][j]: polynomial through samples i-j..i evaluated at 0.
  std::vector<std::vector<double>> T(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) T[i][0] = ys[i];
  for (int j = 1; j < n; ++j) {
    for (int i = j; i < n; ++i) {
      double denom = hs[i] - hs[i - j];
      if (denom == 0.0) throw std::invalid_argument("neville_to_zero: repeated h");
      T[i][j] = (hs[i] * T[i - 1][j - 1] - hs[i - j] * T[i][j - 1]) / denom;
    }
  }
  if (est_err) {
    double e1 = std::abs(T[n - 1][n - 1] - T[n - 1][n - 2]);
    double e2 = std::abs(T[n - 1][n - 1] - T[n - 2][n - 2]);
    *est_err = std::max(e1, e2);
  }
  return T[n - 1][n - 1];
}

namespace {

double power_fit_rss(const std::vector<double>& eps, const std::vector<double>& y, double beta,
                     double* a_out, double* b_out) {
  const int n = static_cast<int>(y.size());
  double s11 = n, s1p = 0, spp = 0, s1y = 0, spy = 0;
  for (int i = 0; i < n; ++i) {
    double p = std::pow(eps[i], beta);
    s1p += p;
    spp += p * p;
    s1y += y[i];
    spy += p * y[i];
  }
  double det = s11 * spp - s1p * s1p;
  double a, b;
  if (std::abs(det) < 1e-300) {
    a = s1y / n;
    b = 0.0;
  } else {
    a = (spp * s1y - s1p * spy) / det;
    b = (s11 * spy - s1p * s1y) / det;
  }
  double rss = 0.0;
  for (int i = 0; i < n; ++i) {
    double r = a + b * std::pow(eps[i], beta) - y[i];
    rss += r * r;
  }
  *a_out = a;
  *b_out = b;
  return rss;
}

}  // namespace

PowerFit fit_power_law(const std::vector<double>& eps, const std::vector<double>& y) {
  if (eps.size() != y.size() || eps.size() < 2)
    throw std::invalid_argument("fit_power_law: need at least two samples");
  const int n = static_cast<int>(y.size());

  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= n;
  double rss0 = 0.0;
  for (double v : y) rss0 += (v - mean) * (v - mean);

  PowerFit best;
  best.a = mean;
  best.beta = 0.0;
  best.rss = rss0;
  if (n < 3) {
    return best;  // not enough points to resolve an exponent
  }

  double best_beta = 1.0, best_rss = -1.0, best_a = mean, best_b = 0.0;
  for (double beta = 0.25; beta <= 4.0 + 1e-9; beta += 0.05) {
    double a, b;
    double rss = power_fit_rss(eps, y, beta, &a, &b);
    if (best_rss < 0 || rss < best_rss) {
      best_rss = rss;
      best_beta = beta;
      best_a = a;
      best_b = b;
    }
  }
  // Golden-section refinement around the grid winner.
  double lo = std::max(0.05, best_beta - 0.05), hi = best_beta + 0.05;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double ax, bx;
  double fc = power_fit_rss(eps, y, c, &ax, &bx);
  double fd = power_fit_rss(eps, y, d, &ax, &bx);
  for (int it = 0; it < 60; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = power_fit_rss(eps, y, c, &ax, &bx);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = power_fit_rss(eps, y, d, &ax, &bx);
    }
  }
  best_beta = 0.5 * (lo + hi);
  best_rss = power_fit_rss(eps, y, best_beta, &best_a, &best_b);

  if (best_rss < rss0) {
    best.a = best_a;
    best.b = best_b;
    best.beta = best_beta;
    best.rss = best_rss;
  }
  return best;
}

}  // namespace alterna

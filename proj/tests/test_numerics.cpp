#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "alterna/numerics.hpp"
#include "doctest.h"

using namespace alterna;

TEST_CASE("gauss-legendre rules integrate polynomials exactly") {
  // Order q is exact through degree 2q-1 on [-1, 1].
  for (int q : {1, 2, 4, 8, 16}) {
    const GaussRule& g = gauss_legendre(q);
    REQUIRE(int(g.x.size()) == q);
    double wsum = 0.0;
    for (double w : g.w) wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));

    int deg = 2 * q - 1;
    double val = 0.0;
    for (int a = 0; a < q; ++a) val += g.w[a] * std::pow(g.x[a], deg - (deg % 2));
    double exact = 2.0 / (deg - (deg % 2) + 1);
    CHECK(val == doctest::Approx(exact).epsilon(1e-13));

    // One degree past the guarantee must show an error for q <= 4.
    if (q <= 4) {
      double over = 0.0;
      for (int a = 0; a < q; ++a) over += g.w[a] * std::pow(g.x[a], 2 * q);
      CHECK(std::abs(over - 2.0 / (2 * q + 1)) > 1e-6);
    }
  }
}

TEST_CASE("gauss-legendre cache returns stable references") {
  const GaussRule* p1 = &gauss_legendre(12);
  const GaussRule* p2 = &gauss_legendre(12);
  CHECK(p1 == p2);
}

TEST_CASE("unit sphere areas") {
  using std::numbers::pi;
  CHECK(sphere_area(2) == doctest::Approx(2.0 * pi).epsilon(1e-14));
  CHECK(sphere_area(3) == doctest::Approx(4.0 * pi).epsilon(1e-14));
  CHECK(sphere_area(4) == doctest::Approx(2.0 * pi * pi).epsilon(1e-14));
  CHECK(sphere_area(6) == doctest::Approx(pi * pi * pi).epsilon(1e-13));
  // sigma_8 = 2 pi^4 / 3! and sigma_16 = 2 pi^8 / 7!.
  CHECK(sphere_area(8) == doctest::Approx(2.0 * std::pow(pi, 4) / 6.0).epsilon(1e-13));
  CHECK(sphere_area(16) == doctest::Approx(2.0 * std::pow(pi, 8) / 5040.0).epsilon(1e-12));
}

TEST_CASE("rng streams are deterministic and distinct") {
  Rng a(12345), b(12345);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng c(mix_seed(42, 1)), d(mix_seed(42, 2));
  int same = 0;
  for (int i = 0; i < 64; ++i) same += (c.next_u64() == d.next_u64());
  CHECK(same == 0);

  Rng e(9);
  double mean = 0.0;
  for (int i = 0; i < 20000; ++i) {
    double u = e.uniform01();
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
    mean += u;
  }
  mean /= 20000;
  CHECK(mean == doctest::Approx(0.5).epsilon(2e-2));

  Rng f(10);
  double m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < 20000; ++i) {
    double z = f.normal();
    m1 += z;
    m2 += z * z;
  }
  m1 /= 20000;
  m2 /= 20000;
  CHECK(std::abs(m1) < 0.03);
  CHECK(m2 == doctest::Approx(1.0).epsilon(5e-2));
}

TEST_CASE("jacobi eigenvalues of small symmetric matrices") {
  std::vector<double> a = {2.0, 1.0, 1.0, 2.0};
  auto ev = sym_eigenvalues(a, 2);
  REQUIRE(ev.size() == 2);
  CHECK(ev[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(3.0).epsilon(1e-12));

  // Pin a 3x3 spectrum through its symmetric functions: trace, trace of the
  // square, and determinant (product of eigenvalues).
  std::vector<double> b = {4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0};
  auto ev3 = sym_eigenvalues(b, 3);
  REQUIRE(ev3.size() == 3);
  CHECK(ev3[0] < ev3[1]);
  CHECK(ev3[1] < ev3[2]);
  CHECK(ev3[0] + ev3[1] + ev3[2] == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(ev3[0] * ev3[0] + ev3[1] * ev3[1] + ev3[2] * ev3[2] ==
        doctest::Approx(33.0).epsilon(1e-12));
  CHECK(ev3[0] * ev3[1] * ev3[2] == doctest::Approx(18.0).epsilon(1e-12));
}

TEST_CASE("neville extrapolation reaches the limit of smooth ladders") {
  // f(h) = 3 + 2 h^2 + h^3 sampled on four rungs: degree-3 polynomial data is
  // reproduced exactly by the four-point tableau.
  std::vector<double> hs = {0.2, 0.1, 0.05, 0.025};
  std::vector<double> ys;
  for (double h : hs) ys.push_back(3.0 + 2.0 * h * h + h * h * h);
  double err = 0.0;
  double lim = neville_to_zero(hs, ys, &err);
  CHECK(lim == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(err >= 0.0);
  CHECK(err < 1e-3);
}

TEST_CASE("power-law fit recovers clean ladders") {
  std::vector<double> eps = {0.4, 0.2, 0.1, 0.05};
  std::vector<double> y;
  for (double e : eps) y.push_back(2.0 + 0.5 * std::pow(e, 1.5));
  PowerFit fit = fit_power_law(eps, y);
  CHECK(fit.beta == doctest::Approx(1.5).epsilon(1e-4));
  CHECK(fit.a == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(fit.b == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(fit.rss < 1e-12);
}

TEST_CASE("power-law fit falls back to the constant model") {
  std::vector<double> eps = {0.4, 0.2, 0.1, 0.05};
  std::vector<double> y = {1.25, 1.25, 1.25, 1.25};
  PowerFit fit = fit_power_law(eps, y);
  CHECK(fit.beta == 0.0);
  CHECK(fit.a == doctest::Approx(1.25).epsilon(1e-14));
}

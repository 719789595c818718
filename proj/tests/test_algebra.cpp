#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "alterna/algebra.hpp"
#include "alterna/numerics.hpp"
#include "doctest.h"

using namespace alterna;

namespace {

// Dyadic coordinates keep every structure-table contraction exact in binary
// floating point, so identities that hold by the table hold to the last bit.
Element dyadic_element(const Algebra& A, Rng& rng) {
  static const double pool[] = {-1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0};
  Element e = A.zero();
  for (int i = 0; i < A.dim(); ++i) e[i] = pool[rng.next_u64() % 7];
  return e;
}

std::vector<Algebra> builtin_algebras() {
  std::vector<Algebra> out;
  out.push_back(Algebra::complex_numbers());
  out.push_back(Algebra::quaternions());
  out.push_back(Algebra::octonions());
  for (int m = 1; m <= 5; ++m) out.push_back(Algebra::clifford(m));
  return out;
}

}  // namespace

TEST_CASE("quaternion multiplication table") {
  Algebra H = Algebra::quaternions();
  REQUIRE(H.dim() == 4);
  CHECK(H.basis_name(0) == "1");
  CHECK(H.basis_name(1) == "i");
  CHECK(H.basis_name(2) == "j");
  CHECK(H.basis_name(3) == "k");

  Element i = H.basis(1), j = H.basis(2), k = H.basis(3);
  // i*j = k, j*i = -k, i*i = -1; exact table entries.
  Element ij = H.mul(i, j);
  for (int s = 0; s < 4; ++s) CHECK(ij[s] == (s == 3 ? 1.0 : 0.0));
  Element ji = H.mul(j, i);
  for (int s = 0; s < 4; ++s) CHECK(ji[s] == (s == 3 ? -1.0 : 0.0));
  Element ii = H.mul(i, i);
  for (int s = 0; s < 4; ++s) CHECK(ii[s] == (s == 0 ? -1.0 : 0.0));
  Element jk = H.mul(j, k);
  for (int s = 0; s < 4; ++s) CHECK(jk[s] == (s == 1 ? 1.0 : 0.0));

  auto terms = H.product_terms(1, 2);
  REQUIRE(terms.size() == 1);
  CHECK(terms[0].u == 3);
  CHECK(terms[0].v == 1.0);
}

TEST_CASE("complex numbers embed as expected") {
  Algebra C = Algebra::complex_numbers();
  Element x = C.zero();
  x[0] = 0.5;
  x[1] = -0.25;
  // n(a + b i) = a^2 + b^2, exactly for dyadic a, b.
  Element q = C.qnorm(x);
  CHECK(q[0] == 0.5 * 0.5 + 0.25 * 0.25);
  CHECK(q[1] == 0.0);
  Element t = C.trace(x);
  CHECK(t[0] == 1.0);
  CHECK(t[1] == 0.0);
}

TEST_CASE("conjugation is an anti-homomorphism on every basis pair") {
  for (const Algebra& A : builtin_algebras()) {
    CAPTURE(A.name());
    for (int s = 0; s < A.dim(); ++s)
      for (int t = 0; t < A.dim(); ++t) {
        Element lhs = A.conj(A.mul(A.basis(s), A.basis(t)));
        Element rhs = A.mul(A.conj(A.basis(t)), A.conj(A.basis(s)));
        // Integer tables: the identity is exact, not approximate.
        CHECK(max_abs(lhs - rhs) == 0.0);
      }
  }
}

TEST_CASE("trace and quadratic norm are real multiples of unity") {
  // True for every element of a composition algebra (and the small Clifford
  // algebras isomorphic to one); in Cl(0,m) for m >= 3 it holds only on the
  // quadratic cone, e.g. for paravectors.
  Rng rng(2024);
  for (const char* nm : {"complex", "quaternions", "octonions", "clifford1", "clifford2"}) {
    Algebra A = Algebra::by_name(nm);
    CAPTURE(nm);
    for (int rep = 0; rep < 50; ++rep) {
      Element x = dyadic_element(A, rng);
      Element t = A.trace(x);
      Element q = A.qnorm(x);
      CHECK(A.real_scalar(t).has_value());
      CHECK(A.real_scalar(q).has_value());
      CHECK(t[0] == 2.0 * x[0]);
    }
  }
  for (int m = 3; m <= 5; ++m) {
    Algebra A = Algebra::clifford(m);
    CAPTURE(m);
    // General elements escape the cone...
    Element top = A.basis(A.dim() - 1);  // highest blade, conj sign +1 for m = 3, 4
    if (m != 5) CHECK_FALSE(A.real_scalar(A.trace(top)).has_value());
    // ...but paravectors x0 + sum x_k e_k always satisfy both identities.
    for (int rep = 0; rep < 50; ++rep) {
      Element p = A.zero();
      for (int k = 0; k <= m; ++k) p[k] = rng.uniform(-1.0, 1.0);
      Element t = A.trace(p);
      Element q = A.qnorm(p);
      CHECK(A.real_scalar(t).has_value());
      CHECK(A.real_scalar(q).has_value());
      double n2 = 0.0;
      for (int k = 0; k <= m; ++k) n2 += p[k] * p[k];
      CHECK(q[0] == doctest::Approx(n2).epsilon(1e-13));
    }
  }
}

TEST_CASE("octonions are alternative but not associative") {
  Algebra O = Algebra::octonions();
  REQUIRE(O.dim() == 8);

  // Some basis triple must fail associativity, else the doubling is wrong.
  double worst = 0.0;
  for (int a = 1; a < 8; ++a)
    for (int b = 1; b < 8; ++b)
      for (int c = 1; c < 8; ++c)
        worst = std::max(worst, max_abs(O.associator(O.basis(a), O.basis(b), O.basis(c))));
  CHECK(worst == 2.0);

  // Alternativity and its polarized corollaries, exact on dyadic samples.
  Rng rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    Element x = dyadic_element(O, rng);
    Element y = dyadic_element(O, rng);
    CHECK(max_abs(O.associator(x, x, y)) == 0.0);
    CHECK(max_abs(O.associator(y, x, x)) == 0.0);
    CHECK(max_abs(O.associator(x, y, x)) == 0.0);
  }
}

TEST_CASE("conjugate and real arguments drop out of the associator") {
  // For x with x + conj(x) and x*conj(x) real, [conj(x), x, y] = 0 and
  // [r*1, x, y] = 0; both follow from bilinearity plus alternativity.
  Algebra O = Algebra::octonions();
  Rng rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    Element x = dyadic_element(O, rng);
    Element y = dyadic_element(O, rng);
    CHECK(max_abs(O.associator(O.conj(x), x, y)) == 0.0);
    CHECK(max_abs(O.associator(O.from_real(0.75), x, y)) == 0.0);
    CHECK(max_abs(O.associator(x, O.from_real(-0.5), y)) == 0.0);
  }
}

TEST_CASE("clifford blade ordering and signs") {
  Algebra C3 = Algebra::clifford(3);
  REQUIRE(C3.dim() == 8);
  // Blades ordered by (grade, lex): 1, e1, e2, e3, e12, e13, e23, e123.
  CHECK(C3.basis_name(1) == "e1");
  CHECK(C3.basis_name(4) == "e12");
  CHECK(C3.basis_name(7) == "e123");

  // e1 * e2 = e12 with sign +1.
  auto terms = C3.product_terms(1, 2);
  REQUIRE(terms.size() == 1);
  CHECK(terms[0].u == 4);
  CHECK(terms[0].v == 1.0);
  // e2 * e1 = -e12.
  terms = C3.product_terms(2, 1);
  REQUIRE(terms.size() == 1);
  CHECK(terms[0].u == 4);
  CHECK(terms[0].v == -1.0);
  // Generators square to -1 in Cl(0, m).
  terms = C3.product_terms(1, 1);
  REQUIRE(terms.size() == 1);
  CHECK(terms[0].u == 0);
  CHECK(terms[0].v == -1.0);

  // Conjugation sign on a grade-k blade is (-1)^{k(k+1)/2}: + - - + for k=0..3.
  CHECK(C3.involution_image(0) == std::pair<int, double>(0, 1.0));
  CHECK(C3.involution_image(1) == std::pair<int, double>(1, -1.0));
  CHECK(C3.involution_image(4) == std::pair<int, double>(4, -1.0));
  CHECK(C3.involution_image(7) == std::pair<int, double>(7, 1.0));
}

TEST_CASE("clifford algebras are associative") {
  for (int m = 1; m <= 5; ++m) {
    Algebra A = Algebra::clifford(m);
    CAPTURE(m);
    Rng rng(100 + m);
    for (int rep = 0; rep < 30; ++rep) {
      Element x = dyadic_element(A, rng);
      Element y = dyadic_element(A, rng);
      Element z = dyadic_element(A, rng);
      CHECK(max_abs(A.associator(x, y, z)) == 0.0);
    }
  }
}

TEST_CASE("built-in tables pass validation") {
  for (const Algebra& A : builtin_algebras()) {
    CAPTURE(A.name());
    CHECK_NOTHROW(A.validate());
  }
}

TEST_CASE("validation rejects a broken unity row") {
  // 2-dimensional table where 1 * e1 = 0.5 e1: unity axiom fails.
  std::vector<std::array<double, 4>> structure = {
      {0, 0, 0, 1.0}, {0, 1, 1, 0.5}, {1, 0, 1, 1.0}, {1, 1, 0, -1.0}};
  std::vector<std::array<double, 3>> involution = {{0, 0, 1.0}, {1, 1, -1.0}};
  Algebra broken(2, "broken", structure, involution);
  CHECK_THROWS_AS(broken.validate(), AlgebraError);
}

TEST_CASE("validation rejects an involution that is not an anti-homomorphism") {
  // Quaternion table with the identity map as "involution": conj(ij) != ji.
  Algebra H = Algebra::quaternions();
  std::vector<std::array<double, 4>> structure;
  for (int s = 0; s < 4; ++s)
    for (int t = 0; t < 4; ++t)
      for (const auto& term : H.product_terms(s, t))
        structure.push_back({double(s), double(t), double(term.u), term.v});
  std::vector<std::array<double, 3>> involution;
  for (int s = 0; s < 4; ++s) involution.push_back({double(s), double(s), 1.0});
  Algebra bad(4, "bad-involution", structure, involution);
  CHECK_THROWS_AS(bad.validate(), AlgebraError);
}

TEST_CASE("by_name covers the built-in catalogue") {
  const char* names[] = {"complex",   "quaternions", "octonions", "clifford1",
                         "clifford2", "clifford3",   "clifford4", "clifford5"};
  int dims[] = {2, 4, 8, 2, 4, 8, 16, 32};
  for (int i = 0; i < 8; ++i) {
    Algebra A = Algebra::by_name(names[i]);
    CHECK(A.dim() == dims[i]);
    CHECK_NOTHROW(A.validate());
  }
  CHECK_THROWS(Algebra::by_name("sedenions"));
}

TEST_CASE("json round trip preserves the table") {
  Algebra H = Algebra::quaternions();
  Algebra H2 = Algebra::from_json_text(H.to_json_text());
  CHECK(H2.dim() == 4);
  CHECK_NOTHROW(H2.validate());
  Rng rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    Element x = dyadic_element(H, rng);
    Element y = dyadic_element(H, rng);
    CHECK(max_abs(H.mul(x, y) - H2.mul(x, y)) == 0.0);
  }
  CHECK(H2.basis_name(3) == "k");
}

TEST_CASE("imaginary units and the quadratic cone") {
  Algebra H = Algebra::quaternions();
  CHECK(H.is_imaginary_unit(H.basis(1)));
  CHECK_FALSE(H.is_imaginary_unit(H.one()));
  Element half_i = 0.5 * H.basis(1);
  CHECK_FALSE(H.is_imaginary_unit(half_i));

  // x = a + b J with J an imaginary unit lies in the cone; in the quaternions
  // that is every element, so test the sharper statement in Cl(0,3).
  Algebra C3 = Algebra::clifford(3);
  Element p = C3.zero();
  p[0] = 0.3;
  p[1] = 0.7;
  p[2] = -0.2;
  p[3] = 0.4;  // paravector: real + generators
  CHECK(C3.quadratic_cone_contains(p));
  Element blade2 = C3.zero();
  blade2[0] = 0.3;
  blade2[4] = 0.5;
  blade2[7] = 0.5;  // e12 + e123 mix: t(x) real but n(x) not
  CHECK_FALSE(C3.quadratic_cone_contains(blade2));

  CHECK(H.real_scalar(H.from_real(3.25)) == 3.25);
  CHECK_FALSE(H.real_scalar(H.basis(2)).has_value());
}

#include <cmath>
#include <numbers>
#include <vector>

#include "alterna/numerics.hpp"
#include "alterna/quadrature.hpp"
#include "doctest.h"

using namespace alterna;
using std::numbers::pi;

namespace {

QuadratureConfig config_with(int bq, int vq) {
  QuadratureConfig cfg;
  cfg.boundary_q = bq;
  cfg.volume_q = vq;
  return cfg;
}

DomainSpec box4(double half) {
  return DomainSpec::make_box({-half, -half, -half, -half}, {half, half, half, half});
}

}  // namespace

TEST_CASE("domain geometry") {
  DomainSpec b = box4(1.0);
  CHECK(b.dim() == 4);
  CHECK(b.volume() == doctest::Approx(16.0));
  std::vector<double> inside = {0.2, -0.3, 0.0, 0.9};
  std::vector<double> outside = {1.2, 0.0, 0.0, 0.0};
  CHECK(b.contains(inside));
  CHECK_FALSE(b.contains(outside));
  CHECK(b.boundary_distance(inside) == doctest::Approx(0.1));

  DomainSpec s = DomainSpec::make_ball({0.0, 0.0, 0.0}, 2.0);
  CHECK(s.dim() == 3);
  CHECK(s.volume() == doctest::Approx(4.0 / 3.0 * pi * 8.0).epsilon(1e-13));
  std::vector<double> p = {1.0, 0.0, 0.0};
  CHECK(s.contains(p));
  CHECK(s.boundary_distance(p) == doctest::Approx(1.0));

  CHECK_THROWS(DomainSpec::make_box({0.0}, {1.0, 2.0}));
  CHECK_THROWS(DomainSpec::make_ball({0.0, 0.0}, -1.0));
}

TEST_CASE("boundary rule weights sum to the surface measure") {
  DomainSpec b = box4(1.0);
  QuadratureConfig cfg = config_with(6, 6);
  BoundaryRule rule(b, cfg, 2, 2);
  double total = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    BoundaryNode nd = rule.node(i);
    total += nd.weight;
    CHECK(norm(nd.normal) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(b.boundary_distance(std::span<const double>(nd.point.data(), 4)) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
  // 8 faces, each a 2x2x2 cube of measure 8.
  CHECK(total == doctest::Approx(64.0).epsilon(1e-12));
  CHECK(rule.node_spacing() > 0.0);

  // Ball in D = 3: tensor sphere rule, area 4 pi r^2. The polar-angle Gauss
  // rule needs a moderate order before the sine weight is integrated to
  // machine accuracy.
  DomainSpec s = DomainSpec::make_ball({0.0, 0.0, 0.0}, 1.5);
  BoundaryRule srule(s, config_with(16, 6), 3, 1);
  double stotal = 0.0;
  for (std::size_t i = 0; i < srule.size(); ++i) stotal += srule.node(i).weight;
  CHECK(stotal == doctest::Approx(4.0 * pi * 1.5 * 1.5).epsilon(1e-12));
}

TEST_CASE("monte carlo boundary weights reproduce the measure exactly") {
  DomainSpec s = DomainSpec::make_ball(std::vector<double>(8, 0.0), 1.0);
  QuadratureConfig cfg;
  cfg.boundary_rule = RuleKind::monte_carlo;
  cfg.boundary_samples = 5000;
  BoundaryRule rule(s, cfg, 8, 1);
  CHECK(rule.is_monte_carlo());
  REQUIRE(rule.size() == 5000);
  double total = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    BoundaryNode nd = rule.node(i);
    total += nd.weight;
    CHECK(std::abs(norm(nd.point) - 1.0) < 1e-12);
  }
  CHECK(total == doctest::Approx(sphere_area(8)).epsilon(1e-12));

  // Same seed, same nodes.
  BoundaryRule again(s, cfg, 8, 1);
  BoundaryNode a = rule.node(1234), b = again.node(1234);
  CHECK(norm(a.point - b.point) == 0.0);
}

TEST_CASE("volume rules integrate constants to the volume") {
  DomainSpec b = box4(1.0);
  QuadratureConfig cfg = config_with(6, 6);
  auto one = [](const MultiPoint&) {
    Element e(1);
    e[0] = 1.0;
    return e;
  };
  IntegralResult r = integrate_volume(b, cfg, 2, 2, one);
  CHECK(r.value[0] == doctest::Approx(16.0).epsilon(1e-12));
  CHECK(r.std_err == 0.0);

  DomainSpec s4 = DomainSpec::make_ball({0.0, 0.0, 0.0, 0.0}, 1.0);
  IntegralResult r4 = integrate_volume(s4, config_with(8, 16), 4, 1, one);
  CHECK(r4.value[0] == doctest::Approx(pi * pi / 2.0).epsilon(1e-10));

  DomainSpec s2 = DomainSpec::make_ball({0.0, 0.0}, 1.0);
  IntegralResult r2 = integrate_volume(s2, config_with(8, 16), 2, 1, one);
  CHECK(r2.value[0] == doctest::Approx(pi).epsilon(1e-12));

  DomainSpec s3 = DomainSpec::make_ball({0.0, 0.0, 0.0}, 1.0);
  IntegralResult r3 = integrate_volume(s3, config_with(8, 16), 3, 1, one);
  CHECK(r3.value[0] == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-10));
}

TEST_CASE("gauss boundary quadrature converges at spectral rate") {
  // Analytic integrand on the boundary of a box: errors at q = 8 vs q = 16
  // must drop by at least a factor of 100.
  DomainSpec b = box4(1.0);
  // A pole just off the interval keeps q = 8 far from converged while the
  // geometric decay per added node is still visible.
  auto g = [](const BoundaryNode& nd) {
    Element e(1);
    e[0] = 1.0 / (1.3 - nd.point[0]) + 1.0 / (1.45 + nd.point[2]);
    return e;
  };
  double ref = integrate_boundary(b, config_with(40, 8), 2, 2, g).value[0];
  double e8 = std::abs(integrate_boundary(b, config_with(8, 8), 2, 2, g).value[0] - ref);
  double e16 = std::abs(integrate_boundary(b, config_with(16, 8), 2, 2, g).value[0] - ref);
  REQUIRE(e8 > 0.0);
  CHECK(e16 / e8 < 1e-2);
}

TEST_CASE("monte carlo volume integral brackets the truth") {
  DomainSpec s = DomainSpec::make_ball(std::vector<double>(6, 0.0), 1.0);
  QuadratureConfig cfg;
  cfg.volume_rule = RuleKind::monte_carlo;
  cfg.volume_samples = 40000;
  auto g = [](const MultiPoint& p) {
    Element e(1);
    e[0] = p[0] * p[0] + 0.5;
    return e;
  };
  // int over unit ball in R^6 of x0^2 is V6 * r^2 moment: V6 = pi^3/6,
  // second moment of a coordinate over the ball is 1/(D+2) * V.
  double v6 = std::pow(pi, 3) / 6.0;
  double exact = v6 / 8.0 + 0.5 * v6;
  IntegralResult r = integrate_volume(s, cfg, 6, 1, g);
  CHECK(r.std_err > 0.0);
  CHECK(std::abs(r.value[0] - exact) < 5.0 * r.std_err);
}

TEST_CASE("blocked reduction is invariant under thread count") {
  auto contrib = [](std::size_t i) {
    Element e(2);
    // Deliberately nonuniform magnitudes so summation order would matter.
    e[0] = std::sin(0.001 * double(i)) * std::exp(-0.0001 * double(i));
    e[1] = 1.0 / (1.0 + double(i));
    return e;
  };
  ReduceStats s1 = reduce_indexed(20000, 2, 1, contrib);
  ReduceStats s4 = reduce_indexed(20000, 2, 4, contrib);
  CHECK(s1.count == 20000);
  CHECK(s1.sum[0] == s4.sum[0]);
  CHECK(s1.sum[1] == s4.sum[1]);
  CHECK(s1.sum_sq[0] == s4.sum_sq[0]);
}

TEST_CASE("non-finite contributions are rejected") {
  DomainSpec b = box4(1.0);
  auto g = [](const MultiPoint& p) {
    Element e(1);
    e[0] = 1.0 / (p[0] - p[0]);  // inf
    return e;
  };
  CHECK_THROWS_AS(integrate_volume(b, config_with(4, 4), 2, 2, g), std::runtime_error);
}

TEST_CASE("tensor grids refuse absurd node counts") {
  // 24^16 gauss nodes cannot be enumerated; the rule must say to use
  // monte carlo instead of silently overflowing.
  DomainSpec b(DomainSpec::make_box(std::vector<double>(16, -1.0), std::vector<double>(16, 1.0)));
  QuadratureConfig cfg = config_with(24, 24);
  CHECK_THROWS_AS(VolumeRule(b, cfg, 8, 2), std::invalid_argument);
}

TEST_CASE("config json round trip") {
  QuadratureConfig cfg;
  cfg.boundary_rule = RuleKind::monte_carlo;
  cfg.boundary_samples = 777;
  cfg.volume_q = 9;
  cfg.pv_epsilons = {0.3, 0.15};
  cfg.seed = 99;
  QuadratureConfig back = QuadratureConfig::from_json_text(cfg.to_json_text());
  CHECK(back.boundary_rule == RuleKind::monte_carlo);
  CHECK(back.boundary_samples == 777);
  CHECK(back.volume_q == 9);
  REQUIRE(back.pv_epsilons.size() == 2);
  CHECK(back.pv_epsilons[1] == 0.15);
  CHECK(back.seed == 99);

  CHECK_THROWS(QuadratureConfig::from_json_text(R"({"volume": {"q": -3}})"));
  CHECK_THROWS(QuadratureConfig::from_json_text(R"({"boundary": {"rule": "simpson"}})"));
  CHECK_THROWS(QuadratureConfig::from_json_text("not json"));
}

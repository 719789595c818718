#include <cmath>
#include <vector>

#include "alterna/integral_ops.hpp"
#include "alterna/numerics.hpp"
#include "doctest.h"

using namespace alterna;

namespace {

MultiPoint mp(int n, int stride, std::vector<double> c) {
  return MultiPoint::from_coords(n, stride, c);
}

DomainSpec box(int dim, double half) {
  return DomainSpec::make_box(std::vector<double>(dim, -half), std::vector<double>(dim, half));
}

QuadratureConfig fast_config(int bq, int vq) {
  QuadratureConfig cfg;
  cfg.boundary_q = bq;
  cfg.volume_q = vq;
  return cfg;
}

}  // namespace

TEST_CASE("solid angle fractions on box and ball") {
  DomainSpec b = box(4, 1.0);
  long long N = 20000;

  SolidAngle inner = solid_angle(b, mp(2, 2, {0.2, 0.1, -0.3, 0.0}), N, 42);
  CHECK(inner.analytic == 1.0);
  SolidAngle face = solid_angle(b, mp(2, 2, {1.0, 0.1, -0.3, 0.2}), N, 42);
  CHECK(face.analytic == 0.5);
  SolidAngle edge = solid_angle(b, mp(2, 2, {1.0, 1.0, -0.3, 0.2}), N, 42);
  CHECK(edge.analytic == 0.25);
  SolidAngle corner = solid_angle(b, mp(2, 2, {1.0, 1.0, 1.0, 1.0}), N, 42);
  CHECK(corner.analytic == 0.0625);
  SolidAngle outside = solid_angle(b, mp(2, 2, {1.5, 0.0, 0.0, 0.0}), N, 42);
  CHECK(outside.analytic == 0.0);

  // Monte Carlo estimates agree within sampling error.
  for (const SolidAngle* s : {&face, &edge, &corner}) {
    CHECK(s->mc_err > 0.0);
    CHECK(std::abs(s->mc - s->analytic) < 5.0 * s->mc_err);
  }

  DomainSpec ball = DomainSpec::make_ball({0.0, 0.0, 0.0, 0.0}, 1.0);
  SolidAngle sphere_pt = solid_angle(ball, mp(2, 2, {1.0, 0.0, 0.0, 0.0}), N, 42);
  CHECK(sphere_pt.analytic == 0.5);
  CHECK(std::abs(sphere_pt.mc - 0.5) < 5.0 * sphere_pt.mc_err);
}

TEST_CASE("boundary integral reproduces a constant quickly") {
  KernelContext K = make_kernel_context(Subspace::preset("H-CJ"), 2);
  Element c = K.S->algebra().zero();
  c[0] = 0.8;
  c[1] = -0.4;
  c[3] = 0.2;
  FieldFunction f = ff_constant(K.S, 2, c);
  DomainSpec b = box(4, 1.0);

  EvalResult inside = bm_integral(K, f, b, mp(2, 2, {0.2, -0.1, 0.15, 0.05}), fast_config(12, 8));
  CHECK_FALSE(inside.ill_conditioned);
  CHECK(max_abs(inside.value - c) < 2e-3);

  EvalResult outside = bm_integral(K, f, b, mp(2, 2, {1.8, 0.3, -0.2, 0.1}), fast_config(12, 8));
  CHECK(max_abs(outside.value) < 2e-3);

  // Near-boundary evaluation flags the conditioning problem.
  EvalResult close = bm_integral(K, f, b, mp(2, 2, {0.999, 0.0, 0.0, 0.0}), fast_config(8, 8));
  CHECK(close.ill_conditioned);
  CHECK(!close.note.empty());
}

TEST_CASE("boundary evaluation rejects points on the boundary") {
  KernelContext K = make_kernel_context(Subspace::preset("H-CJ"), 2);
  FieldFunction f = ff_constant(K.S, 2, K.S->algebra().one());
  DomainSpec b = box(4, 1.0);
  CHECK_THROWS(bm_integral(K, f, b, mp(2, 2, {1.0, 0.2, 0.0, 0.0}), fast_config(8, 8)));
}

TEST_CASE("teodorescu transform at the center of a symmetric ball") {
  // E(y) is odd under y -> -y, so T[1](0) over a centered ball vanishes.
  KernelContext K = make_kernel_context(Subspace::preset("H-full"), 1);
  FieldFunction f = ff_constant(K.S, 1, K.S->algebra().one());
  DomainSpec ball = DomainSpec::make_ball({0.0, 0.0, 0.0, 0.0}, 1.0);
  EvalResult r = teodorescu(K, f, ball, mp(1, 4, {0.0, 0.0, 0.0, 0.0}), fast_config(8, 8));
  CHECK(max_abs(r.value) < 1e-10);

  // Exterior evaluation integrates the smooth kernel directly.
  EvalResult out = teodorescu(K, f, ball, mp(1, 4, {2.0, 0.0, 0.0, 0.0}), fast_config(8, 10));
  CHECK(max_abs(out.value) > 1e-3);  // potential does not vanish outside

  // n >= 2 contexts are rejected.
  KernelContext K2 = make_kernel_context(Subspace::preset("H-CJ"), 2);
  FieldFunction f2 = ff_constant(K2.S, 2, K2.S->algebra().one());
  CHECK_THROWS(teodorescu(K2, f2, box(4, 1.0), mp(2, 2, {0, 0, 0, 0}), fast_config(8, 8)));
}

TEST_CASE("teodorescu inverts the derivative at a point") {
  KernelContext K = make_kernel_context(Subspace::preset("H-full"), 1);
  Element c = K.S->algebra().zero();
  c[0] = 0.5;
  c[2] = -0.4;
  FieldFunction f = ff_constant(K.S, 1, c);
  DomainSpec b = box(4, 1.0);
  QuadratureConfig cfg = fast_config(8, 8);

  FieldFunction T{K.S, 1,
                  [&K, &f, &b, &cfg](const MultiPoint& x) { return teodorescu(K, f, b, x, cfg).value; },
                  nullptr, Smoothness::smooth, std::nullopt, "T[f]"};
  MultiPoint x0 = mp(1, 4, {0.2, -0.1, 0.3, 0.1});
  FdOptions opt;
  opt.h_rel = 1e-3;
  opt.richardson = false;
  DiracResult d = dirac(T, 1, x0, opt, true);
  CHECK(max_abs(d.value - c) < 5e-3);
}

TEST_CASE("radial cutoff profile") {
  double R1 = 1.1, R2 = 1.54;
  CHECK(radial_cutoff(0.3, R1, R2) == 1.0);
  CHECK(radial_cutoff(R1, R1, R2) == 1.0);
  CHECK(radial_cutoff(R2, R1, R2) == 0.0);
  CHECK(radial_cutoff(2.0, R1, R2) == 0.0);

  // Monotone across the shell; strictly decreasing away from the flat ends
  // (the profile is C-infinity, so it hugs 1 and 0 near them).
  double prev = 1.0;
  for (double r = R1 + 0.01; r < R2; r += 0.05) {
    double v = radial_cutoff(r, R1, R2);
    CHECK(v <= prev);
    CHECK(v > 0.0);
    prev = v;
  }
  CHECK(radial_cutoff(1.25, R1, R2) < 1.0);
  CHECK(radial_cutoff(1.35, R1, R2) < radial_cutoff(1.25, R1, R2));
  CHECK(radial_cutoff(1.45, R1, R2) < radial_cutoff(1.35, R1, R2));
  CHECK(radial_cutoff((R1 + R2) / 2.0, R1, R2) == doctest::Approx(0.5).epsilon(1e-12));

  // Derivative matches finite differences mid-shell and vanishes at the ends.
  for (double r : {1.2, 1.3, 1.45}) {
    double h = 1e-6;
    double fd = (radial_cutoff(r + h, R1, R2) - radial_cutoff(r - h, R1, R2)) / (2.0 * h);
    CHECK(radial_cutoff_deriv(r, R1, R2) == doctest::Approx(fd).epsilon(1e-6));
    CHECK(radial_cutoff_deriv(r, R1, R2) < 0.0);
  }
  CHECK(radial_cutoff_deriv(1.0, R1, R2) == 0.0);
  CHECK(radial_cutoff_deriv(1.6, R1, R2) == 0.0);
  CHECK(std::abs(radial_cutoff_deriv(R1 + 1e-9, R1, R2)) < 1e-6);
}

TEST_CASE("principal value of a constant on a face approaches tau f") {
  KernelContext K = make_kernel_context(Subspace::preset("H-CJ"), 2);
  FieldFunction f = ff_constant(K.S, 2, K.S->algebra().one());
  DomainSpec b = box(4, 1.0);
  MultiPoint x = mp(2, 2, {1.0, 0.0, 0.0, 0.0});

  QuadratureConfig cfg = fast_config(16, 8);
  PVResult pv = bm_singular_pv(K, f, b, x, cfg);
  REQUIRE(pv.ladder.size() == cfg.pv_epsilons.size());
  CHECK(std::abs(pv.value[0] - 0.5) < 5e-4);
  for (int s = 1; s < 4; ++s) CHECK(std::abs(pv.value[s]) < 5e-4);

  // Without extrapolation the last rung is returned as-is.
  PVConfig raw;
  raw.extrapolation = PVConfig::Extrapolation::none;
  PVResult last = bm_singular_pv(K, f, b, x, cfg, raw);
  CHECK(max_abs(last.value - pv.ladder.back()) == 0.0);

  // Interior points are rejected: the PV routine is for boundary points.
  CHECK_THROWS(bm_singular_pv(K, f, b, mp(2, 2, {0.2, 0, 0, 0}), cfg));
}

TEST_CASE("plemelj argument validation") {
  KernelContext K = make_kernel_context(Subspace::preset("H-CJ"), 2);
  FieldFunction f = ff_constant(K.S, 2, K.S->algebra().one());
  DomainSpec b = box(4, 1.0);
  QuadratureConfig cfg = fast_config(8, 8);

  ApproachSpec ap;
  ap.direction = mp(2, 2, {1.0, 0.0, 0.0, 0.0});
  ap.h0 = 0.2;
  ap.levels = 2;

  // Off-boundary base point.
  CHECK_THROWS(plemelj_limits(K, f, b, mp(2, 2, {0.5, 0, 0, 0}), ap, cfg));
  // Edge point: the outward normal is ambiguous.
  CHECK_THROWS(plemelj_limits(K, f, b, mp(2, 2, {1.0, 1.0, 0, 0}), ap, cfg));
  // Tangential approach direction.
  ApproachSpec tang = ap;
  tang.direction = mp(2, 2, {0.0, 1.0, 0.0, 0.0});
  CHECK_THROWS(plemelj_limits(K, f, b, mp(2, 2, {1.0, 0, 0, 0}), tang, cfg));
  // Too few ladder levels.
  ApproachSpec shallow = ap;
  shallow.levels = 1;
  CHECK_THROWS(plemelj_limits(K, f, b, mp(2, 2, {1.0, 0, 0, 0}), shallow, cfg));
}

TEST_CASE("inhomogeneous solver validates its inputs") {
  KernelContext K = make_kernel_context(Subspace::preset("H-CJ"), 2);
  QuadratureConfig cfg = fast_config(8, 8);

  // n = 1 context rejected.
  KernelContext K1 = make_kernel_context(Subspace::preset("H-CJ"), 1);
  FieldFunction g1 = ff_constant(K1.S, 1, K1.S->algebra().one());
  CHECK_THROWS(solve_inhomogeneous(K1, {g1}, mp(1, 2, {0, 0}), cfg));

  // Data without support metadata rejected.
  FieldFunction nosupp = ff_constant(K.S, 2, K.S->algebra().one());
  CHECK_THROWS(solve_inhomogeneous(K, {nosupp, nosupp}, mp(2, 2, {0, 0, 0, 0}), cfg));
}

TEST_CASE("inhomogeneous solve reconstructs a bump from its derivative") {
  KernelContext K = make_kernel_context(Subspace::preset("H-CJ"), 2);
  Element amp = K.S->algebra().zero();
  amp[0] = 1.0;
  amp[2] = -0.5;
  FieldFunction bump = ff_bump(K.S, 2, {0.0, 0.0, 0.0, 0.0}, 0.8, amp);

  std::vector<FieldFunction> g;
  for (int j = 1; j <= 2; ++j) {
    FieldFunction gj;
    gj.S = K.S;
    gj.n = 2;
    gj.eval = dbar_of(bump, j);
    gj.smoothness = Smoothness::smooth_compact;
    gj.support = bump.support;
    gj.label = "dbar of bump";
    g.push_back(gj);
  }

  MultiPoint probe = mp(2, 2, {0.2, -0.1, 0.1, 0.05});
  EvalResult r = solve_inhomogeneous(K, g, probe, fast_config(10, 10));
  CHECK(max_abs(r.value - bump.eval(probe)) < 5e-3);

  // Far outside the support cylinder the solution vanishes trivially.
  EvalResult far = solve_inhomogeneous(K, g, mp(2, 2, {0.1, 0.0, 1.5, 0.0}), fast_config(10, 10));
  CHECK(max_abs(far.value) < 1e-12);
}

TEST_CASE("compatibility checks accept derivative data and flag garbage") {
  KernelContext K = make_kernel_context(Subspace::preset("H-CJ"), 2);
  Element amp = K.S->algebra().zero();
  amp[0] = 1.0;
  FieldFunction bump = ff_bump(K.S, 2, {0.0, 0.0, 0.0, 0.0}, 0.8, amp);

  std::vector<FieldFunction> g;
  for (int j = 1; j <= 2; ++j) {
    FieldFunction gj;
    gj.S = K.S;
    gj.n = 2;
    gj.eval = dbar_of(bump, j);
    gj.smoothness = Smoothness::smooth_compact;
    gj.support = bump.support;
    g.push_back(gj);
  }

  std::vector<MultiPoint> probes = {mp(2, 2, {0.2, 0.1, -0.1, 0.3}),
                                    mp(2, 2, {-0.3, 0.2, 0.25, -0.15})};
  CompatReport ok = check_compatibility(g, probes);
  CHECK(ok.max_residual < 1e-4);
  CHECK(ok.ok(1e-4));
  REQUIRE(ok.residuals.size() == 4);  // all ordered pairs (i, j) for n = 2

  // Incompatible data: swap nothing, just replace g_2 by something unrelated.
  std::vector<FieldFunction> bad = g;
  bad[1] = ff_bump(K.S, 2, {0.1, 0.0, 0.0, 0.0}, 0.7, amp);
  CompatReport flagged = check_compatibility(bad, probes);
  CHECK(flagged.max_residual > 1e-2);

  // Integral form at a probe with x_1 outside the support boxes.
  Element iv = check_compatibility_integral(K, g, 2, mp(2, 2, {1.5, 0.3, 0.1, 0.2}),
                                            fast_config(8, 16));
  CHECK(max_abs(iv) < 1e-4);
  // Probes with x_1 inside the support are not handled by this rule.
  CHECK_THROWS(check_compatibility_integral(K, g, 2, mp(2, 2, {0.1, 0.0, 0.1, 0.2}),
                                            fast_config(8, 16)));
}

TEST_CASE("hartogs setup validation") {
  KernelContext K = make_kernel_context(Subspace::preset("H-CJ"), 2);
  FieldFunction f = ff_fueter(K.S, 2, 1, 1);
  QuadratureConfig cfg = fast_config(8, 8);

  // Hole too large for the enclosing domain: the cutoff shell pokes out.
  DomainSpec omega = box(4, 1.0);
  DomainSpec big_hole = box(4, 0.8);
  CHECK_THROWS(hartogs_extend(K, f, omega, big_hole, cfg));

  // n = 1 has no compactness phenomenon; reject.
  KernelContext K1 = make_kernel_context(Subspace::preset("H-full"), 1);
  FieldFunction f1 = ff_fueter(K1.S, 1, 1, 1);
  CHECK_THROWS(hartogs_extend(K1, f1, box(4, 1.0), box(4, 0.1), cfg));
}

TEST_CASE("hartogs extension structure on a small configuration") {
  KernelContext K = make_kernel_context(Subspace::preset("H-CJ"), 2);
  FieldFunction f = ff_fueter(K.S, 2, 1, 1);
  DomainSpec omega = box(4, 2.0);
  DomainSpec hole = box(4, 0.25);
  QuadratureConfig cfg = fast_config(10, 10);

  HartogsExtension ext = hartogs_extend(K, f, omega, hole, cfg);
  CHECK(ext.plateau_radius > 0.5);
  CHECK(ext.support_radius > ext.plateau_radius);
  REQUIRE(ext.h.size() == 2);
  CHECK(ext.h[0].support.has_value());

  // f0 vanishes on the plateau (where f may be undefined in general).
  CHECK(max_abs(ext.f0.eval(mp(2, 2, {0.1, 0.0, 0.05, 0.0}))) == 0.0);
  // Beyond the shell f0 agrees with f. The second block stays small so the
  // slice through the cutoff shell is nonempty and the correction integral
  // has to cancel by the theorem rather than by an empty integrand.
  MultiPoint far = mp(2, 2, {1.5, 0.3, 0.1, -0.2});
  CHECK(max_abs(ext.f0.eval(far) - f.eval(far)) == 0.0);
  // The cutoff data vanishes off the shell.
  CHECK(max_abs(ext.h[0].eval(mp(2, 2, {0.1, 0.0, 0.05, 0.0}))) == 0.0);
  CHECK(max_abs(ext.h[0].eval(far)) == 0.0);

  // The extension agrees with f outside the shell up to quadrature error
  // (loose here: this configuration runs at a deliberately coarse rule).
  Element ev = ext.extended.eval(far);
  CHECK(max_abs(ev - f.eval(far)) < 2e-2);
}

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "alterna/integral_ops.hpp"

namespace alterna {

// Every verifiable statement the engine knows how to exercise.
enum class Theorem {
  bm_reproduce,
  bm_exterior,
  cauchy_pompeiu,
  kernel_divergence,
  kernel_harmonic,
  kernel_gradient_relation,
  pv_constant,
  plemelj_jump,
  teodorescu_inverse,
  inhomogeneous_solve,
  compatibility,
  hartogs,
  algebra_laws,
  integral_laws,
  norm_bound,
};

const char* theorem_name(Theorem t);
Theorem theorem_from_name(const std::string& name);
std::vector<Theorem> all_theorems();

struct VerificationCase {
  std::string id;
  Theorem theorem = Theorem::algebra_laws;
  // Free-form parameters read by the theorem runner: algebra/subspace preset,
  // domain, test functions, probe points, quadrature config.
  std::string setup_json = "{}";
  double tolerance = 0.0;
  // Refinement ladder, coarse to fine: boundary q for Gauss rules, sample
  // count for Monte Carlo. Single-rung cases use a one-entry ladder.
  std::vector<int> ladder;
  std::vector<std::string> tags;
};

struct RungResult {
  int q_or_samples = 0;
  double residual = 0.0;
  // Empirical convergence order log(r_prev/r) / log(q/q_prev); 0 on the
  // first rung or when a ratio is degenerate.
  double order_est = 0.0;
  double seconds = 0.0;
};

struct ConvergenceReport {
  std::string id;
  Theorem theorem = Theorem::algebra_laws;
  double tolerance = 0.0;
  std::vector<RungResult> rungs;
  double residual = 0.0;  // final rung
  bool passed = false;    // final residual < tolerance
  std::string details_json = "{}";
};

struct HarnessOptions {
  int threads = 1;
  std::uint64_t seed = 42;
  // Wall-clock per rung is reported as 0.000 unless enabled, so that repeated
  // runs emit identical bytes.
  bool timings = false;
};

ConvergenceReport run_case(const VerificationCase& vc, const HarnessOptions& opt);

std::vector<VerificationCase> default_suite();

// Keep the cases carrying any of the given tags (case ids match too).
// Throws std::invalid_argument when a tag matches nothing.
std::vector<VerificationCase> filter_suite(const std::vector<VerificationCase>& suite,
                                           const std::vector<std::string>& tags);

// Suite file: {"name": ..., "cases": [{"id", "theorem", "tolerance",
// "ladder", "tags", "setup"}]}.
std::vector<VerificationCase> load_suite_file(const std::string& path);

std::string emit_case_json(const ConvergenceReport& r);
std::string emit_case_csv(const ConvergenceReport& r);
std::string emit_suite_json(const std::string& suite_name,
                            const std::vector<ConvergenceReport>& reports);
std::string emit_suite_csv(const std::vector<ConvergenceReport>& reports);

}  // namespace alterna

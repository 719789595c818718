#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "alterna/harness.hpp"
#include "alterna/numerics.hpp"
#include "json.hpp"

using alterna::Element;
using alterna::MultiPoint;
using ordered_json = nlohmann::ordered_json;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 42;
  int threads = 1;
};

int threads_from_env() {
  const char* env = std::getenv("ALTERNA_THREADS");
  if (!env) return 1;
  int t = std::atoi(env);
  return t >= 1 ? t : 1;
}

ordered_json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ordered_json::parse(ss.str());
}

std::vector<double> coeffs_of(const Element& e) {
  std::vector<double> v(static_cast<std::size_t>(e.dim()));
  for (int i = 0; i < e.dim(); ++i) v[std::size_t(i)] = e[i];
  return v;
}

// ------------------------------------------------------------ algebra

int cmd_algebra_inspect(const std::string& kind) {
  alterna::Algebra A = alterna::Algebra::by_name(kind);
  A.validate();
  ordered_json out;
  out["name"] = A.name();
  out["dim"] = A.dim();
  ordered_json rows = ordered_json::array();
  int upto = std::min(A.dim(), 8);
  for (int i = 1; i < upto; ++i) {
    for (int j = 1; j < upto; ++j) {
      Element ei = A.zero(), ej = A.zero();
      ei[i] = 1.0;
      ej[j] = 1.0;
      Element p = A.mul(ei, ej);
      std::string rhs;
      for (int k = 0; k < A.dim(); ++k) {
        if (p[k] == 0.0) continue;
        if (!rhs.empty()) rhs += " + ";
        rhs += (p[k] < 0 ? "-" : "") + A.basis_name(k);
      }
      if (rhs.empty()) rhs = "0";
      rows.push_back(A.basis_name(i) + "*" + A.basis_name(j) + " = " + rhs);
    }
  }
  out["table_rows"] = rows;
  // Sampled alternativity: [x,x,y] and [y,x,x] over a deterministic draw.
  alterna::Rng rng(alterna::mix_seed(42, 7));
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    Element x = A.zero(), y = A.zero();
    for (int c = 0; c < A.dim(); ++c) x[c] = rng.uniform(-1.0, 1.0);
    for (int c = 0; c < A.dim(); ++c) y[c] = rng.uniform(-1.0, 1.0);
    worst = std::max(worst, max_abs(A.associator(x, x, y)));
    worst = std::max(worst, max_abs(A.associator(y, x, x)));
  }
  out["alternativity_max_residual"] = worst;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_algebra_validate(const std::string& path) {
  ordered_json out;
  out["file"] = path;
  try {
    alterna::Algebra A = alterna::Algebra::from_file(path);
    A.validate();
    out["name"] = A.name();
    out["dim"] = A.dim();
    out["valid"] = true;
  } catch (const std::exception& e) {
    out["valid"] = false;
    out["error"] = e.what();
    std::cout << out.dump(2) << "\n";
    return 1;
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

// ------------------------------------------------------------ eval

alterna::DomainSpec domain_from_json(const ordered_json& d) {
  if (d.contains("box_lo"))
    return alterna::DomainSpec::make_box(d.at("box_lo").get<std::vector<double>>(),
                                         d.at("box_hi").get<std::vector<double>>());
  return alterna::DomainSpec::make_ball(d.at("ball_center").get<std::vector<double>>(),
                                        d.at("ball_radius").get<double>());
}

int cmd_eval(const std::string& op, const std::string& config_path, const GlobalOpts& g) {
  ordered_json c = read_json_file(config_path);
  alterna::SubspacePtr S = alterna::Subspace::preset(c.value("preset", std::string("H-CJ")));
  int n = c.value("n", 1);
  alterna::QuadratureConfig cfg;
  if (c.contains("config")) cfg = alterna::QuadratureConfig::from_json_text(c.at("config").dump());
  cfg.seed = g.seed;
  cfg.threads = g.threads;
  MultiPoint x = MultiPoint::from_coords(n, S->stride(), c.at("x").get<std::vector<double>>());

  ordered_json out;
  out["op"] = op;
  Element value = S->algebra().zero();
  double est_error = 0.0;

  if (op == "solid_angle") {
    alterna::SolidAngle sa = alterna::solid_angle(domain_from_json(c.at("domain")), x,
                                                  c.value("mc_samples", 0), g.seed);
    out["value_coeffs"] = std::vector<double>{sa.analytic};
    out["est_error"] = sa.mc_err;
    if (c.value("mc_samples", 0) > 0) out["mc_estimate"] = sa.mc;
    out["config_echo"] = c;
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  alterna::KernelContext K = alterna::make_kernel_context(S, n);
  alterna::DomainSpec domain = domain_from_json(c.at("domain"));
  alterna::FieldFunction f = alterna::parse_function(S, n, c.at("f").get<std::string>());

  if (op == "bm_integral") {
    alterna::EvalResult r = alterna::bm_integral(K, f, domain, x, cfg);
    value = r.value;
    est_error = r.est_error;
    if (r.ill_conditioned) out["note"] = r.note;
  } else if (op == "cauchy_pompeiu") {
    alterna::EvalResult r = alterna::cauchy_pompeiu(K, f, domain, x, cfg);
    value = r.value;
    est_error = r.est_error;
  } else if (op == "teodorescu") {
    alterna::EvalResult r = alterna::teodorescu(K, f, domain, x, cfg);
    value = r.value;
    est_error = r.est_error;
  } else if (op == "bm_singular_pv") {
    alterna::PVConfig pv;
    if (c.contains("epsilons")) pv.epsilons = c.at("epsilons").get<std::vector<double>>();
    alterna::PVResult r = alterna::bm_singular_pv(K, f, domain, x, cfg, pv);
    value = r.value;
    est_error = r.est_error;
    out["beta"] = r.beta;
  } else if (op == "plemelj_limits") {
    alterna::ApproachSpec ap;
    ap.direction =
        MultiPoint::from_coords(n, S->stride(), c.at("direction").get<std::vector<double>>());
    ap.h0 = c.value("h0", 0.2);
    ap.levels = c.value("levels", 4);
    alterna::JumpResult r = alterna::plemelj_limits(K, f, domain, x, ap, cfg);
    out["interior_coeffs"] = coeffs_of(r.interior);
    out["exterior_coeffs"] = coeffs_of(r.exterior);
    out["tau"] = r.tau;
    out["jump_residual"] = r.jump_residual;
    value = r.pv;
    est_error = r.est_error;
  } else {
    throw CLI::ValidationError("--op", "unknown operator: " + op);
  }
  out["value_coeffs"] = coeffs_of(value);
  out["est_error"] = est_error;
  out["config_echo"] = c;
  std::cout << out.dump(2) << "\n";
  return 0;
}

// ------------------------------------------------------------ verify / converge

int run_and_report(const std::vector<alterna::VerificationCase>& cases,
                   const std::string& suite_name, const std::string& out_dir,
                   const alterna::HarnessOptions& opt) {
  namespace fs = std::filesystem;
  std::vector<alterna::ConvergenceReport> reports;
  for (const alterna::VerificationCase& vc : cases) {
    std::cerr << "[running] " << vc.id << "\n";
    reports.push_back(alterna::run_case(vc, opt));
  }
  fs::path dir = fs::path(out_dir) / suite_name;
  fs::create_directories(dir);
  for (const alterna::ConvergenceReport& r : reports) {
    std::ofstream((dir / (r.id + ".json")).string()) << alterna::emit_case_json(r);
    std::ofstream((dir / (r.id + ".csv")).string()) << alterna::emit_case_csv(r);
  }
  std::cout << alterna::emit_suite_json(suite_name, reports);
  for (const alterna::ConvergenceReport& r : reports) {
    if (!r.passed) {
      std::fprintf(stderr, "case failed: %s (residual=%.6e, tolerance=%.6e)\n", r.id.c_str(),
                   r.residual, r.tolerance);
      return 1;
    }
  }
  return 0;
}

int cmd_verify(const std::string& suite, const std::string& filter, const std::string& out_dir,
               const alterna::HarnessOptions& opt) {
  std::vector<alterna::VerificationCase> cases;
  std::string name;
  if (suite == "default") {
    cases = alterna::default_suite();
    name = "default";
  } else {
    cases = alterna::load_suite_file(suite);
    name = std::filesystem::path(suite).stem().string();
  }
  if (!filter.empty()) cases = alterna::filter_suite(cases, {filter});
  return run_and_report(cases, name, out_dir, opt);
}

int cmd_converge(const std::string& case_id, const std::string& ladder_text,
                 const alterna::HarnessOptions& opt) {
  std::vector<alterna::VerificationCase> suite = alterna::default_suite();
  alterna::VerificationCase* found = nullptr;
  for (alterna::VerificationCase& vc : suite)
    if (vc.id == case_id) found = &vc;
  if (!found) throw CLI::ValidationError("--case", "unknown case id: " + case_id);
  if (!ladder_text.empty()) {
    std::string text = ladder_text;
    if (text.rfind("q=", 0) == 0 || text.rfind("N=", 0) == 0) text = text.substr(2);
    std::vector<int> ladder;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) ladder.push_back(std::stoi(tok));
    if (ladder.empty()) throw CLI::ValidationError("--ladder", "empty ladder");
    found->ladder = ladder;
  }
  alterna::ConvergenceReport r = alterna::run_case(*found, opt);
  std::cout << alterna::emit_case_csv(r);
  if (!r.passed) {
    std::fprintf(stderr, "case failed: %s (residual=%.6e, tolerance=%.6e)\n", r.id.c_str(),
                 r.residual, r.tolerance);
    return 1;
  }
  return 0;
}

int cmd_hartogs_demo(const alterna::HarnessOptions& opt) {
  for (const alterna::VerificationCase& vc : alterna::default_suite()) {
    if (vc.theorem != alterna::Theorem::hartogs) continue;
    std::cerr << "[running] " << vc.id << "\n";
    alterna::ConvergenceReport r = alterna::run_case(vc, opt);
    std::cout << alterna::emit_case_json(r);
    return r.passed ? 0 : 1;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical engine for monogenic-function identities over alternative *-algebras"};
  app.require_subcommand(1);

  GlobalOpts g;
  g.threads = threads_from_env();
  app.add_option("--seed", g.seed, "RNG seed for every Monte Carlo component");
  app.add_option("--threads", g.threads, "worker threads (env ALTERNA_THREADS)");

  auto* algebra = app.add_subcommand("algebra", "inspect or validate algebras");
  algebra->require_subcommand(1);
  auto* inspect = algebra->add_subcommand("inspect", "print dim, product table, checks");
  std::string kind = "quaternions";
  inspect->add_option("--kind", kind, "complex|quaternions|octonions|clifford<m>");
  auto* validate = algebra->add_subcommand("validate", "validate a structure-tensor file");
  std::string algebra_file;
  validate->add_option("--file", algebra_file, "JSON structure definition")->required();

  auto* eval = app.add_subcommand("eval", "evaluate one operator, JSON to stdout");
  std::string op, eval_config;
  eval->add_option("--op", op, "operator name")->required();
  eval->add_option("--config", eval_config, "JSON parameter file")->required();

  auto* verify = app.add_subcommand("verify", "run a verification suite, write reports");
  std::string suite = "default", filter, out_dir = "results";
  bool timings = false;
  verify->add_option("--suite", suite, "'default' or a suite JSON file");
  verify->add_option("--filter", filter, "keep cases matching this tag or id");
  verify->add_option("--out", out_dir, "report directory (default results/)");
  verify->add_flag("--timings", timings, "report wall-clock per rung (non-reproducible bytes)");

  auto* converge = app.add_subcommand("converge", "convergence table for one case, CSV");
  std::string case_id, ladder_text;
  converge->add_option("--case", case_id, "case id from the default suite")->required();
  converge->add_option("--ladder", ladder_text, "e.g. q=8,12,16,24");

  auto* hartogs = app.add_subcommand("hartogs", "run the extension demo");
  bool demo = false;
  hartogs->add_flag("--demo", demo, "run the default concentric-box case");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  alterna::HarnessOptions hopt;
  hopt.seed = g.seed;
  hopt.threads = g.threads;
  hopt.timings = timings;

  try {
    if (inspect->parsed()) return cmd_algebra_inspect(kind);
    if (validate->parsed()) return cmd_algebra_validate(algebra_file);
    if (eval->parsed()) return cmd_eval(op, eval_config, g);
    if (verify->parsed()) return cmd_verify(suite, filter, out_dir, hopt);
    if (converge->parsed()) return cmd_converge(case_id, ladder_text, hopt);
    if (hartogs->parsed()) return cmd_hartogs_demo(hopt);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

#include "trisolve/commands.hpp"

#include "trisolve/discrete_io.hpp"
#include "trisolve/errors.hpp"
#include "trisolve/oracle.hpp"
#include "trisolve/problem.hpp"
#include "trisolve/solver.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

namespace trisolve {

namespace fs = std::filesystem;

namespace {

std::string fmt17(double v) {
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  if (std::isnan(v))
    return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string output_dir(const ExperimentConfig& cfg, const CliOptions& opts) {
  return opts.out_dir ? *opts.out_dir : cfg.output_dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw ParameterError("cannot write '" + path.string() + "'");
  f << text;
}

SolverConfig solver_config(const ExperimentConfig& cfg, const CliOptions& opts) {
  SolverConfig s = cfg.solver;
  if (opts.seed)
    s.rng_seed = *opts.seed;
  return s;
}

ProblemInstance make_instance(const ExperimentConfig& cfg, std::shared_ptr<const Mesh> mesh, double lambda,
                              double mu) {
  const Box box = cfg.box();
  ProblemInstance inst{.mesh = std::move(mesh),
                       .alpha = cfg.alpha.build(box),
                       .p = cfg.p,
                       .f = cfg.f.build(box),
                       .g = std::nullopt,
                       .lambda = lambda,
                       .mu = mu,
                       .eps = -1.0,
                       .threads = cfg.threads};
  if (cfg.g)
    inst.g = cfg.g->build(box);
  return inst;
}

// Roots of the constant-coefficient equation, used as extra initial guesses.
std::vector<double> oracle_constants(const ExperimentConfig& cfg, double lambda) {
  const Box box = cfg.box();
  const CoefficientField alpha = cfg.alpha.build(box);
  const Nonlinearity f = cfg.f.build(box);
  if (!alpha.is_constant() || !f.is_polynomial() || !f.spatial().is_constant() || !(lambda > 0.0) ||
      f.spatial().inf() < 0.0)
    return {};
  const auto report = constant_solutions(alpha.inf(), f.spatial().inf(), f.shape_polynomial(), lambda, cfg.p);
  std::vector<double> out;
  for (double s : report.roots)
    if (s != 0.0)
      out.push_back(s);
  return out;
}

Json solution_json(const Solution& s) {
  Json j;
  j["wnorm"] = json_number(s.wnorm);
  j["energy"] = json_number(s.energy);
  j["residual_norm"] = json_number(s.residual_norm);
  return j;
}

Json thresholds_json(const ThresholdReport& r) {
  Json j;
  j["rho1"] = json_number(r.rho1);
  j["rho2"] = json_number(r.rho2);
  j["gamma"] = json_number(r.gamma);
  j["delta"] = json_number(r.delta);
  j["condition1"] = r.condition1_holds;
  if (r.condition1_holds)
    j["interval"] = Json::array({json_number(r.interval_lo), json_number(r.interval_hi)});
  else
    j["interval"] = nullptr;
  j["exactness"] = to_string(r.exactness);
  j["heuristic"] = r.exactness == Exactness::sampled;
  j["sup_ratio"] = json_number(r.sup_ratio.value);
  j["maximizer"] = json_number(r.sup_ratio.maximizer);
  j["condition1_lhs"] = json_number(r.condition1_lhs);
  j["condition1_rhs"] = json_number(r.condition1_rhs);
  return j;
}

} // namespace

ThresholdAnalysis analyze_thresholds(const ExperimentConfig& cfg) {
  const Box box = cfg.box();
  const CoefficientField alpha = cfg.alpha.build(box);
  const Nonlinearity f = cfg.f.build(box);

  ThresholdAnalysis a;
  a.growth = check_growth(f, cfg.p, cfg.dim);
  a.general = check_condition1(f, alpha, cfg.p);

  const auto abc = cfg.f.cubic_coefficients();
  if (abc && cfg.p == 2.0 && (*abc)[2] > 0.0 && f.spatial().inf() >= 0.0 && f.spatial().integral() > 0.0) {
    a.prop1 = prop1_thresholds(alpha, f.spatial(), (*abc)[0], (*abc)[1], (*abc)[2]);
    a.consistency = consistency_vs_theorem1(*a.prop1, a.general);
  }

  Json j;
  j["schema"] = 1;
  j["command"] = "thresholds";
  Json g;
  g["p"] = json_number(a.growth.p);
  g["n"] = a.growth.n;
  g["q"] = json_number(a.growth.q);
  g["q_limit"] = json_number(a.growth.q_limit);
  g["admissible"] = a.growth.admissible;
  j["growth"] = g;
  j["thresholds"] = thresholds_json(a.general);
  if (a.prop1) {
    const Prop1Report& p = *a.prop1;
    Json pj;
    pj["gamma0"] = json_number(p.gamma0);
    pj["delta0"] = json_number(p.delta0);
    pj["a_constraint_ok"] = p.a_constraint_ok;
    pj["condition8_applicable"] = p.condition8_applicable;
    pj["condition8_holds"] = p.condition8_holds;
    pj["condition8_lhs"] = json_number(p.condition8_lhs);
    pj["condition8_rhs"] = json_number(p.condition8_rhs);
    pj["hypotheses_hold"] = p.hypotheses_hold();
    j["prop1"] = pj;
    Json cj;
    cj["consistent"] = a.consistency->consistent;
    cj["gamma_relative_error"] = json_number(a.consistency->gamma_relative_error);
    cj["delta_match"] = a.consistency->delta_match;
    cj["detail"] = a.consistency->detail;
    j["consistency"] = cj;
  } else {
    j["prop1"] = nullptr;
    j["consistency"] = nullptr;
  }
  a.json = std::move(j);
  return a;
}

int cmd_thresholds(const ExperimentConfig& cfg, const CliOptions& opts, std::ostream& out, std::ostream&) {
  const ThresholdAnalysis a = analyze_thresholds(cfg);
  const std::string text = dump_json(a.json);
  out << text;
  if (opts.out_dir) {
    fs::create_directories(*opts.out_dir);
    write_text(fs::path(*opts.out_dir) / "thresholds.json", text);
  }
  return a.general.condition1_holds ? kExitOk : kExitCondition1Fails;
}

int cmd_solve(const ExperimentConfig& cfg, const CliOptions& opts, std::ostream& out, std::ostream& err) {
  const std::optional<double> lambda = opts.lambda ? opts.lambda : cfg.lambda;
  if (!lambda) {
    err << "solve: no lambda given (use --lambda or problem.lambda)\n";
    return kExitConfig;
  }
  const double mu = opts.mu ? *opts.mu : cfg.mu;
  const ThresholdAnalysis a = analyze_thresholds(cfg);
  const bool in_window = a.general.contains(*lambda);
  if (!in_window && !opts.force) {
    err << "solve: lambda = " << fmt17(*lambda) << " is outside the window ]" << fmt17(a.general.gamma) << ", "
        << fmt17(a.general.delta) << "[" << (a.general.condition1_holds ? "" : " (window is empty)")
        << "; use --force to run anyway\n";
    return kExitLambdaOutsideWindow;
  }

  const SolverConfig scfg = solver_config(cfg, opts);
  const Problem problem(make_instance(cfg, cfg.mesh(), *lambda, mu));
  const std::vector<double> constants = oracle_constants(cfg, *lambda);
  const std::vector<Vector> guesses = default_guesses(problem, scfg, constants);
  std::vector<SolveAttempt> attempts;
  const SolutionSet set = find_solutions(problem, scfg, guesses, opts.verbose ? &attempts : nullptr);

  const fs::path dir = output_dir(cfg, opts);
  fs::create_directories(dir);
  Json j;
  j["schema"] = 1;
  j["command"] = "solve";
  j["lambda"] = json_number(*lambda);
  j["mu"] = json_number(mu);
  j["in_window"] = in_window;
  j["forced"] = !in_window;
  j["count"] = set.size();
  j["min_pair_distance"] = json_number(set.min_pair_distance(problem));
  Json list = Json::array();
  for (std::size_t k = 0; k < set.size(); ++k) {
    const std::string stem = "solution_" + std::to_string(k);
    save_binary(set[k].u, (dir / (stem + ".bin")).string());
    std::ofstream csv(dir / (stem + ".csv"));
    write_csv(set[k].u, csv);
    Json sj = solution_json(set[k]);
    sj["file"] = stem + ".bin";
    list.push_back(sj);
  }
  j["solutions"] = list;
  if (opts.verbose) {
    std::string trace = "attempt,guess,known,iteration,residual_norm,step_length,outcome\n";
    for (std::size_t k = 0; k < attempts.size(); ++k) {
      const auto& at = attempts[k];
      const std::string outcome = at.result.converged ? "converged" : to_string(at.result.reason);
      for (const auto& t : at.result.trace)
        trace += std::to_string(k) + "," + std::to_string(at.guess) + "," + std::to_string(at.known) + "," +
                 std::to_string(t.iteration) + "," + fmt17(t.residual_norm) + "," + fmt17(t.step_length) + "," +
                 outcome + "\n";
    }
    write_text(dir / "trace.csv", trace);
  }
  const std::string text = dump_json(j);
  write_text(dir / "summary.json", text);
  out << text;
  return kExitOk;
}

int cmd_sweep(const ExperimentConfig& cfg, const CliOptions& opts, std::ostream& out, std::ostream& err) {
  const ThresholdAnalysis a = analyze_thresholds(cfg);
  const ThresholdReport& r = a.general;
  double lo = cfg.lambda_a;
  double hi = cfg.lambda_b;
  if (cfg.lambda_auto) {
    if (!r.condition1_holds) {
      err << "sweep: the lambda window is empty (condition fails)\n";
      return kExitCondition1Fails;
    }
    if (std::isinf(r.delta)) {
      err << "sweep: the window is unbounded above (delta = inf); give an explicit lambda_interval\n";
      return kExitUnboundedWindow;
    }
    const double width = r.delta - r.gamma;
    lo = r.gamma + 0.1 * width;
    hi = r.delta - 0.1 * width;
  } else if (!(r.contains(lo) && r.contains(hi)) && !opts.force) {
    err << "sweep: [" << fmt17(lo) << ", " << fmt17(hi) << "] is not inside ]" << fmt17(r.gamma) << ", "
        << fmt17(r.delta) << "[; use --force to run anyway\n";
    return kExitLambdaOutsideWindow;
  }

  std::vector<double> lambdas;
  const int n = lo == hi ? 1 : cfg.lambda_count;
  for (int k = 0; k < n; ++k)
    lambdas.push_back(n == 1 ? hi : (k == n - 1 ? hi : lo + (hi - lo) * k / (n - 1)));

  const SolverConfig scfg = solver_config(cfg, opts);
  const Problem base(make_instance(cfg, cfg.mesh(), lambdas.front(), 0.0));

  struct PointResult {
    SolutionSet at_zero;
    ContinuationReport continuation;
  };
  std::vector<PointResult> results(lambdas.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < lambdas.size(); i = next++) {
      const Problem problem = base.with_parameters(lambdas[i], 0.0);
      const std::vector<double> constants = oracle_constants(cfg, lambdas[i]);
      const auto guesses = default_guesses(problem, scfg, constants);
      results[i].at_zero = find_solutions(problem, scfg, guesses);
      results[i].continuation = continue_in_mu(problem, results[i].at_zero, cfg.mu_schedule, scfg);
    }
  };
  const int workers = std::min<int>(cfg.workers, static_cast<int>(lambdas.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back(worker);
    for (auto& t : pool)
      t.join();
  }

  const fs::path dir = output_dir(cfg, opts);
  fs::create_directories(dir);
  std::string csv = "lambda,mu,count,max_wnorm,min_pair_distance\n";
  std::string count_dat = "# lambda count_at_mu0\n";
  std::string muhat_dat = "# lambda mu_hat\n";
  std::string wnorm_dat = "# lambda max_wnorm\n";
  bool pass = true;
  double global_max = 0.0;
  Json points = Json::array();
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double lambda = lambdas[i];
    const Problem problem = base.with_parameters(lambda, 0.0);
    const PointResult& pr = results[i];
    pass = pass && pr.at_zero.size() >= 3;
    global_max = std::max(global_max, pr.continuation.max_wnorm);
    csv += fmt17(lambda) + ",0," + std::to_string(pr.at_zero.size()) + "," + fmt17(pr.at_zero.max_wnorm()) + "," +
           fmt17(pr.at_zero.min_pair_distance(problem)) + "\n";
    Json pj;
    pj["lambda"] = json_number(lambda);
    pj["count_mu0"] = pr.at_zero.size();
    pj["mu_hat"] = json_number(pr.continuation.mu_hat);
    pj["max_wnorm"] = json_number(pr.continuation.max_wnorm);
    Json sols = Json::array();
    for (const auto& s : pr.at_zero.solutions())
      sols.push_back(solution_json(s));
    pj["solutions_mu0"] = sols;
    Json per_mu = Json::array();
    for (const auto& step : pr.continuation.steps) {
      const Problem pm = base.with_parameters(lambda, step.mu);
      const double mpd = step.solutions.min_pair_distance(pm);
      csv += fmt17(lambda) + "," + fmt17(step.mu) + "," + std::to_string(step.solutions.size()) + "," +
             fmt17(step.solutions.max_wnorm()) + "," + fmt17(mpd) + "\n";
      Json sj;
      sj["mu"] = json_number(step.mu);
      sj["count"] = step.solutions.size();
      sj["max_wnorm"] = json_number(step.solutions.max_wnorm());
      sj["min_pair_distance"] = json_number(mpd);
      per_mu.push_back(sj);
    }
    pj["per_mu"] = per_mu;
    points.push_back(pj);
    count_dat += fmt17(lambda) + " " + std::to_string(pr.at_zero.size()) + "\n";
    muhat_dat += fmt17(lambda) + " " + fmt17(pr.continuation.mu_hat) + "\n";
    wnorm_dat += fmt17(lambda) + " " + fmt17(pr.continuation.max_wnorm) + "\n";
  }

  Json j;
  j["schema"] = 1;
  j["command"] = "sweep";
  j["gamma"] = json_number(r.gamma);
  j["delta"] = json_number(r.delta);
  j["interval"] = Json::array({json_number(lo), json_number(hi)});
  j["mu_schedule"] = Json::array();
  for (double mu : cfg.mu_schedule)
    j["mu_schedule"].push_back(json_number(mu));
  j["points"] = points;
  j["max_wnorm"] = json_number(global_max);
  j["max_wnorm_note"] = "empirical proxy for the uniform norm bound; not a certified constant";
  j["verdict"] = pass ? "PASS" : "FAIL";

  write_text(dir / "sweep.csv", csv);
  write_text(dir / "count_vs_lambda.dat", count_dat);
  write_text(dir / "muhat_vs_lambda.dat", muhat_dat);
  write_text(dir / "wnorm_vs_lambda.dat", wnorm_dat);
  write_text(dir / "plot_sweep.py", R"(#!/usr/bin/env python3
"""Render the sweep data files in this directory to sweep.png."""
import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

fig, axes = plt.subplots(1, 3, figsize=(13, 3.6))
for ax, (name, label) in zip(axes, [("count_vs_lambda.dat", "solutions at mu = 0"),
                                    ("muhat_vs_lambda.dat", "empirical mu_hat"),
                                    ("wnorm_vs_lambda.dat", "max weighted norm")]):
    data = np.loadtxt(name, ndmin=2)
    ax.plot(data[:, 0], data[:, 1], "o-")
    ax.set_xlabel("lambda")
    ax.set_ylabel(label)
fig.tight_layout()
fig.savefig("sweep.png", dpi=150)
)");
  const std::string text = dump_json(j);
  write_text(dir / "sweep.json", text);
  out << text;
  out << (pass ? "PASS" : "FAIL") << "\n";
  return kExitOk;
}

int cmd_oracle(const ExperimentConfig& cfg, const CliOptions& opts, std::ostream& out, std::ostream& err) {
  const Box box = cfg.box();
  const CoefficientField alpha = cfg.alpha.build(box);
  const Nonlinearity f = cfg.f.build(box);
  if (!alpha.is_constant() || !f.is_polynomial() || !f.spatial().is_constant()) {
    err << "oracle: needs constant alpha and a polynomial f with constant coefficient field\n";
    return kExitOraclePrecondition;
  }
  const std::optional<double> lambda = opts.lambda ? opts.lambda : cfg.lambda;
  if (!lambda || !(*lambda > 0.0)) {
    err << "oracle: a positive lambda is required (use --lambda or problem.lambda)\n";
    return kExitConfig;
  }
  if (f.spatial().inf() < 0.0) {
    err << "oracle: beta must be nonnegative\n";
    return kExitOraclePrecondition;
  }
  const ConstantSolutionReport rep =
      constant_solutions(alpha.inf(), f.spatial().inf(), f.shape_polynomial(), *lambda, cfg.p);

  ExperimentConfig no_g = cfg;
  no_g.g.reset();
  const Problem problem(make_instance(no_g, cfg.mesh(), *lambda, 0.0));
  Json j;
  j["schema"] = 1;
  j["command"] = "oracle";
  j["lambda"] = json_number(*lambda);
  j["p"] = json_number(cfg.p);
  Json roots = Json::array();
  for (double s : rep.roots)
    roots.push_back(json_number(s));
  j["roots"] = roots;
  Json poly = Json::array();
  for (double c : rep.polynomial)
    poly.push_back(json_number(c));
  j["polynomial"] = poly;
  j["max_root_residual"] = json_number(rep.max_root_residual);
  Json ver = Json::array();
  const auto nv = static_cast<Eigen::Index>(problem.size());
  for (double s : rep.roots) {
    const Vector r = problem.residual(Vector::Constant(nv, s));
    Json vj;
    vj["root"] = json_number(s);
    vj["residual_sup"] = json_number(r.cwiseAbs().maxCoeff());
    ver.push_back(vj);
  }
  j["verification"] = ver;
  const std::string text = dump_json(j);
  out << text;
  if (opts.out_dir) {
    fs::create_directories(*opts.out_dir);
    write_text(fs::path(*opts.out_dir) / "oracle.json", text);
  }
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Parameter windows and multiplicity experiments for perturbed Neumann p-Laplacian problems",
               "trisolve"};
  CliOptions opts;
  double lambda = 0.0, mu = 0.0;
  std::uint64_t seed = 0;
  std::string out_dir;
  app.add_option("command", opts.command, "thresholds | solve | sweep | oracle")
      ->required()
      ->check(CLI::IsMember({"thresholds", "solve", "sweep", "oracle"}));
  app.add_option("--config", opts.config_path, "experiment configuration file")->required();
  auto* lambda_opt = app.add_option("--lambda", lambda, "lambda for solve/oracle");
  auto* mu_opt = app.add_option("--mu", mu, "perturbation weight mu for solve");
  app.add_flag("--force", opts.force, "run even when lambda lies outside the admissible window");
  auto* seed_opt = app.add_option("--seed", seed, "random seed for initial guesses");
  auto* out_opt = app.add_option("--out", out_dir, "output directory");
  app.add_flag("--verbose", opts.verbose, "write solver traces");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "trisolve: " << e.what() << "\n";
    return kExitConfig;
  }
  if (lambda_opt->count())
    opts.lambda = lambda;
  if (mu_opt->count())
    opts.mu = mu;
  if (seed_opt->count())
    opts.seed = seed;
  if (out_opt->count())
    opts.out_dir = out_dir;

  try {
    const ExperimentConfig cfg = load_experiment_config(opts.config_path);
    if (opts.command == "thresholds")
      return cmd_thresholds(cfg, opts, out, err);
    if (opts.command == "solve")
      return cmd_solve(cfg, opts, out, err);
    if (opts.command == "sweep")
      return cmd_sweep(cfg, opts, out, err);
    return cmd_oracle(cfg, opts, out, err);
  } catch (const ConfigError& e) {
    err << "trisolve: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParameterError& e) {
    err << "trisolve: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "trisolve: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericError& e) {
    err << "trisolve: numeric failure: " << e.what() << "\n";
    return kExitConfig;
  }
}

} // namespace trisolve

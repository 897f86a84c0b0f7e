// Command-line front end: reproduces the drift-vs-h curves, parameter
// sweeps, per-step traces and method comparisons, emitting CSV files that
// external plotting tools can consume.

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "modenergy/harness.hpp"

namespace {

using namespace modenergy;

struct CommonArgs {
  std::string scheme = "sv";
  std::vector<std::string> step_sizes;
  std::string horizon = "100";
  unsigned digits = kDefaultPrecisionDigits;
  std::string policy = "window:200";
  std::size_t stride = 1;
  std::string out_dir = "out";
};

OrderPolicy parse_policy(const std::string& text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos) {
    throw CLI::ValidationError("--policy", "expected fixed:M, scan:CAP or window:CAP");
  }
  const std::string kind = text.substr(0, colon);
  int value = 0;
  try {
    value = std::stoi(text.substr(colon + 1));
  } catch (const std::exception&) {
    throw CLI::ValidationError("--policy", "bad order in \"" + text + "\"");
  }
  if (kind == "fixed") return OrderPolicy::fixed(value);
  if (kind == "scan") return OrderPolicy::full_scan(value);
  if (kind == "window") return OrderPolicy::windowed(value);
  throw CLI::ValidationError("--policy", "unknown policy kind \"" + kind + "\"");
}

void add_common(CLI::App* cmd, CommonArgs& args, bool with_scheme = true) {
  cmd->set_help_flag("--help", "print this help message and exit");  // frees -h for --h
  if (with_scheme) {
    cmd->add_option("--scheme", args.scheme, "integrator: sv, yoshida4 or bm4")
        ->check(CLI::IsMember({"sv", "yoshida4", "bm4"}));
  }
  cmd->add_option("--h", args.step_sizes, "step size, decimal or ratio like 1/6 (repeatable)")
      ->required();
  cmd->add_option("--T", args.horizon, "time horizon (default 100)");
  cmd->add_option("--digits", args.digits, "working precision in decimal digits (default 120)")
      ->check(CLI::Range(16u, 100000u));
  cmd->add_option("--policy", args.policy, "order policy: fixed:M, scan:CAP or window:CAP");
  cmd->add_option("--stride", args.stride, "evaluate the shadow series every stride-th step")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", args.out_dir, "output directory for CSV files");
}

ExperimentConfig build_config(ProblemId problem, const CommonArgs& args,
                              const std::string& parameter) {
  set_working_precision(args.digits);
  ExperimentConfig config;
  config.problem = problem;
  config.parameter = parse_decimal(parameter);
  config.scheme = scheme_from_name(args.scheme);
  config.T = parse_decimal(args.horizon);
  for (const std::string& text : args.step_sizes) {
    config.step_sizes.push_back(parse_step_size(text));
    config.step_labels.push_back(text);
  }
  config.digits = args.digits;
  config.policy = parse_policy(args.policy);
  config.stride = args.stride;
  config.out_dir = args.out_dir;
  return config;
}

int report_curve(const DriftCurve& curve) {
  std::cout << "h, drift, max_m, seconds\n";
  for (const DriftRow& row : curve.rows) {
    std::cout << format_decimal(row.h, 10) << ", " << format_decimal(row.drift, 10) << ", "
              << row.max_m << ", " << row.seconds;
    if (row.below_floor) std::cout << "  [below round-off floor]";
    std::cout << '\n';
  }
  for (const DriftFault& fault : curve.faults) {
    std::cerr << "fault at h=" << format_decimal(fault.h, 10) << ": " << fault.message << '\n';
  }
  if (curve.rows.empty()) {
    std::cerr << "every step size faulted\n";
    return 2;
  }
  try {
    const RateFit fit = fit_exp_rate(curve);
    std::cout << "fit: drift ~ exp(" << format_decimal(fit.intercept, 6) << " - "
              << format_decimal(fit.c, 6) << "/h), relative residual "
              << format_decimal(fit.relative_residual, 4) << ", " << fit.points_used
              << " points\n";
  } catch (const std::invalid_argument& e) {
    std::cout << "fit skipped: " << e.what() << '\n';
  }
  return 0;
}

int run_problem(ProblemId problem, const CommonArgs& args,
                const std::vector<std::string>& parameters) {
  if (parameters.size() == 1) {
    const ExperimentConfig config = build_config(problem, args, parameters.front());
    return report_curve(run_experiment(config));
  }
  // several parameter values: drift sweep at a single fixed h
  if (args.step_sizes.size() != 1) {
    std::cerr << "parameter sweeps need exactly one --h\n";
    return 1;
  }
  const ExperimentConfig config = build_config(problem, args, parameters.front());
  std::vector<XReal> grid;
  for (const std::string& text : parameters) grid.push_back(parse_decimal(text));
  const auto rows = sweep_parameter(config, grid);
  std::cout << "parameter, drift, max_m, seconds\n";
  bool any_ok = false;
  for (const SweepRow& row : rows) {
    std::cout << format_decimal(row.parameter, 10) << ", ";
    if (row.faulted) {
      std::cout << "fault: " << row.fault;
    } else {
      std::cout << format_decimal(row.drift, 10) << ", " << row.max_m << ", " << row.seconds;
      if (row.below_floor) std::cout << "  [below round-off floor]";
      any_ok = true;
    }
    std::cout << '\n';
  }
  return any_ok ? 0 : 2;
}

int run_compare(const std::string& problem_name, const CommonArgs& args,
                const std::string& parameter, std::vector<std::string> scheme_names,
                bool equal_cost) {
  const ProblemId problem = problem_from_name(problem_name);
  const ExperimentConfig config = build_config(problem, args, parameter);
  if (scheme_names.empty()) scheme_names = {"sv", "yoshida4", "bm4"};
  std::vector<SchemeId> schemes;
  for (const std::string& name : scheme_names) schemes.push_back(scheme_from_name(name));
  const auto results = compare_methods(config, schemes, equal_cost);
  std::cout << "scheme, c, relative_residual, points\n";
  for (const MethodComparison& r : results) {
    std::cout << to_string(r.scheme) << ", ";
    if (r.fit) {
      std::cout << format_decimal(r.fit->c, 8) << ", "
                << format_decimal(r.fit->relative_residual, 4) << ", " << r.fit->points_used;
    } else {
      std::cout << "fit unavailable (too few points above the round-off floor)";
    }
    std::cout << '\n';
    for (const DriftFault& fault : r.curve.faults) {
      std::cerr << to_string(r.scheme) << " fault at h=" << format_decimal(fault.h, 10) << ": "
                << fault.message << '\n';
    }
  }
  return 0;
}

int run_trace(const std::string& problem_name, CommonArgs args, const std::string& parameter) {
  if (args.step_sizes.size() != 1) {
    std::cerr << "trace needs exactly one --h\n";
    return 1;
  }
  args.stride = 1;
  const ProblemId problem = problem_from_name(problem_name);
  const ExperimentConfig config = build_config(problem, args, parameter);
  const XReal h = config.step_sizes.front();
  const auto rows = trace_energy(config, h);
  XReal max_step(0);
  int max_m = 0;
  for (const TraceRow& row : rows) {
    if (row.step_change > max_step) max_step = row.step_change;
    max_m = std::max(max_m, row.m_star);
  }
  std::cout << rows.size() << " trace points; max step change " << format_decimal(max_step, 6)
            << ", accumulated change " << format_decimal(rows.back().accumulated, 6)
            << ", max m_star " << max_m << '\n';
  return 0;
}

// Quick structural self-checks: coefficient sums, free-particle exactness,
// beta passivity, determinism and symplecticity of one step.
bool seed_check(unsigned digits) {
  set_working_precision(digits);
  const XReal tol = pow(XReal(10), -(static_cast<int>(digits) - 10));
  bool all_ok = true;
  auto report = [&all_ok](const std::string& name, bool ok) {
    std::cout << (ok ? "ok:   " : "FAIL: ") << name << '\n';
    all_ok = all_ok && ok;
  };

  for (const SplittingScheme& scheme : {stormer_verlet(), yoshida4(), blanes_moan4()}) {
    XReal ka(0), kb(0);
    for (const XReal& a : scheme.kick) ka += a;
    for (const XReal& b : scheme.drift) kb += b;
    report(scheme.name + " coefficient sums", abs(ka - 1) < tol && abs(kb - 1) < tol);
  }

  const XReal h = XReal(1) / 8;
  {
    const auto ham = free_particle(1);
    const auto traj = integrate(ham, stormer_verlet(), free_particle_initial(1, XReal(1)), h, 16);
    bool ok = true;
    for (std::size_t n = 0; n <= 16; ++n) {
      ok = ok && traj.states[n].q[0] == traj.time(n) && traj.states[n].p[0] == 1 &&
           traj.states[n].beta == 0;
    }
    report("free particle integrates exactly", ok);
    report("free particle drift is zero",
           drift(shadow_series(traj, OrderPolicy::windowed(200))) == 0);
  }

  {
    const auto ham = pendulum();
    const auto scheme = yoshida4();
    const auto init = pendulum_initial(XReal(1));
    const auto traj = integrate(ham, scheme, init, h, 50);
    // plain loop without the auxiliary equation
    XVec p = init.p0, q = init.q0;
    bool ok = true;
    for (std::size_t n = 0; n < 50; ++n) {
      for (std::size_t s = 0; s < scheme.stages(); ++s) {
        const XVec g = ham.gradient(q);
        for (std::size_t i = 0; i < p.size(); ++i) p[i] -= h * scheme.kick[s] * g[i];
        for (std::size_t i = 0; i < q.size(); ++i)
          q[i] += h * scheme.drift[s] * ham.inverse_mass[i] * p[i];
      }
      ok = ok && p[0] == traj.states[n + 1].p[0] && q[0] == traj.states[n + 1].q[0];
    }
    report("beta never feeds back into (p, q)", ok);

    const auto again = integrate(ham, scheme, init, h, 50);
    bool identical = true;
    for (std::size_t n = 0; n <= 50; ++n) {
      identical = identical && again.states[n].p[0] == traj.states[n].p[0] &&
                  again.states[n].q[0] == traj.states[n].q[0] &&
                  again.states[n].beta == traj.states[n].beta;
    }
    report("integration is deterministic", identical);

    const XReal det = jacobian_determinant(ham, stormer_verlet(), traj.states[10], h,
                                           pow(XReal(10), -30));
    report("one step has unit Jacobian determinant", abs(det - 1) < pow(XReal(10), -20));
  }

  return all_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shadow-energy experiments for splitting integrators"};
  app.set_help_flag("--help", "print this help message and exit");
  app.require_subcommand(0, 1);

  bool want_seed_check = false;
  unsigned seed_check_digits = kDefaultPrecisionDigits;
  app.add_flag("--seed-check", want_seed_check, "run the structural invariant suite and exit");
  app.add_option("--digits", seed_check_digits, "precision for --seed-check")
      ->check(CLI::Range(16u, 100000u));

  int exit_code = 0;

  struct ProblemCmd {
    const char* name;
    const char* help;
    ProblemId id;
    const char* param_flag;
    const char* param_default;
  };
  const ProblemCmd problem_cmds[] = {
      {"pendulum", "pendulum drift experiment", ProblemId::pendulum, "--p0", "1"},
      {"kepler", "Kepler drift experiment", ProblemId::kepler, "--ecc", "0.6"},
      {"henon-heiles", "Henon-Heiles drift experiment", ProblemId::henon_heiles, "--p1", "0.1"},
      {"free", "free particle (exact) experiment", ProblemId::free_particle, "--p0", "1"},
  };

  std::vector<std::shared_ptr<CommonArgs>> arg_blocks;
  std::vector<std::shared_ptr<std::vector<std::string>>> param_blocks;

  for (const ProblemCmd& pc : problem_cmds) {
    auto args = std::make_shared<CommonArgs>();
    auto params = std::make_shared<std::vector<std::string>>();
    arg_blocks.push_back(args);
    param_blocks.push_back(params);
    CLI::App* cmd = app.add_subcommand(pc.name, pc.help);
    add_common(cmd, *args);
    cmd->add_option(pc.param_flag, *params,
                    "initial parameter (repeat for a sweep at a single h)");
    const ProblemId id = pc.id;
    const std::string fallback = pc.param_default;
    cmd->callback([&exit_code, id, args, params, fallback] {
      if (params->empty()) params->push_back(fallback);
      exit_code = run_problem(id, *args, *params);
    });
  }

  auto compare_args = std::make_shared<CommonArgs>();
  auto compare_problem = std::make_shared<std::string>("kepler");
  auto compare_param = std::make_shared<std::string>();
  auto compare_schemes = std::make_shared<std::vector<std::string>>();
  auto equal_cost = std::make_shared<bool>(false);
  {
    CLI::App* cmd = app.add_subcommand("compare", "drift and decay rate per scheme");
    add_common(cmd, *compare_args, /*with_scheme=*/false);
    cmd->add_option("--scheme", *compare_schemes, "schemes to compare (default: all three)")
        ->check(CLI::IsMember({"sv", "yoshida4", "bm4"}));
    cmd->add_option("--problem", *compare_problem, "problem to compare on")
        ->check(CLI::IsMember({"pendulum", "kepler", "henon-heiles", "free"}));
    cmd->add_option("--p0,--ecc,--p1", *compare_param, "problem parameter");
    cmd->add_flag("--equal-cost", *equal_cost,
                  "scale step sizes so every scheme does the same work");
    cmd->callback([&exit_code, compare_args, compare_problem, compare_param, compare_schemes,
                   equal_cost] {
      std::string parameter = *compare_param;
      if (parameter.empty()) {
        parameter = *compare_problem == "kepler" ? "0.6"
                    : *compare_problem == "henon-heiles" ? "0.1"
                                                         : "1";
      }
      exit_code = run_compare(*compare_problem, *compare_args, parameter, *compare_schemes,
                              *equal_cost);
    });
  }

  auto trace_args = std::make_shared<CommonArgs>();
  auto trace_problem = std::make_shared<std::string>("kepler");
  auto trace_param = std::make_shared<std::string>();
  {
    CLI::App* cmd = app.add_subcommand("trace", "per-step shadow energy at one h");
    add_common(cmd, *trace_args);
    cmd->add_option("--problem", *trace_problem, "problem to trace")
        ->check(CLI::IsMember({"pendulum", "kepler", "henon-heiles", "free"}));
    cmd->add_option("--p0,--ecc,--p1", *trace_param, "problem parameter");
    cmd->callback([&exit_code, trace_args, trace_problem, trace_param] {
      std::string parameter = *trace_param;
      if (parameter.empty()) {
        parameter = *trace_problem == "kepler" ? "0.6"
                    : *trace_problem == "henon-heiles" ? "0.1"
                                                       : "1";
      }
      exit_code = run_trace(*trace_problem, *trace_args, parameter);
    });
  }

  try {
    app.parse(argc, argv);
    if (want_seed_check) return seed_check(seed_check_digits) ? 0 : 4;
    if (app.get_subcommands().empty()) {
      std::cout << app.help();
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const modenergy::IntegrationFault& fault) {
    std::cerr << "numerical fault: " << fault.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return exit_code;
}

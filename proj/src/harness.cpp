#include "modenergy/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>

namespace modenergy {

namespace fs = std::filesystem;

namespace {

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string sanitize_label(const std::string& text) {
  std::string label;
  for (char c : text) {
    if (c == '/') {
      label += 'd';
    } else if (c == '.') {
      label += 'p';
    } else if (c == '-') {
      label += 'm';
    } else {
      label += c;
    }
  }
  return label;
}

std::ofstream open_output(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path.string());
  return out;
}

struct SeriesOutcome {
  XReal drift_value;
  int max_m = 0;
};

SeriesOutcome evaluate_series(const Trajectory& traj, const ExperimentConfig& config,
                              const std::string& label) {
  const ShadowSeries series = shadow_series(traj, config.policy, config.stride);
  SeriesOutcome outcome;
  outcome.drift_value = drift(series);
  for (const ShadowEstimate& e : series.estimates) outcome.max_m = std::max(outcome.max_m, e.m_star);
  if (!config.out_dir.empty()) {
    auto out = open_output(config.out_dir, "series_h_" + sanitize_label(label) + ".csv");
    write_series_csv(series, out);
  }
  return outcome;
}

void check_config(const ExperimentConfig& config) {
  if (config.digits != working_precision()) {
    throw std::invalid_argument("config asks for " + std::to_string(config.digits) +
                                " digits but the working precision is " +
                                std::to_string(working_precision()));
  }
  if (config.step_sizes.empty()) throw std::invalid_argument("config has no step sizes");
  if (!config.step_labels.empty() && config.step_labels.size() != config.step_sizes.size()) {
    throw std::invalid_argument("step_labels must parallel step_sizes");
  }
}

// Step sizes with labels, sorted strictly decreasing.
std::vector<std::pair<XReal, std::string>> ordered_steps(const ExperimentConfig& config) {
  std::vector<std::pair<XReal, std::string>> steps;
  for (std::size_t i = 0; i < config.step_sizes.size(); ++i) {
    const XReal& h = config.step_sizes[i];
    if (!(h > 0)) throw std::invalid_argument("step sizes must be positive");
    std::string label = i < config.step_labels.size() ? config.step_labels[i]
                                                      : format_decimal(h, 10);
    steps.emplace_back(h, std::move(label));
  }
  std::sort(steps.begin(), steps.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 1; i < steps.size(); ++i) {
    if (steps[i].first == steps[i - 1].first) {
      throw std::invalid_argument("duplicate step size " + format_decimal(steps[i].first, 10));
    }
  }
  return steps;
}

}  // namespace

ProblemId problem_from_name(const std::string& name) {
  if (name == "pendulum") return ProblemId::pendulum;
  if (name == "kepler") return ProblemId::kepler;
  if (name == "henon-heiles") return ProblemId::henon_heiles;
  if (name == "free") return ProblemId::free_particle;
  throw std::invalid_argument("unknown problem \"" + name + "\"");
}

SchemeId scheme_from_name(const std::string& name) {
  if (name == "sv") return SchemeId::sv;
  if (name == "yoshida4") return SchemeId::yoshida4;
  if (name == "bm4") return SchemeId::bm4;
  throw std::invalid_argument("unknown scheme \"" + name + "\" (expected sv, yoshida4 or bm4)");
}

std::string to_string(ProblemId id) {
  switch (id) {
    case ProblemId::pendulum:
      return "pendulum";
    case ProblemId::kepler:
      return "kepler";
    case ProblemId::henon_heiles:
      return "henon-heiles";
    case ProblemId::free_particle:
    default:
      return "free";
  }
}

std::string to_string(SchemeId id) {
  switch (id) {
    case SchemeId::sv:
      return "sv";
    case SchemeId::yoshida4:
      return "yoshida4";
    case SchemeId::bm4:
    default:
      return "bm4";
  }
}

SeparableHamiltonian make_problem(ProblemId id) {
  switch (id) {
    case ProblemId::pendulum:
      return pendulum();
    case ProblemId::kepler:
      return kepler();
    case ProblemId::henon_heiles:
      return henon_heiles();
    case ProblemId::free_particle:
    default:
      return free_particle(1);
  }
}

InitialState make_initial(ProblemId id, const XReal& parameter) {
  switch (id) {
    case ProblemId::pendulum:
      return pendulum_initial(parameter);
    case ProblemId::kepler:
      return kepler_initial(parameter);
    case ProblemId::henon_heiles:
      return henon_heiles_initial(parameter);
    case ProblemId::free_particle:
    default:
      return free_particle_initial(1, parameter);
  }
}

SplittingScheme make_scheme(SchemeId id) {
  switch (id) {
    case SchemeId::sv:
      return stormer_verlet();
    case SchemeId::yoshida4:
      return yoshida4();
    case SchemeId::bm4:
    default:
      return blanes_moan4();
  }
}

int force_evals_per_step(const SplittingScheme& scheme) {
  const int stages = static_cast<int>(scheme.stages());
  return scheme.drift.back() == 0 ? stages - 1 : stages;
}

XReal parse_step_size(const std::string& text) {
  const std::size_t slash = text.find('/');
  if (slash == std::string::npos) return parse_decimal(text);
  const XReal num = parse_decimal(text.substr(0, slash));
  const XReal den = parse_decimal(text.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("step size \"" + text + "\" divides by zero");
  return num / den;
}

std::size_t step_count(const XReal& T, const XReal& h) {
  const XReal ratio = T / h;
  const double approx = static_cast<double>(ratio);
  const auto steps = static_cast<long long>(std::llround(approx));
  if (steps < 1 || abs(ratio - XReal(steps)) > parse_decimal("1e-9")) {
    throw std::invalid_argument("T/h = " + format_decimal(ratio, 12) +
                                " is not a whole number of steps");
  }
  return static_cast<std::size_t>(steps);
}

XReal roundoff_floor() {
  const int p = static_cast<int>(working_precision());
  return pow(XReal(10), -(p - 15));
}

DriftCurve run_experiment(const ExperimentConfig& config) {
  check_config(config);
  const SeparableHamiltonian ham = make_problem(config.problem);
  const SplittingScheme scheme = make_scheme(config.scheme);
  const InitialState init = make_initial(config.problem, config.parameter);
  const XReal floor = roundoff_floor();

  DriftCurve curve;
  for (const auto& [h, label] : ordered_steps(config)) {
    const auto start = std::chrono::steady_clock::now();
    try {
      const std::size_t steps = step_count(config.T, h);
      const Trajectory traj = integrate(ham, scheme, init, h, steps);
      const SeriesOutcome outcome = evaluate_series(traj, config, label);
      DriftRow row;
      row.h = h;
      row.drift = outcome.drift_value;
      row.max_m = outcome.max_m;
      row.seconds = elapsed_seconds(start);
      row.below_floor = outcome.drift_value < floor;
      curve.rows.push_back(std::move(row));
    } catch (const std::exception& e) {
      curve.faults.push_back(DriftFault{h, e.what()});
    }
  }
  if (!config.out_dir.empty()) {
    auto out = open_output(config.out_dir, "drift_curve.csv");
    write_drift_curve_csv(curve, out);
  }
  return curve;
}

std::vector<SweepRow> sweep_parameter(const ExperimentConfig& config, const std::vector<XReal>& grid) {
  check_config(config);
  if (grid.empty()) throw std::invalid_argument("sweep_parameter: empty parameter grid");
  if (config.step_sizes.size() != 1) {
    throw std::invalid_argument("sweep_parameter: exactly one step size required");
  }
  const SeparableHamiltonian ham = make_problem(config.problem);
  const SplittingScheme scheme = make_scheme(config.scheme);
  const XReal h = config.step_sizes.front();
  const std::size_t steps = step_count(config.T, h);
  const XReal floor = roundoff_floor();

  std::vector<SweepRow> rows;
  for (const XReal& parameter : grid) {
    SweepRow row;
    row.parameter = parameter;
    const auto start = std::chrono::steady_clock::now();
    try {
      const InitialState init = make_initial(config.problem, parameter);
      const Trajectory traj = integrate(ham, scheme, init, h, steps);
      ExperimentConfig cell = config;
      cell.out_dir.clear();  // per-point series files are not written for sweeps
      const SeriesOutcome outcome = evaluate_series(traj, cell, "");
      row.drift = outcome.drift_value;
      row.max_m = outcome.max_m;
      row.below_floor = outcome.drift_value < floor;
    } catch (const std::exception& e) {
      row.faulted = true;
      row.fault = e.what();
    }
    row.seconds = elapsed_seconds(start);
    rows.push_back(std::move(row));
  }
  if (!config.out_dir.empty()) {
    auto out = open_output(config.out_dir, "sweep.csv");
    write_sweep_csv(rows, out);
  }
  return rows;
}

RateFit fit_exp_rate(const DriftCurve& curve) {
  const XReal threshold = roundoff_floor() * pow(XReal(10), XReal(3) / 2);
  std::vector<XReal> x, y;
  for (const DriftRow& row : curve.rows) {
    if (!(row.drift > threshold)) continue;  // at or below the noise band
    x.push_back(XReal(1) / row.h);
    y.push_back(log(row.drift));
  }
  if (x.size() < 3) {
    throw std::invalid_argument("fit_exp_rate: need at least 3 points above the round-off floor, have " +
                                std::to_string(x.size()));
  }
  const XReal n(static_cast<unsigned>(x.size()));
  XReal sx(0), sy(0), sxx(0), sxy(0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const XReal slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const XReal intercept = (sy - slope * sx) / n;
  XReal ssr(0), syy(0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const XReal r = y[i] - (intercept + slope * x[i]);
    ssr += r * r;
    syy += y[i] * y[i];
  }
  RateFit fit;
  fit.c = -slope;
  fit.intercept = intercept;
  fit.relative_residual = syy > 0 ? XReal(sqrt(ssr / syy)) : XReal(0);
  fit.points_used = static_cast<int>(x.size());
  return fit;
}

std::vector<TraceRow> trace_energy(const ExperimentConfig& config, const XReal& h) {
  check_config(config);
  if (config.stride != 1) throw std::invalid_argument("trace_energy: stride must be 1");
  const SeparableHamiltonian ham = make_problem(config.problem);
  const SplittingScheme scheme = make_scheme(config.scheme);
  const InitialState init = make_initial(config.problem, config.parameter);
  const std::size_t steps = step_count(config.T, h);
  const Trajectory traj = integrate(ham, scheme, init, h, steps);
  const ShadowSeries series = shadow_series(traj, config.policy, 1);

  std::vector<TraceRow> rows;
  rows.reserve(series.estimates.size());
  for (std::size_t i = 0; i < series.estimates.size(); ++i) {
    const ShadowEstimate& e = series.estimates[i];
    TraceRow row;
    row.n = e.n;
    row.t = XReal(static_cast<unsigned long>(e.n)) * h;
    row.accumulated = e.value - series.estimates.front().value;
    row.step_change = i == 0 ? XReal(0) : XReal(abs(e.value - series.estimates[i - 1].value));
    row.m_star = e.m_star;
    rows.push_back(std::move(row));
  }
  if (!config.out_dir.empty()) {
    auto out = open_output(config.out_dir, "trace.csv");
    out << "t,delta_energy,step_change,m_star\n";
    for (const TraceRow& row : rows) {
      out << format_decimal(row.t) << ',' << format_decimal(row.accumulated) << ','
          << format_decimal(row.step_change) << ',' << row.m_star << '\n';
    }
  }
  return rows;
}

std::vector<MethodComparison> compare_methods(const ExperimentConfig& config,
                                              const std::vector<SchemeId>& schemes,
                                              bool equal_cost) {
  check_config(config);
  if (schemes.size() < 2) throw std::invalid_argument("compare_methods: need at least 2 schemes");
  std::vector<MethodComparison> results;
  for (SchemeId id : schemes) {
    ExperimentConfig cell = config;
    cell.scheme = id;
    if (equal_cost) {
      const int cost = force_evals_per_step(make_scheme(id));
      for (std::size_t i = 0; i < cell.step_sizes.size(); ++i) {
        cell.step_sizes[i] *= cost;
        if (i < cell.step_labels.size()) cell.step_labels[i] += "x" + std::to_string(cost);
      }
    }
    if (!config.out_dir.empty()) {
      cell.out_dir = (fs::path(config.out_dir) / to_string(id)).string();
    }
    MethodComparison comparison;
    comparison.scheme = id;
    comparison.curve = run_experiment(cell);
    try {
      comparison.fit = fit_exp_rate(comparison.curve);
    } catch (const std::invalid_argument&) {
      comparison.fit = std::nullopt;
    }
    results.push_back(std::move(comparison));
  }
  if (!config.out_dir.empty()) {
    auto out = open_output(config.out_dir, "comparison.csv");
    out << "scheme,c,intercept,relative_residual,points\n";
    for (const MethodComparison& r : results) {
      out << to_string(r.scheme) << ',';
      if (r.fit) {
        out << format_decimal(r.fit->c) << ',' << format_decimal(r.fit->intercept) << ','
            << format_decimal(r.fit->relative_residual) << ',' << r.fit->points_used;
      } else {
        out << "nan,nan,nan,0";
      }
      out << '\n';
    }
  }
  return results;
}

void write_drift_curve_csv(const DriftCurve& curve, std::ostream& out) {
  out << "h,drift,max_m,seconds\n";
  for (const DriftRow& row : curve.rows) {
    out << format_decimal(row.h) << ',' << format_decimal(row.drift) << ',' << row.max_m << ','
        << row.seconds << '\n';
  }
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "parameter,drift,max_m,seconds\n";
  for (const SweepRow& row : rows) {
    out << format_decimal(row.parameter) << ',';
    if (row.faulted) {
      out << "fault:" << row.fault;
    } else {
      out << format_decimal(row.drift);
    }
    out << ',' << row.max_m << ',' << row.seconds << '\n';
  }
}

}  // namespace modenergy

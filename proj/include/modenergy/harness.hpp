#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "modenergy/integrator.hpp"
#include "modenergy/problems.hpp"
#include "modenergy/shadow.hpp"
#include "modenergy/xreal.hpp"

namespace modenergy {

enum class ProblemId { pendulum, kepler, henon_heiles, free_particle };
enum class SchemeId { sv, yoshida4, bm4 };

ProblemId problem_from_name(const std::string& name);
SchemeId scheme_from_name(const std::string& name);
std::string to_string(ProblemId id);
std::string to_string(SchemeId id);

SeparableHamiltonian make_problem(ProblemId id);
/// Initial state for the problem's free parameter (p0 / ecc / p1).
InitialState make_initial(ProblemId id, const XReal& parameter);
SplittingScheme make_scheme(SchemeId id);
/// Force evaluations per step once the mergeable trailing kick is shared
/// between steps (1 for Stormer-Verlet, 3 for Yoshida, 6 for Blanes-Moan).
int force_evals_per_step(const SplittingScheme& scheme);

/// One experiment cell: a problem instance, a scheme, a list of step sizes
/// sharing the time horizon, and a selection policy.
struct ExperimentConfig {
  ProblemId problem = ProblemId::pendulum;
  XReal parameter;  // p0 for pendulum/free, ecc for kepler, p1 for henon-heiles
  SchemeId scheme = SchemeId::sv;
  XReal T;
  std::vector<XReal> step_sizes;          // strictly decreasing
  std::vector<std::string> step_labels;   // parallel to step_sizes, used in filenames
  unsigned digits = kDefaultPrecisionDigits;
  OrderPolicy policy = OrderPolicy::windowed(200);
  std::size_t stride = 1;
  std::string out_dir;  // empty: no files written
};

/// Parses "0.125", "1e-2" or an exact ratio "1/6" at working precision.
XReal parse_step_size(const std::string& text);

/// T/h rounded to the nearest integer; throws unless T/h is an integer to
/// within 1e-9 (whole number of steps).
std::size_t step_count(const XReal& T, const XReal& h);

/// Smallest drift resolvable at the current working precision, 10^-(P-15);
/// reported drifts below it measure arithmetic noise.
XReal roundoff_floor();

struct DriftRow {
  XReal h;
  XReal drift;
  int max_m = 0;       // largest m_star used by the series
  double seconds = 0;  // wall time; exempt from the reproducibility guarantee
  bool below_floor = false;
};

struct DriftFault {
  XReal h;
  std::string message;
};

struct DriftCurve {
  std::vector<DriftRow> rows;
  std::vector<DriftFault> faults;
};

/// Exponential fit ln(drift) = intercept - c * (1/h). Points within a factor
/// 10^1.5 of the round-off floor are excluded; needs >= 3 usable points.
struct RateFit {
  XReal c;
  XReal intercept;
  XReal relative_residual;  // ||y - fit||_2 / ||y||_2 for y = ln(drift)
  int points_used = 0;
};

/// Integrates and evaluates the shadow series for every configured h,
/// recording drift per h. Integration faults are recorded per h and the
/// curve continues. Writes `drift_curve.csv` plus one series CSV per h when
/// out_dir is set.
DriftCurve run_experiment(const ExperimentConfig& config);

struct SweepRow {
  XReal parameter;
  XReal drift;
  int max_m = 0;
  double seconds = 0;
  bool below_floor = false;
  bool faulted = false;
  std::string fault;
};

/// One drift per parameter value at fixed h (the single configured step
/// size) and policy. Per-point faults are recorded and the sweep continues.
std::vector<SweepRow> sweep_parameter(const ExperimentConfig& config, const std::vector<XReal>& grid);

/// Least-squares fit of ln(drift) against 1/h. Throws std::invalid_argument
/// with fewer than 3 points above the exclusion threshold.
RateFit fit_exp_rate(const DriftCurve& curve);

struct TraceRow {
  std::size_t n = 0;
  XReal t;
  XReal accumulated;  // H_n - H_first over the evaluated window
  XReal step_change;  // |H_n - H_{n-1}|
  int m_star = 0;
};

/// Per-step shadow-energy trace at a single h, stride 1. Writes `trace.csv`
/// (header `t,delta_energy,step_change,m_star`) when out_dir is set.
std::vector<TraceRow> trace_energy(const ExperimentConfig& config, const XReal& h);

struct MethodComparison {
  SchemeId scheme;
  DriftCurve curve;
  std::optional<RateFit> fit;  // absent when too few usable points
};

/// Runs the config's h grid for every scheme. Requires >= 2 schemes.
/// equal_cost scales each scheme's step sizes by its force evaluations per
/// step relative to Stormer-Verlet so all schemes do the same work.
std::vector<MethodComparison> compare_methods(const ExperimentConfig& config,
                                              const std::vector<SchemeId>& schemes,
                                              bool equal_cost = false);

/// CSV, header `h,drift,max_m,seconds`.
void write_drift_curve_csv(const DriftCurve& curve, std::ostream& out);
/// CSV, header `parameter,drift,max_m,seconds`; faulted rows carry the fault
/// message in place of the drift.
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

}  // namespace modenergy

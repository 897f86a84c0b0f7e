#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "modenergy/problems.hpp"
#include "modenergy/xreal.hpp"

namespace modenergy {

/// Coefficient table of an explicit splitting method in kick-first stage
/// order: for s = 1..S, a momentum kick of size h*kick[s] followed by a
/// position drift of size h*drift[s]. A trailing zero drift coefficient is
/// allowed so kick-drift-kick compositions fit the template.
struct SplittingScheme {
  std::string name;
  std::vector<XReal> kick;   // a_s, sums to 1
  std::vector<XReal> drift;  // b_s, sums to 1
  int declared_order = 0;

  std::size_t stages() const { return kick.size(); }
};

/// Stormer-Verlet / leapfrog: S = 2, a = (1/2, 1/2), b = (1, 0), order 2.
SplittingScheme stormer_verlet();

/// Yoshida's fourth-order triple concatenation of leapfrog with weights
/// w1 = 1/(2 - 2^(1/3)), w0 = 1 - 2 w1, expressed in stage form.
SplittingScheme yoshida4();

/// Fourth-order six-force-evaluation scheme of Blanes and Moan (SRKN_6^b),
/// palindromic coefficients with the central entries closed for consistency.
SplittingScheme blanes_moan4();

/// Augmented phase-space point (p, q, beta) at step index n.
struct PhaseState {
  XVec p;
  XVec q;
  XReal beta = XReal(0);
  std::size_t n = 0;
};

/// Uniformly sampled augmented trajectory: states[k] is the state after k
/// steps of size h, at time t = k*h.
struct Trajectory {
  std::string problem;
  std::string scheme;
  XReal h;
  std::vector<PhaseState> states;

  std::size_t steps() const { return states.empty() ? 0 : states.size() - 1; }
  XReal time(std::size_t n) const { return XReal(static_cast<unsigned long>(n)) * h; }
};

/// Potential evaluation failed inside a stage; stage indices are 1-based.
class StageFault : public std::runtime_error {
 public:
  StageFault(std::size_t stage, const std::string& what)
      : std::runtime_error("stage " + std::to_string(stage) + ": " + what), stage_(stage) {}
  std::size_t stage() const { return stage_; }

 private:
  std::size_t stage_;
};

/// A stage fault while advancing step `step`; carries the trajectory computed
/// so far (states 0..step).
class IntegrationFault : public std::runtime_error {
 public:
  IntegrationFault(std::size_t step, std::size_t stage, const std::string& what, Trajectory partial)
      : std::runtime_error("step " + std::to_string(step) + ", " + what),
        step_(step),
        stage_(stage),
        partial_(std::move(partial)) {}
  std::size_t step() const { return step_; }
  std::size_t stage() const { return stage_; }
  const Trajectory& partial() const { return partial_; }

 private:
  std::size_t step_;
  std::size_t stage_;
  Trajectory partial_;
};

/// One step of the beta-augmented splitting loop. For each stage s:
///   p <- p - h a_s U_q(q)
///   beta <- beta + h a_s (q . U_q(q) - 2 U(q))
///   q <- q + h b_s M^-1 p
/// The beta and p updates use the pre-drift position; the q update uses the
/// post-kick momentum. beta never feeds back into (p, q).
PhaseState augmented_step(const SeparableHamiltonian& ham, const SplittingScheme& scheme,
                          const PhaseState& state, const XReal& h);

/// Integrates `steps` steps from the initial state. On a stage fault, throws
/// IntegrationFault carrying the partial trajectory and the failing step.
Trajectory integrate(const SeparableHamiltonian& ham, const SplittingScheme& scheme,
                     const InitialState& init, const XReal& h, std::size_t steps);

/// Empirical convergence order: least-squares slope of log(position error at
/// time T) against log h over h = (T/100) * 2^-k, k = 0..4, measured against
/// a reference computed with the same scheme at h/64. Returns nullopt when
/// the error vanishes at every h (exact integration, order indeterminate).
std::optional<XReal> observed_order(const SeparableHamiltonian& ham, const SplittingScheme& scheme,
                                    const InitialState& init, const XReal& T);

/// Determinant of the central finite-difference Jacobian of one augmented
/// step restricted to (p, q). Equals 1 up to fd truncation for symplectic
/// maps.
XReal jacobian_determinant(const SeparableHamiltonian& ham, const SplittingScheme& scheme,
                           const PhaseState& state, const XReal& h, const XReal& fd_step);

/// CSV export, header `n,t,p_1..p_d,q_1..q_d,beta`, full working precision.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

}  // namespace modenergy

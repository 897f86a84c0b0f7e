#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include "modenergy/xreal.hpp"

namespace modenergy {

/// Evaluating a potential or gradient at a point where it is singular
/// (Kepler at the origin).
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Separable Hamiltonian H = 1/2 p^T M^-1 p + U(q) with closed-form potential
/// and gradient. Evaluation is pure; instances are immutable value objects.
/// Factories create internal constants at the working precision in effect at
/// the call, so build problem objects after setting the precision.
struct SeparableHamiltonian {
  std::string name;
  int dim = 0;
  std::function<XReal(const XVec&)> potential;
  std::function<XVec(const XVec&)> gradient;
  XVec inverse_mass;  // diagonal entries, all positive
};

struct InitialState {
  XVec p0;
  XVec q0;
  XReal beta0 = XReal(0);  // the auxiliary variable always starts at zero
};

/// 1/2 sum_i M^-1_i p_i^2 + U(q). Throws std::invalid_argument on dimension
/// mismatch.
XReal energy(const SeparableHamiltonian& ham, const XVec& p, const XVec& q);

/// Planar pendulum, H = p^2/2 - cos q.
SeparableHamiltonian pendulum();
InitialState pendulum_initial(const XReal& p0);

/// Kepler problem, H = (p1^2 + p2^2)/2 - 1/sqrt(q1^2 + q2^2). Potential and
/// gradient fault at q = 0 exactly.
SeparableHamiltonian kepler();

/// Orbit on the energy level H = -1/2 with the given eccentricity in [0, 1):
/// p = (0, sqrt((1+ecc)/(1-ecc))), q = (1-ecc, 0).
InitialState kepler_initial(const XReal& ecc);

/// Henon-Heiles, U = (q1^2 + q2^2 + 2 q1^2 q2 - (2/3) q2^3)/2.
SeparableHamiltonian henon_heiles();
InitialState henon_heiles_initial(const XReal& p1);

/// U == 0 in the given dimension; splitting methods integrate this exactly.
SeparableHamiltonian free_particle(int dim);
InitialState free_particle_initial(int dim, const XReal& p0);

}  // namespace modenergy

#pragma once

#include <random>

#include "modenergy/problems.hpp"
#include "modenergy/xreal.hpp"

namespace modenergy::test {

// Deterministic uniform doubles; raw-bit mapping keeps the stream identical
// across standard libraries.
struct Rng {
  std::mt19937_64 gen{0x5eed2026ULL};

  double uniform(double lo, double hi) {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

  int uniform_int(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(gen() % static_cast<unsigned long long>(hi - lo + 1));
  }
};

inline XReal pow10(int e) { return pow(XReal(10), e); }

// U = q^2/2; not in the catalog but the one problem whose shadow energy has a
// closed form, which several oracles need.
inline SeparableHamiltonian harmonic_oscillator() {
  SeparableHamiltonian ham;
  ham.name = "harmonic";
  ham.dim = 1;
  ham.potential = [](const XVec& q) { return q[0] * q[0] / 2; };
  ham.gradient = [](const XVec& q) { return XVec{q[0]}; };
  ham.inverse_mass = XVec{XReal(1)};
  return ham;
}

// Conserved value of the interpolating energy for Stormer-Verlet on the
// harmonic oscillator: the one-step map is a rotation by theta = acos(1 -
// h^2/2) in scaled coordinates, conserving (theta/sin theta)(p^2 +
// (1-h^2/4)q^2)/2.
inline XReal harmonic_shadow_energy(const XReal& h, const XReal& p, const XReal& q) {
  const XReal theta = acos(1 - h * h / 2);
  return theta / sin(theta) * (p * p + (1 - h * h / 4) * q * q) / 2;
}

}  // namespace modenergy::test

#include "modenergy/problems.hpp"

namespace modenergy {

namespace {

void check_dim(const SeparableHamiltonian& ham, const XVec& v, const char* what) {
  if (static_cast<int>(v.size()) != ham.dim) {
    throw std::invalid_argument(std::string(what) + " has length " + std::to_string(v.size()) +
                                ", problem \"" + ham.name + "\" has dimension " +
                                std::to_string(ham.dim));
  }
}

XVec ones(int dim) { return XVec(static_cast<std::size_t>(dim), XReal(1)); }

}  // namespace

XReal energy(const SeparableHamiltonian& ham, const XVec& p, const XVec& q) {
  check_dim(ham, p, "p");
  check_dim(ham, q, "q");
  XReal kinetic(0);
  for (std::size_t i = 0; i < p.size(); ++i) kinetic += ham.inverse_mass[i] * p[i] * p[i];
  return kinetic / 2 + ham.potential(q);
}

SeparableHamiltonian pendulum() {
  SeparableHamiltonian ham;
  ham.name = "pendulum";
  ham.dim = 1;
  ham.potential = [](const XVec& q) { return -cos(q[0]); };
  ham.gradient = [](const XVec& q) { return XVec{sin(q[0])}; };
  ham.inverse_mass = ones(1);
  return ham;
}

InitialState pendulum_initial(const XReal& p0) {
  return InitialState{XVec{p0}, XVec{XReal(0)}, XReal(0)};
}

SeparableHamiltonian kepler() {
  SeparableHamiltonian ham;
  ham.name = "kepler";
  ham.dim = 2;
  auto check_origin = [](const XVec& q) {
    if (q[0] == 0 && q[1] == 0) throw SingularityError("kepler potential evaluated at the origin");
  };
  ham.potential = [check_origin](const XVec& q) {
    check_origin(q);
    return XReal(-1) / sqrt(q[0] * q[0] + q[1] * q[1]);
  };
  ham.gradient = [check_origin](const XVec& q) {
    check_origin(q);
    const XReal r2 = q[0] * q[0] + q[1] * q[1];
    const XReal inv_r3 = XReal(1) / (r2 * sqrt(r2));
    return XVec{q[0] * inv_r3, q[1] * inv_r3};
  };
  ham.inverse_mass = ones(2);
  return ham;
}

InitialState kepler_initial(const XReal& ecc) {
  if (ecc < 0 || ecc >= 1) {
    throw std::domain_error("kepler eccentricity must lie in [0, 1), got " + format_decimal(ecc, 8));
  }
  const XReal one(1);
  InitialState init;
  init.p0 = XVec{XReal(0), sqrt((one + ecc) / (one - ecc))};
  init.q0 = XVec{one - ecc, XReal(0)};
  init.beta0 = XReal(0);
  return init;
}

SeparableHamiltonian henon_heiles() {
  SeparableHamiltonian ham;
  ham.name = "henon-heiles";
  ham.dim = 2;
  ham.potential = [](const XVec& q) {
    return (q[0] * q[0] + q[1] * q[1]) / 2 + q[0] * q[0] * q[1] - q[1] * q[1] * q[1] / 3;
  };
  ham.gradient = [](const XVec& q) {
    return XVec{q[0] + 2 * q[0] * q[1], q[1] + q[0] * q[0] - q[1] * q[1]};
  };
  ham.inverse_mass = ones(2);
  return ham;
}

InitialState henon_heiles_initial(const XReal& p1) {
  return InitialState{XVec{p1, XReal(0)}, XVec{XReal(0), XReal(0)}, XReal(0)};
}

SeparableHamiltonian free_particle(int dim) {
  if (dim < 1) throw std::invalid_argument("free_particle: dimension must be positive");
  SeparableHamiltonian ham;
  ham.name = "free";
  ham.dim = dim;
  ham.potential = [](const XVec&) { return XReal(0); };
  ham.gradient = [dim](const XVec&) { return XVec(static_cast<std::size_t>(dim), XReal(0)); };
  ham.inverse_mass = ones(dim);
  return ham;
}

InitialState free_particle_initial(int dim, const XReal& p0) {
  InitialState init;
  init.p0 = XVec(static_cast<std::size_t>(dim), XReal(0));
  init.p0[0] = p0;
  init.q0 = XVec(static_cast<std::size_t>(dim), XReal(0));
  init.beta0 = XReal(0);
  return init;
}

}  // namespace modenergy

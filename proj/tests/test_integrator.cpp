#include <doctest.h>

#include <sstream>
#include <stdexcept>

#include "modenergy/integrator.hpp"
#include "test_util.hpp"

using namespace modenergy;
using modenergy::test::harmonic_oscillator;
using modenergy::test::pow10;
using modenergy::test::Rng;

namespace {

// Eq.-by-eq. splitting loop without the auxiliary variable; the oracle for
// beta passivity.
std::pair<XVec, XVec> plain_steps(const SeparableHamiltonian& ham, const SplittingScheme& scheme,
                                  XVec p, XVec q, const XReal& h, std::size_t steps) {
  for (std::size_t n = 0; n < steps; ++n) {
    for (std::size_t s = 0; s < scheme.stages(); ++s) {
      const XVec g = ham.gradient(q);
      const XReal ha = h * scheme.kick[s];
      for (std::size_t i = 0; i < p.size(); ++i) p[i] -= ha * g[i];
      const XReal hb = h * scheme.drift[s];
      if (hb != 0) {
        for (std::size_t i = 0; i < q.size(); ++i) q[i] += hb * ham.inverse_mass[i] * p[i];
      }
    }
  }
  return {p, q};
}

PhaseState state_of(XVec p, XVec q) {
  PhaseState s;
  s.p = std::move(p);
  s.q = std::move(q);
  s.beta = XReal(0);
  return s;
}

}  // namespace

TEST_CASE("scheme coefficient tables are consistent") {
  set_working_precision(120);
  const XReal tol = pow10(-110);
  struct Expect {
    SplittingScheme scheme;
    std::size_t stages;
    int order;
  };
  for (const auto& [scheme, stages, order] : {Expect{stormer_verlet(), 2, 2},
                                              Expect{yoshida4(), 4, 4},
                                              Expect{blanes_moan4(), 7, 4}}) {
    CHECK(scheme.stages() == stages);
    CHECK(scheme.drift.size() == stages);
    CHECK(scheme.declared_order == order);
    XReal ka(0), kb(0);
    for (const auto& a : scheme.kick) ka += a;
    for (const auto& b : scheme.drift) kb += b;
    CHECK(abs(ka - 1) < tol);
    CHECK(abs(kb - 1) < tol);
  }
  // Yoshida's defining relation w1 + w0 + w1 = 1
  const auto y = yoshida4();
  CHECK(abs(y.drift[0] + y.drift[1] + y.drift[2] - 1) < tol);
}

TEST_CASE("one Stormer-Verlet step on the harmonic oscillator") {
  set_working_precision(120);
  const auto ham = harmonic_oscillator();
  const XReal h = parse_decimal("0.1");
  const PhaseState next =
      augmented_step(ham, stormer_verlet(), state_of(XVec{XReal(1)}, XVec{XReal(0)}), h);
  CHECK(abs(next.p[0] - parse_decimal("0.995")) < pow10(-115));
  CHECK(next.q[0] == h);  // q = 0 + h * 1 exactly
  // kicks of a degree-2 homogeneous potential leave beta unchanged:
  // q.U_q - 2U == 0 identically
  CHECK(next.beta == 0);
  CHECK(next.n == 1);
}

TEST_CASE("one pendulum step matches the hand-evaluated stage formulas") {
  set_working_precision(120);
  const auto ham = pendulum();
  const XReal h = parse_decimal("0.1");
  const PhaseState next =
      augmented_step(ham, stormer_verlet(), state_of(XVec{XReal(1)}, XVec{XReal(0)}), h);
  // stage 1 at q=0: kick is zero, beta gains h/2 * (0 - 2(-cos 0)) = h
  // drift: q1 = h; stage 2 at q1: beta gains h/2 * (q1 sin q1 + 2 cos q1)
  const XReal q1 = h;
  const XReal expected_p = 1 - h / 2 * sin(q1);
  const XReal expected_beta = h + h / 2 * (q1 * sin(q1) + 2 * cos(q1));
  CHECK(abs(next.p[0] - expected_p) < pow10(-117));
  CHECK(next.q[0] == q1);
  CHECK(abs(next.beta - expected_beta) < pow10(-117));
}

TEST_CASE("free particle integrates exactly") {
  set_working_precision(120);
  const auto ham = free_particle(1);
  const XReal h = XReal(1) / 2;
  const auto traj = integrate(ham, stormer_verlet(), free_particle_initial(1, XReal(1)), h, 4);
  REQUIRE(traj.states.size() == 5);
  for (std::size_t n = 0; n <= 4; ++n) {
    CHECK(traj.states[n].p[0] == 1);
    CHECK(traj.states[n].q[0] == XReal(n) / 2);
    CHECK(traj.states[n].beta == 0);
    CHECK(traj.time(n) == XReal(n) / 2);
  }
}

TEST_CASE("pendulum raw energy stays bounded over a long run") {
  set_working_precision(120);
  const auto ham = pendulum();
  const auto traj =
      integrate(ham, stormer_verlet(), pendulum_initial(XReal(1)), parse_decimal("0.1"), 1000);
  const XReal h0 = energy(ham, traj.states[0].p, traj.states[0].q);
  XReal worst(0);
  for (const auto& s : traj.states) {
    const XReal dev = abs(energy(ham, s.p, s.q) - h0);
    if (dev > worst) worst = dev;
  }
  CHECK(worst < parse_decimal("0.01"));
}

TEST_CASE("a stage fault aborts with the partial trajectory and indices") {
  set_working_precision(120);
  // radial infall aimed to land exactly on the origin after the first drift:
  // q1 = 1 + (1/2)(p0 - 1/4) = 0 at p0 = -7/4, so stage 2 of step 0 faults.
  const auto ham = kepler();
  InitialState init;
  init.p0 = XVec{parse_decimal("-1.75"), XReal(0)};
  init.q0 = XVec{XReal(1), XReal(0)};
  const XReal h = XReal(1) / 2;
  try {
    integrate(ham, stormer_verlet(), init, h, 10);
    FAIL("expected IntegrationFault");
  } catch (const IntegrationFault& fault) {
    CHECK(fault.step() == 0);
    CHECK(fault.stage() == 2);
    CHECK(fault.partial().states.size() == 1);
    CHECK(fault.partial().states[0].q[0] == 1);
  }
}

TEST_CASE("high-eccentricity instability blows up the raw energy without faulting") {
  set_working_precision(120);
  // No step of the unregularized problem lands on the origin exactly, so a
  // coarse step on a near-parabolic orbit destabilizes instead of aborting.
  const auto ham = kepler();
  const auto traj =
      integrate(ham, stormer_verlet(), kepler_initial(parse_decimal("0.99")), XReal(1) / 2, 200);
  const XReal h0 = energy(ham, traj.states[0].p, traj.states[0].q);
  XReal worst(0);
  for (const auto& s : traj.states) {
    const XReal dev = abs(energy(ham, s.p, s.q) - h0);
    if (dev > worst) worst = dev;
  }
  CHECK(worst > parse_decimal("0.1"));
}

TEST_CASE("observed order matches the declared order") {
  set_working_precision(120);
  const auto ham = pendulum();
  const auto init = pendulum_initial(XReal(1));
  const XReal T(10);
  const auto sv = observed_order(ham, stormer_verlet(), init, T);
  REQUIRE(sv.has_value());
  CHECK(abs(*sv - 2) < parse_decimal("0.1"));
  const auto y4 = observed_order(ham, yoshida4(), init, T);
  REQUIRE(y4.has_value());
  CHECK(abs(*y4 - 4) < parse_decimal("0.2"));
  const auto bm = observed_order(ham, blanes_moan4(), init, T);
  REQUIRE(bm.has_value());
  CHECK(abs(*bm - 4) < parse_decimal("0.2"));
}

TEST_CASE("observed order is indeterminate for the free particle") {
  set_working_precision(120);
  const auto order =
      observed_order(free_particle(1), stormer_verlet(), free_particle_initial(1, XReal(1)), XReal(10));
  CHECK(!order.has_value());
}

TEST_CASE("blanes_moan4 beats yoshida4 on a circular orbit at equal h") {
  set_working_precision(120);
  const auto ham = kepler();
  const auto init = kepler_initial(XReal(0));
  const XReal h = parse_decimal("0.1");
  const auto reference = integrate(ham, blanes_moan4(), init, h / 64, 100 * 64);
  auto error_of = [&](const SplittingScheme& scheme) {
    const auto traj = integrate(ham, scheme, init, h, 100);
    XReal err(0);
    for (int i = 0; i < 2; ++i) {
      const XReal e = abs(traj.states.back().q[i] - reference.states.back().q[i]);
      if (e > err) err = e;
    }
    return err;
  };
  CHECK(error_of(yoshida4()) > 10 * error_of(blanes_moan4()));
}

TEST_CASE("single steps converge to the exact flow at order+1") {
  set_working_precision(120);
  struct Case {
    SeparableHamiltonian ham;
    InitialState init;
  };
  const Case cases[] = {
      {pendulum(), pendulum_initial(XReal(1))},
      {kepler(), kepler_initial(parse_decimal("0.3"))},
      {henon_heiles(), henon_heiles_initial(parse_decimal("0.5"))},
  };
  for (const auto& [ham, init] : cases) {
    for (const auto& scheme : {stormer_verlet(), yoshida4(), blanes_moan4()}) {
      auto one_step_error = [&](const XReal& h) {
        const auto traj = integrate(ham, scheme, init, h, 1);
        const auto exact = integrate(ham, yoshida4(), init, h / 512, 512);
        XReal err(0);
        for (int i = 0; i < ham.dim; ++i) {
          const XReal ep = abs(traj.states.back().p[i] - exact.states.back().p[i]);
          const XReal eq = abs(traj.states.back().q[i] - exact.states.back().q[i]);
          if (ep > err) err = ep;
          if (eq > err) err = eq;
        }
        return err;
      };
      const XReal h = XReal(1) / 32;
      const XReal ratio = one_step_error(h) / one_step_error(h / 2);
      const XReal expected = pow(XReal(2), scheme.declared_order + 1);
      CHECK(abs(ratio - expected) < parse_decimal("0.15") * expected);
    }
  }
}

TEST_CASE("beta never feeds back and integration is deterministic") {
  set_working_precision(120);
  struct Case {
    SeparableHamiltonian ham;
    InitialState init;
  };
  const Case cases[] = {
      {pendulum(), pendulum_initial(XReal(1))},
      {kepler(), kepler_initial(parse_decimal("0.3"))},
  };
  const XReal h = XReal(1) / 8;
  for (const auto& [ham, init] : cases) {
    for (const auto& scheme : {stormer_verlet(), yoshida4()}) {
      const auto traj = integrate(ham, scheme, init, h, 100);
      const auto [p, q] = plain_steps(ham, scheme, init.p0, init.q0, h, 100);
      for (int i = 0; i < ham.dim; ++i) {
        CHECK(traj.states.back().p[i] == p[i]);  // bit-identical
        CHECK(traj.states.back().q[i] == q[i]);
      }
      const auto again = integrate(ham, scheme, init, h, 100);
      for (std::size_t n = 0; n <= 100; ++n) {
        CHECK(again.states[n].p == traj.states[n].p);
        CHECK(again.states[n].q == traj.states[n].q);
        CHECK(again.states[n].beta == traj.states[n].beta);
      }
    }
  }
}

TEST_CASE("one step has unit Jacobian determinant") {
  set_working_precision(120);
  const XReal fd = pow10(-30);
  const XReal h = parse_decimal("0.1");

  const auto pend = pendulum();
  const auto traj = integrate(pend, stormer_verlet(), pendulum_initial(XReal(1)), h, 20);
  CHECK(abs(jacobian_determinant(pend, stormer_verlet(), traj.states[10], h, fd) - 1) <
        pow10(-25));

  const auto free1 = free_particle(1);
  CHECK(abs(jacobian_determinant(free1, stormer_verlet(), state_of(XVec{XReal(1)}, XVec{XReal(0)}),
                                 h, fd) -
            1) < pow10(-110));

  const auto kep = kepler();
  const auto ktraj = integrate(kep, yoshida4(), kepler_initial(parse_decimal("0.6")), h, 10);
  CHECK(abs(jacobian_determinant(kep, yoshida4(), ktraj.states[5], h, fd) - 1) < pow10(-20));
}

TEST_CASE("re-integrating any stored state reproduces its successor bit-exactly") {
  set_working_precision(120);
  const auto ham = henon_heiles();
  const auto scheme = blanes_moan4();
  const XReal h = XReal(1) / 8;
  const auto traj = integrate(ham, scheme, henon_heiles_initial(parse_decimal("0.3")), h, 40);
  Rng rng;
  for (int trial = 0; trial < 5; ++trial) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(0, 39));
    const PhaseState redo = augmented_step(ham, scheme, traj.states[n], h);
    CHECK(redo.p == traj.states[n + 1].p);
    CHECK(redo.q == traj.states[n + 1].q);
    CHECK(redo.beta == traj.states[n + 1].beta);
  }
}

TEST_CASE("trajectory CSV export") {
  set_working_precision(120);
  const auto ham = free_particle(1);
  const auto traj = integrate(ham, stormer_verlet(), free_particle_initial(1, XReal(1)),
                              XReal(1) / 2, 2);
  std::ostringstream out;
  write_trajectory_csv(traj, out);
  CHECK(out.str() ==
        "n,t,p_1,q_1,beta\n"
        "0,0,1,0,0\n"
        "1,0.5,1,0.5,0\n"
        "2,1,1,1,0\n");

  // header carries one column per coordinate
  const auto kep = kepler();
  const auto ktraj =
      integrate(kep, stormer_verlet(), kepler_initial(parse_decimal("0.3")), XReal(1) / 4, 2);
  std::ostringstream kout;
  write_trajectory_csv(ktraj, kout);
  CHECK(kout.str().substr(0, kout.str().find('\n')) == "n,t,p_1,p_2,q_1,q_2,beta");
}

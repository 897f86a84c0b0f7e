#include "modenergy/integrator.hpp"

#include <ostream>
#include <utility>

namespace modenergy {

namespace {

bool finite(const XReal& x) { return mpfr_number_p(x.backend().data()) != 0; }

void check_state(const SeparableHamiltonian& ham, const PhaseState& state) {
  if (static_cast<int>(state.p.size()) != ham.dim || static_cast<int>(state.q.size()) != ham.dim) {
    throw std::invalid_argument("state dimension does not match problem \"" + ham.name + "\"");
  }
}

// Least-squares slope of y against x.
XReal fit_slope(const std::vector<XReal>& x, const std::vector<XReal>& y) {
  const XReal n(static_cast<unsigned>(x.size()));
  XReal sx(0), sy(0), sxx(0), sxy(0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

SplittingScheme stormer_verlet() {
  const XReal half = XReal(1) / 2;
  SplittingScheme s;
  s.name = "sv";
  s.kick = {half, half};
  s.drift = {XReal(1), XReal(0)};
  s.declared_order = 2;
  return s;
}

SplittingScheme yoshida4() {
  // Yoshida (1990): leapfrog substeps w1, w0, w1 with w1 = 1/(2 - 2^(1/3)),
  // merged into kick-first stage form.
  const XReal w1 = XReal(1) / (XReal(2) - nth_root(XReal(2), 3));
  const XReal w0 = 1 - 2 * w1;
  SplittingScheme s;
  s.name = "yoshida4";
  s.kick = {w1 / 2, (w1 + w0) / 2, (w0 + w1) / 2, w1 / 2};
  s.drift = {w1, w0, w1, XReal(0)};
  s.declared_order = 4;
  return s;
}

SplittingScheme blanes_moan4() {
  // Blanes & Moan (2002), J. Comput. Appl. Math. 142, Table 3, SRKN_6^b.
  // The central coefficients are closed from the consistency conditions so
  // the stage sums are exact at working precision.
  const XReal b1 = parse_decimal("0.0829844064174052");
  const XReal b2 = parse_decimal("0.396309801498368");
  const XReal b3 = parse_decimal("-0.0390563049223486");
  const XReal a1 = parse_decimal("0.245298957184271");
  const XReal a2 = parse_decimal("0.604872665711080");
  const XReal b4 = 1 - 2 * (b1 + b2 + b3);
  const XReal a3 = XReal(1) / 2 - a1 - a2;
  SplittingScheme s;
  s.name = "bm4";
  s.kick = {b1, b2, b3, b4, b3, b2, b1};
  s.drift = {a1, a2, a3, a3, a2, a1, XReal(0)};
  s.declared_order = 4;
  return s;
}

PhaseState augmented_step(const SeparableHamiltonian& ham, const SplittingScheme& scheme,
                          const PhaseState& state, const XReal& h) {
  check_state(ham, state);
  PhaseState next = state;
  const std::size_t d = next.p.size();
  for (std::size_t s = 0; s < scheme.stages(); ++s) {
    XVec grad;
    XReal u;
    try {
      grad = ham.gradient(next.q);
      u = ham.potential(next.q);
    } catch (const std::exception& e) {
      throw StageFault(s + 1, e.what());
    }
    XReal q_dot_grad(0);
    for (std::size_t i = 0; i < d; ++i) q_dot_grad += next.q[i] * grad[i];
    const XReal ha = h * scheme.kick[s];
    for (std::size_t i = 0; i < d; ++i) next.p[i] -= ha * grad[i];
    next.beta += ha * (q_dot_grad - 2 * u);
    const XReal hb = h * scheme.drift[s];
    if (hb != 0) {
      for (std::size_t i = 0; i < d; ++i) next.q[i] += hb * ham.inverse_mass[i] * next.p[i];
    }
    for (std::size_t i = 0; i < d; ++i) {
      if (!finite(next.p[i]) || !finite(next.q[i])) {
        throw StageFault(s + 1, "non-finite state produced");
      }
    }
    if (!finite(next.beta)) throw StageFault(s + 1, "non-finite state produced");
  }
  next.n = state.n + 1;
  return next;
}

Trajectory integrate(const SeparableHamiltonian& ham, const SplittingScheme& scheme,
                     const InitialState& init, const XReal& h, std::size_t steps) {
  if (steps < 1) throw std::invalid_argument("integrate: need at least one step");
  Trajectory traj;
  traj.problem = ham.name;
  traj.scheme = scheme.name;
  traj.h = h;
  traj.states.reserve(steps + 1);
  traj.states.push_back(PhaseState{init.p0, init.q0, init.beta0, 0});
  check_state(ham, traj.states.front());
  for (std::size_t n = 0; n < steps; ++n) {
    try {
      traj.states.push_back(augmented_step(ham, scheme, traj.states.back(), h));
    } catch (const StageFault& fault) {
      const std::size_t stage = fault.stage();
      const std::string what = fault.what();
      throw IntegrationFault(n, stage, what, std::move(traj));
    }
  }
  return traj;
}

std::optional<XReal> observed_order(const SeparableHamiltonian& ham, const SplittingScheme& scheme,
                                    const InitialState& init, const XReal& T) {
  std::vector<XReal> log_h, log_err;
  for (int k = 0; k <= 4; ++k) {
    const unsigned long scale = 100UL << k;
    const XReal h = T / XReal(static_cast<unsigned long>(scale));
    const std::size_t steps = scale;
    const Trajectory traj = integrate(ham, scheme, init, h, steps);
    const Trajectory ref = integrate(ham, scheme, init, h / 64, steps * 64);
    XReal err(0);
    for (int i = 0; i < ham.dim; ++i) {
      const XReal e = abs(traj.states.back().q[i] - ref.states.back().q[i]);
      if (e > err) err = e;
    }
    if (err == 0) continue;
    log_h.push_back(log(h));
    log_err.push_back(log(err));
  }
  if (log_h.size() < 2) return std::nullopt;  // order indeterminate
  return fit_slope(log_h, log_err);
}

XReal jacobian_determinant(const SeparableHamiltonian& ham, const SplittingScheme& scheme,
                           const PhaseState& state, const XReal& h, const XReal& fd_step) {
  check_state(ham, state);
  const int d = ham.dim;
  const int m = 2 * d;
  auto advance = [&](const XVec& x) {
    PhaseState s = state;
    for (int i = 0; i < d; ++i) {
      s.p[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
      s.q[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(d + i)];
    }
    const PhaseState out = augmented_step(ham, scheme, s, h);
    XVec y(static_cast<std::size_t>(m));
    for (int i = 0; i < d; ++i) {
      y[static_cast<std::size_t>(i)] = out.p[static_cast<std::size_t>(i)];
      y[static_cast<std::size_t>(d + i)] = out.q[static_cast<std::size_t>(i)];
    }
    return y;
  };

  XVec x0(static_cast<std::size_t>(m));
  for (int i = 0; i < d; ++i) {
    x0[static_cast<std::size_t>(i)] = state.p[static_cast<std::size_t>(i)];
    x0[static_cast<std::size_t>(d + i)] = state.q[static_cast<std::size_t>(i)];
  }

  // Central-difference Jacobian, column k.
  std::vector<XVec> jac(static_cast<std::size_t>(m), XVec(static_cast<std::size_t>(m)));
  for (int k = 0; k < m; ++k) {
    XVec xp = x0, xm = x0;
    xp[static_cast<std::size_t>(k)] += fd_step;
    xm[static_cast<std::size_t>(k)] -= fd_step;
    const XVec yp = advance(xp);
    const XVec ym = advance(xm);
    for (int i = 0; i < m; ++i) {
      jac[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
          (yp[static_cast<std::size_t>(i)] - ym[static_cast<std::size_t>(i)]) / (2 * fd_step);
    }
  }

  // LU with partial pivoting.
  XReal det(1);
  for (int col = 0; col < m; ++col) {
    int pivot = col;
    for (int r = col + 1; r < m; ++r) {
      if (abs(jac[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) >
          abs(jac[static_cast<std::size_t>(pivot)][static_cast<std::size_t>(col)])) {
        pivot = r;
      }
    }
    if (pivot != col) {
      std::swap(jac[static_cast<std::size_t>(pivot)], jac[static_cast<std::size_t>(col)]);
      det = -det;
    }
    const XReal& diag = jac[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
    if (diag == 0) return XReal(0);
    det *= diag;
    for (int r = col + 1; r < m; ++r) {
      const XReal factor = jac[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] / diag;
      for (int c = col; c < m; ++c) {
        jac[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -=
            factor * jac[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)];
      }
    }
  }
  return det;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  const std::size_t d = traj.states.empty() ? 0 : traj.states.front().p.size();
  out << "n,t";
  for (std::size_t i = 1; i <= d; ++i) out << ",p_" << i;
  for (std::size_t i = 1; i <= d; ++i) out << ",q_" << i;
  out << ",beta\n";
  for (std::size_t n = 0; n < traj.states.size(); ++n) {
    const PhaseState& s = traj.states[n];
    out << n << ',' << format_decimal(traj.time(n));
    for (const XReal& v : s.p) out << ',' << format_decimal(v);
    for (const XReal& v : s.q) out << ',' << format_decimal(v);
    out << ',' << format_decimal(s.beta) << '\n';
  }
}

}  // namespace modenergy

#include "modenergy/shadow.hpp"

#include <algorithm>
#include <ostream>

namespace modenergy {

namespace {

// Stopping test of the windowed policy at the current deepest m: the scan
// has stopped improving when
//   max_{j=m-W-1..m-1} e_j < max_{j=m-W..m} e_j,
// i.e. when the newest estimate strictly exceeds everything in the trailing
// window. The comparison must be strict: the two windows share W entries, so
// a non-strict test fires as soon as any interior spike dominates both maxima
// and cuts the scan off long before the estimates bottom out.
// e holds e_2..e_m (e[i] = e_{i+2}); the test needs e_{m-W-1} to exist.
bool windowed_stop(const std::vector<XReal>& e, int window) {
  const std::size_t w = static_cast<std::size_t>(window);
  const std::size_t m = e.size() + 1;
  if (m < w + 3) return false;
  auto window_max = [&e](std::size_t lo, std::size_t hi) {
    XReal mx = e[lo - 2];
    for (std::size_t j = lo + 1; j <= hi; ++j) {
      if (e[j - 2] > mx) mx = e[j - 2];
    }
    return mx;
  };
  return window_max(m - w - 1, m - 1) < window_max(m - w, m);
}

std::size_t interior_bound(const Trajectory& traj, std::size_t n) {
  const std::size_t N = traj.steps();
  if (n == 0 || n >= N) {
    throw BoundaryError("index n=" + std::to_string(n) + " has no interior samples (N=" +
                        std::to_string(N) + ")");
  }
  return std::min(n, N - n);
}

}  // namespace

const XReal& RichardsonAccumulator::extend(const XReal& first_column_entry) {
  const std::size_t j = diagonal_.size() + 1;
  prev_.swap(row_);
  row_.clear();
  row_.reserve(j);
  row_.push_back(first_column_entry);
  for (std::size_t k = 1; k < j; ++k) {
    // (1 - k/j)^2 - 1 == -k(2j-k)/j^2 exactly
    XReal t = row_[k - 1] - prev_[k - 1];
    t *= static_cast<long>(j * j);
    t /= -static_cast<long>(k * (2 * j - k));
    t += row_[k - 1];
    row_.push_back(std::move(t));
  }
  first_column_.push_back(first_column_entry);
  diagonal_.push_back(row_.back());
  return diagonal_.back();
}

XReal first_column_entry(const Trajectory& traj, std::size_t n, std::size_t j) {
  const std::size_t N = traj.steps();
  if (n > N) throw BoundaryError("index n=" + std::to_string(n) + " beyond trajectory end");
  const std::size_t bound = interior_bound(traj, n);
  if (j < 1 || j > bound) {
    throw BoundaryError("half-width j=" + std::to_string(j) + " exceeds min(n, N-n)=" +
                        std::to_string(bound) + " at n=" + std::to_string(n));
  }
  const PhaseState& center = traj.states[n];
  const PhaseState& fwd = traj.states[n + j];
  const PhaseState& bwd = traj.states[n - j];
  XReal sum(0);
  for (std::size_t i = 0; i < center.p.size(); ++i) {
    sum -= center.q[i] * (fwd.p[i] - bwd.p[i]);
    sum += center.p[i] * (fwd.q[i] - bwd.q[i]);
  }
  sum -= fwd.beta - bwd.beta;
  return sum / (4 * XReal(static_cast<unsigned long>(j)) * traj.h);
}

RichardsonDiagonal richardson_diagonal(const Trajectory& traj, std::size_t n, std::size_t m_max) {
  const std::size_t bound = interior_bound(traj, n);
  if (m_max < 1 || m_max > bound) {
    throw BoundaryError("order m_max=" + std::to_string(m_max) + " exceeds min(n, N-n)=" +
                        std::to_string(bound) + " at n=" + std::to_string(n));
  }
  RichardsonAccumulator acc;
  for (std::size_t j = 1; j <= m_max; ++j) acc.extend(first_column_entry(traj, n, j));
  return RichardsonDiagonal{n, acc.diagonal(), acc.first_column()};
}

std::vector<XReal> central_diff_weights(int m, const XReal& h) {
  if (m < 1) throw std::invalid_argument("central_diff_weights: m must be positive");
  if (!(h > 0)) throw std::invalid_argument("central_diff_weights: h must be positive");
  std::vector<XReal> weights;
  weights.reserve(static_cast<std::size_t>(m));
  // c_j = (m!)^2 / ((m-j)!(m+j)!) via c_j = c_{j-1} (m-j+1)/(m+j)
  XReal c(1);
  for (int j = 1; j <= m; ++j) {
    c *= m - j + 1;
    c /= m + j;
    XReal w = c / (XReal(j) * h);
    if (j % 2 == 0) w = -w;
    weights.push_back(std::move(w));
  }
  return weights;
}

std::vector<XReal> derivative_diagonal(const std::function<XReal(const XReal&)>& y, const XReal& t0,
                                       const XReal& h, int m_max) {
  RichardsonAccumulator acc;
  for (int j = 1; j <= m_max; ++j) {
    const XReal jh = XReal(j) * h;
    acc.extend((y(t0 + jh) - y(t0 - jh)) / (2 * jh));
  }
  return acc.diagonal();
}

OrderPolicy OrderPolicy::fixed(int m) {
  if (m < 2) throw std::invalid_argument("OrderPolicy: fixed order must be >= 2");
  return OrderPolicy{Kind::fixed, m, 30};
}

OrderPolicy OrderPolicy::full_scan(int cap) {
  if (cap < 2) throw std::invalid_argument("OrderPolicy: cap must be >= 2");
  return OrderPolicy{Kind::full_scan, cap, 30};
}

OrderPolicy OrderPolicy::windowed(int cap, int window) {
  if (cap < 2) throw std::invalid_argument("OrderPolicy: cap must be >= 2");
  if (window < 1) throw std::invalid_argument("OrderPolicy: window must be >= 1");
  return OrderPolicy{Kind::windowed, cap, window};
}

std::string OrderPolicy::label() const {
  switch (kind) {
    case Kind::fixed:
      return "fixed:" + std::to_string(order);
    case Kind::full_scan:
      return "scan:" + std::to_string(order);
    case Kind::windowed:
    default:
      return "window:" + std::to_string(order);
  }
}

ShadowEstimate shadow_fixed(const Trajectory& traj, std::size_t n, int m) {
  if (m < 1) throw std::invalid_argument("shadow_fixed: m must be positive");
  const RichardsonDiagonal diag = richardson_diagonal(traj, n, static_cast<std::size_t>(m));
  ShadowEstimate est;
  est.n = n;
  est.m_star = m;
  est.value = diag.diagonal.back();
  if (m >= 2) {
    est.error_estimate = abs(diag.diagonal[static_cast<std::size_t>(m) - 1] -
                             diag.diagonal[static_cast<std::size_t>(m) - 2]);
  }
  return est;
}

ShadowEstimate select_order(const RichardsonDiagonal& diagonal, const OrderPolicy& policy) {
  const std::vector<XReal>& d = diagonal.diagonal;
  ShadowEstimate est;
  est.n = diagonal.center;

  if (policy.kind == OrderPolicy::Kind::fixed) {
    if (d.empty()) throw std::invalid_argument("select_order: empty diagonal");
    const std::size_t want = static_cast<std::size_t>(policy.order);
    const std::size_t m = std::min(want, d.size());
    est.m_star = static_cast<int>(m);
    est.value = d[m - 1];
    if (m >= 2) est.error_estimate = abs(d[m - 1] - d[m - 2]);
    est.truncated_by_boundary = d.size() < want;
    return est;
  }

  if (d.size() < 2) {
    throw std::invalid_argument("select_order: cannot estimate error with fewer than 2 entries");
  }
  const std::size_t cap = static_cast<std::size_t>(policy.order);
  const std::size_t limit = std::min(cap, d.size());
  std::vector<XReal> errest;  // errest[i] = e_{i+2}
  bool stopped = false;
  for (std::size_t m = 2; m <= limit; ++m) {
    errest.push_back(abs(d[m - 1] - d[m - 2]));
    if (policy.kind == OrderPolicy::Kind::windowed && windowed_stop(errest, policy.window)) {
      stopped = true;
      break;
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < errest.size(); ++i) {
    if (errest[i] < errest[best]) best = i;
  }
  est.m_star = static_cast<int>(best + 2);
  est.value = d[best + 1];
  est.error_estimate = errest[best];
  est.truncated_by_boundary = !stopped && limit < cap;
  return est;
}

ShadowEstimate shadow_at(const Trajectory& traj, std::size_t n, const OrderPolicy& policy) {
  const std::size_t bound = interior_bound(traj, n);

  if (policy.kind != OrderPolicy::Kind::windowed) {
    const std::size_t m_max = std::min(static_cast<std::size_t>(policy.order), bound);
    return select_order(richardson_diagonal(traj, n, m_max), policy);
  }

  // Windowed: grow the diagonal lazily and stop as soon as the trailing
  // window stops improving; the final selection re-runs the same scan.
  const std::size_t limit = std::min(static_cast<std::size_t>(policy.order), bound);
  RichardsonAccumulator acc;
  std::vector<XReal> errest;
  for (std::size_t j = 1; j <= limit; ++j) {
    acc.extend(first_column_entry(traj, n, j));
    if (j >= 2) {
      errest.push_back(abs(acc.diagonal()[j - 1] - acc.diagonal()[j - 2]));
      if (windowed_stop(errest, policy.window)) break;
    }
  }
  return select_order(RichardsonDiagonal{n, acc.diagonal(), acc.first_column()}, policy);
}

ShadowSeries shadow_series(const Trajectory& traj, const OrderPolicy& policy, std::size_t stride) {
  if (stride < 1) throw std::invalid_argument("shadow_series: stride must be positive");
  const std::size_t N = traj.steps();
  if (N < 4) {
    throw std::invalid_argument("shadow_series: trajectory too short (N=" + std::to_string(N) +
                                ", need N >= 4)");
  }
  ShadowSeries series;
  series.problem = traj.problem;
  series.scheme = traj.scheme;
  series.h = traj.h;
  series.stride = stride;
  for (std::size_t n = 2; n + 2 <= N; n += stride) {
    series.estimates.push_back(shadow_at(traj, n, policy));
  }
  return series;
}

XReal drift(const ShadowSeries& series) {
  if (series.estimates.empty()) throw std::invalid_argument("drift: empty series");
  const bool any_full = std::any_of(series.estimates.begin(), series.estimates.end(),
                                    [](const ShadowEstimate& e) { return !e.truncated_by_boundary; });
  bool seen = false;
  XReal lo(0), hi(0);
  for (const ShadowEstimate& e : series.estimates) {
    if (any_full && e.truncated_by_boundary) continue;
    if (!seen) {
      lo = e.value;
      hi = e.value;
      seen = true;
    } else {
      if (e.value < lo) lo = e.value;
      if (e.value > hi) hi = e.value;
    }
  }
  return hi - lo;
}

void write_series_csv(const ShadowSeries& series, std::ostream& out) {
  out << "n,t,value,m_star,error_estimate,truncated\n";
  for (const ShadowEstimate& e : series.estimates) {
    const XReal t = XReal(static_cast<unsigned long>(e.n)) * series.h;
    out << e.n << ',' << format_decimal(t) << ',' << format_decimal(e.value) << ',' << e.m_star
        << ',' << (e.error_estimate ? format_decimal(*e.error_estimate) : "nan") << ','
        << (e.truncated_by_boundary ? 1 : 0) << '\n';
  }
}

}  // namespace modenergy

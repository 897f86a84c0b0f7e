#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "modenergy/integrator.hpp"
#include "modenergy/xreal.hpp"

namespace modenergy {

/// Requested extrapolation depth exceeds the samples available on one side
/// of the center index.
class BoundaryError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Incremental Richardson table, keeping only the rolling row. extend()
/// consumes the next first-column entry T_{j,1} and returns the new diagonal
/// entry T_{j,j} via
///   T_{j,k+1} = T_{j,k} + (T_{j,k} - T_{j-1,k}) / ((1 - k/j)^2 - 1)
/// with the denominator evaluated as the exact rational -k(2j-k)/j^2.
class RichardsonAccumulator {
 public:
  /// Feeds T_{j,1} for j = size()+1; returns T_{j,j}.
  const XReal& extend(const XReal& first_column_entry);

  std::size_t size() const { return diagonal_.size(); }
  const std::vector<XReal>& diagonal() const { return diagonal_; }
  const std::vector<XReal>& first_column() const { return first_column_; }

 private:
  std::vector<XReal> row_;
  std::vector<XReal> prev_;
  std::vector<XReal> diagonal_;
  std::vector<XReal> first_column_;
};

/// Diagonal of the Richardson table centered at one trajectory index.
struct RichardsonDiagonal {
  std::size_t center = 0;           // n
  std::vector<XReal> diagonal;      // T_{m,m}, m = 1..size
  std::vector<XReal> first_column;  // T_{j,1}, j = 1..size
};

/// Central difference approximation to the shadow energy derivative data at
/// index n with half-width j:
///   T_{j,1}^n = ( -q_n.(p_{n+j}-p_{n-j}) + p_n.(q_{n+j}-q_{n-j})
///                 - (beta_{n+j}-beta_{n-j}) ) / (2 * 2jh)
/// Requires 1 <= j <= min(n, N-n); BoundaryError otherwise.
XReal first_column_entry(const Trajectory& traj, std::size_t n, std::size_t j);

/// Diagonal entries T_{m,m}^n for m = 1..m_max via the recurrence.
/// Requires m_max <= min(n, N-n).
RichardsonDiagonal richardson_diagonal(const Trajectory& traj, std::size_t n, std::size_t m_max);

/// Weights of the 2m-point central-difference first derivative:
///   D_m y(0) = sum_j w_j (y(jh) - y(-jh)),
///   w_j = (-1)^(j+1) (m!)^2 / (j h (m-j)! (m+j)!).
/// Computed by the exact ratio recurrence, no explicit factorials.
std::vector<XReal> central_diff_weights(int m, const XReal& h);

/// Richardson diagonal for the derivative of a sampled scalar function at
/// t0, first column (y(t0+jh) - y(t0-jh))/(2jh). Diagonal entry m
/// approximates y'(t0) to O(h^(2m)).
std::vector<XReal> derivative_diagonal(const std::function<XReal(const XReal&)>& y, const XReal& t0,
                                       const XReal& h, int m_max);

/// Shadow-energy estimate at one trajectory index.
struct ShadowEstimate {
  std::size_t n = 0;
  XReal value;
  int m_star = 0;
  std::optional<XReal> error_estimate;  // |T_m - T_{m-1}|; absent for m = 1
  bool truncated_by_boundary = false;
};

/// Truncation-order selection policy. fixed(m) always reports T_{m,m};
/// full_scan(cap) scans m = 2..cap and takes the argmin of the successive
/// error estimate; windowed(cap) scans until the estimate stops improving
/// over a trailing window of `window`+1 entries, then takes the argmin of
/// what was computed. Ties break toward the smallest m.
struct OrderPolicy {
  enum class Kind { fixed, full_scan, windowed };

  Kind kind = Kind::windowed;
  int order = 200;  // m for fixed, m_cap otherwise; >= 2
  int window = 30;

  static OrderPolicy fixed(int m);
  static OrderPolicy full_scan(int cap = 200);
  static OrderPolicy windowed(int cap = 200, int window = 30);

  std::string label() const;
};

/// Estimate with value T_{m,m}^n and error estimate |T_m - T_{m-1}|
/// (absent for m = 1). Requires m <= min(n, N-n); BoundaryError otherwise.
ShadowEstimate shadow_fixed(const Trajectory& traj, std::size_t n, int m);

/// Applies the policy to an already-computed diagonal. Requires at least two
/// diagonal entries for the adaptive policies. truncated_by_boundary is set
/// when the policy wanted entries beyond what the diagonal provides.
ShadowEstimate select_order(const RichardsonDiagonal& diagonal, const OrderPolicy& policy);

/// Estimate at index n under the policy, clamping the explored order to
/// min(n, N-n) and growing the diagonal lazily for the windowed policy.
ShadowEstimate shadow_at(const Trajectory& traj, std::size_t n, const OrderPolicy& policy);

/// Shadow-energy estimates over the interior of a trajectory.
struct ShadowSeries {
  std::string problem;
  std::string scheme;
  XReal h;
  std::size_t stride = 1;
  std::vector<ShadowEstimate> estimates;
};

/// Estimates at n = 2, 2+stride, ..., <= N-2. Throws std::invalid_argument
/// when the trajectory has no interior index admitting m >= 2.
ShadowSeries shadow_series(const Trajectory& traj, const OrderPolicy& policy,
                           std::size_t stride = 1);

/// max - min of the estimate values. Boundary-truncated estimates are
/// excluded (they carry a lower extrapolation order than the policy asked
/// for); if every estimate is truncated, all values are used. Throws on an
/// empty series.
XReal drift(const ShadowSeries& series);

/// CSV export, header `n,t,value,m_star,error_estimate,truncated`.
void write_series_csv(const ShadowSeries& series, std::ostream& out);

}  // namespace modenergy

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "roughcadlag/paths.hpp"

namespace roughcadlag {

/// Stopping times tau_0 = 0 < tau_1 < ... at which the path has moved by at
/// least 2^-n (Euclidean) from its value at the previous stopping time.
/// Every stopping time is a sample time; the list ends at the last one that
/// exists in [0, T].
struct DyadicSchedule {
  int level = 0;
  double threshold = 1.0;
  std::vector<double> times;
  std::vector<std::size_t> indices;  ///< sample index of each stopping time
};

DyadicSchedule stopping_times(const CadlagPath& path, int level);

/// Staircase approximation X^n holding X_{tau_k} between stopping times.
///
/// Stored as its right-continuous modification: samples (tau_k, X_{tau_k}).
/// The left-continuous approximation sum_k X_{tau_k} 1_{(tau_k, tau_{k+1}]}
/// is recovered as `left_limit` of the returned path (with X^n_0 = X_0).
CadlagPath dyadic_path(const CadlagPath& path, int level);

/// sup_t |X^n_t - X_{t-}| for the left-continuous X^n, computed exactly
/// over the sample intervals. Always below 2^-n.
double approximation_error(const CadlagPath& path, int level);

/// sum_k X_{tau_k} ⊗ X_{tau_k ∧ t, tau_{k+1} ∧ t}; the last stopping time's
/// cell runs to t.
Matrix dyadic_integral(const CadlagPath& path, int level, double t);
/// dyadic_integral evaluated at every sample time (bit-identical to the
/// pointwise version).
MatrixPath dyadic_integral_path(const CadlagPath& path, int level);

/// sum_k X_{tau_k ∧ t, tau_{k+1} ∧ t} ⊗ X_{tau_k ∧ t, tau_{k+1} ∧ t}, truncated
/// exactly like dyadic_integral.
Matrix dyadic_bracket(const CadlagPath& path, int level, double t);
MatrixPath dyadic_bracket_path(const CadlagPath& path, int level);

/// Left-point sum over every sample interval, sum_i X_{t_{i-1}} ⊗ X_{t_{i-1},t_i},
/// at each sample time. For a staircase this is the exact integral of X_- dX
/// and the limit of dyadic_integral_path as n grows.
MatrixPath left_point_integral(const CadlagPath& path);
/// sum_i X_{t_{i-1},t_i} ⊗ X_{t_{i-1},t_i} at each sample time.
MatrixPath left_point_bracket(const CadlagPath& path);

/// Least-squares fit of log2(error) against level.
struct RateFit {
  std::vector<int> levels;
  std::vector<double> errors;
  std::vector<int> excluded;  ///< levels with zero error, left out of the fit
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Fits the positive entries; throws DegenerateFitError with fewer than two
/// usable distinct levels.
RateFit fit_log2_rate(std::span<const int> levels, std::span<const double> errors);

/// errors[n] = max_{t in check_times} |dyadic_integral(n, t) - reference(t)|_F
/// for n = n_min..n_max, then fit_log2_rate.
RateFit fit_rate(const CadlagPath& path, const std::function<Matrix(double)>& reference,
                 std::span<const double> check_times, int n_min, int n_max);

/// j T / k for j = 1..k (k - 1 interior points plus T).
std::vector<double> default_check_times(double horizon, std::size_t k = 10);

}  // namespace roughcadlag

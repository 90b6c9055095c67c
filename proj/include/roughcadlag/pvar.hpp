#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "roughcadlag/paths.hpp"

namespace roughcadlag {

/// Optimal value of a partition problem together with a maximizing partition.
struct VariationResult {
  double value = 0.0;    ///< raw_sup^(1/p)
  double raw_sup = 0.0;  ///< sup over partitions of sum |increment|^p
  std::vector<double> partition;
  double p = 1.0;
};

namespace detail {

/// Best partition of grid indices 0..n-1 with both ends pinned, maximizing the
/// sum of cost(i, j) over consecutive chosen indices. best[j] is the optimum
/// for partitions ending at j; ties go to the smallest predecessor.
struct PartitionDp {
  std::vector<double> best;
  std::vector<std::size_t> parent;

  std::vector<std::size_t> chain(std::size_t last) const {
    std::vector<std::size_t> out{last};
    while (out.back() != 0) out.push_back(parent[out.back()]);
    return {out.rbegin(), out.rend()};
  }
};

template <class Cost>
PartitionDp partition_dp(std::size_t n, Cost&& cost) {
  PartitionDp dp{std::vector<double>(n, 0.0), std::vector<std::size_t>(n, 0)};
  for (std::size_t j = 1; j < n; ++j) {
    double best = -1.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < j; ++i) {
      const double v = dp.best[i] + cost(i, j);
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    dp.best[j] = best;
    dp.parent[j] = arg;
  }
  return dp;
}

/// |v|^p computed from the squared norm.
inline double norm_pow(double squared_norm, double p) {
  if (p == 2.0) return squared_norm;
  if (p == 1.0) return std::sqrt(squared_norm);
  return std::pow(squared_norm, 0.5 * p);
}

}  // namespace detail

/// Exact p-variation of a staircase path over all partitions of [0, T].
/// O(n^2) dynamic program over the sample grid. Requires p >= 1.
VariationResult p_variation(const CadlagPath& path, double p);

/// sup over partitions of [s, t] of sum |X_{u,v}|^p (no outer exponent).
double raw_p_variation(const CadlagPath& path, double p, double s, double t);

/// Rough-path p/2-type variation of a two-parameter function restricted to
/// partitions drawn from `grid`: raw_sup = sup sum |W_{t_i,t_{i+1}}|^q with the
/// Frobenius norm, value = raw_sup^(1/q).
///
/// Exact when W comes from a lift whose path only jumps on `grid`; otherwise
/// it is a lower bound for the sup over all partitions of [0, T].
/// `grid` must be strictly increasing and contain 0 and T.
VariationResult two_param_variation(const TwoParamTensor& w, double q,
                                    std::span<const double> grid);

/// Largest grid accepted by the exhaustive enumerations.
inline constexpr std::size_t kBruteForceMaxGrid = 22;

/// Test oracle: enumerate every partition with endpoints in the path grid
/// (sample times, plus T when it is not a sample).
VariationResult brute_force_variation(const CadlagPath& path, double p);
/// Test oracle for two_param_variation.
VariationResult brute_force_variation(const TwoParamTensor& w, double q,
                                      std::span<const double> grid);

/// Right-hand side of the Young-type estimate for the dyadic integral,
/// max{2^-n c^(1/q), 2^(n(q-2)) c + c^(2/q)}, with the absolute constant set
/// to 1. Callers compare against a measured discrepancy divided by their own
/// calibrated constant. Requires q in (2, 3), c >= 0, n >= 0.
double young_bound(double c, int n, double q);

}  // namespace roughcadlag

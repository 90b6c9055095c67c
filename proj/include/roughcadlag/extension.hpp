#pragma once

#include <vector>

#include "roughcadlag/paths.hpp"

namespace roughcadlag {

/// Decomposition X = g ∘ phi of a staircase path: phi is the running
/// p-variation clock and g is 1/p-Hölder with constant 1 on its samples.
struct TimeChange {
  std::vector<double> phi;       ///< phi(t_i) at every sample time
  std::vector<double> g_times;   ///< distinct clock values, increasing
  std::vector<Vector> g_values;  ///< g(g_times[k])
  double p = 1.0;
  double max_holder_ratio = 0.0;  ///< max_{a<b} |g(b) - g(a)| / (b - a)^(1/p)

  /// g at a sampled clock value; throws DomainError if `a` is not a sample.
  Vector g(double a) const;
};

/// phi(t_i) = sup over partitions of [0, t_i] that end at t_i of
/// sum |X_{u,v}|^p. Non-decreasing, phi(T) is the raw p-variation, and
/// phi(t) - phi(s) dominates the raw p-variation on [s, t].
std::vector<double> variation_clock(const CadlagPath& path, double p);

/// Collapses the plateaus of phi (where X must be constant) and records the
/// worst pairwise Hölder ratio. Throws ConsistencyError if X moves on a
/// plateau.
TimeChange holder_reparam(const CadlagPath& path, double p);

}  // namespace roughcadlag

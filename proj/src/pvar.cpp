#include "roughcadlag/pvar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "roughcadlag/errors.hpp"

namespace roughcadlag {

namespace {

void require_exponent(double p, const char* who) {
  if (!(p >= 1.0) || !std::isfinite(p))
    throw DomainError(std::string(who) + ": exponent must be finite and >= 1");
}

/// Squared distance between rows i and j of a row-major n x d block.
struct RowDistance {
  const double* data;
  std::size_t d;

  double operator()(std::size_t i, std::size_t j) const {
    const double* a = data + i * d;
    const double* b = data + j * d;
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double diff = b[k] - a[k];
      acc += diff * diff;
    }
    return acc;
  }
};

void require_grid(std::span<const double> grid, double horizon, const char* who) {
  if (grid.size() < 2 || grid.front() != 0.0 || grid.back() != horizon)
    throw DomainError(std::string(who) + ": grid must contain 0 and T");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw DomainError(std::string(who) + ": grid must be strictly increasing");
}

VariationResult finish(double raw, double p, double outer, std::vector<double> partition) {
  VariationResult r;
  r.raw_sup = raw;
  r.value = std::pow(raw, 1.0 / outer);
  r.partition = std::move(partition);
  r.p = p;
  return r;
}

}  // namespace

VariationResult p_variation(const CadlagPath& path, double p) {
  require_exponent(p, "p_variation");
  const RowDistance dist{path.values().data(), path.dim()};
  const std::size_t n = path.size();
  if (n == 1) {
    std::vector<double> partition{0.0};
    if (path.horizon() > 0.0) partition.push_back(path.horizon());
    return finish(0.0, p, p, std::move(partition));
  }
  auto dp = detail::partition_dp(n, [&](std::size_t i, std::size_t j) {
    return detail::norm_pow(dist(i, j), p);
  });
  std::vector<double> partition;
  for (std::size_t i : dp.chain(n - 1)) partition.push_back(path.time(i));
  if (partition.back() < path.horizon()) partition.push_back(path.horizon());
  return finish(dp.best[n - 1], p, p, std::move(partition));
}

double raw_p_variation(const CadlagPath& path, double p, double s, double t) {
  require_exponent(p, "raw_p_variation");
  if (!(s <= t)) throw DomainError("raw_p_variation: need s <= t");
  const std::size_t first = path.index_at(s);
  const std::size_t last = path.index_at(t);
  if (last == first) return 0.0;
  const RowDistance dist{path.values().data() + first * path.dim(), path.dim()};
  auto dp = detail::partition_dp(last - first + 1, [&](std::size_t i, std::size_t j) {
    return detail::norm_pow(dist(i, j), p);
  });
  return dp.best.back();
}

VariationResult two_param_variation(const TwoParamTensor& w, double q,
                                    std::span<const double> grid) {
  require_exponent(q, "two_param_variation");
  require_grid(grid, w.horizon(), "two_param_variation");
  auto dp = detail::partition_dp(grid.size(), [&](std::size_t i, std::size_t j) {
    return detail::norm_pow(w(grid[i], grid[j]).squaredNorm(), q);
  });
  std::vector<double> partition;
  for (std::size_t i : dp.chain(grid.size() - 1)) partition.push_back(grid[i]);
  return finish(dp.best.back(), q, q, std::move(partition));
}

namespace {

/// Enumerates every subset of interior points of an n-point grid (ends pinned).
template <class Cost>
std::pair<double, std::vector<std::size_t>> enumerate_partitions(std::size_t n, Cost&& cost) {
  if (n > kBruteForceMaxGrid)
    throw SizeError("brute_force_variation: grid of " + std::to_string(n) +
                    " points exceeds the enumeration limit");
  if (n == 1) return {0.0, {0}};
  const std::size_t interior = n - 2;
  double best = -1.0;
  std::vector<std::size_t> best_points;
  std::vector<std::size_t> points;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << interior); ++mask) {
    points.clear();
    points.push_back(0);
    for (std::size_t k = 0; k < interior; ++k)
      if (mask & (std::uint64_t{1} << k)) points.push_back(k + 1);
    points.push_back(n - 1);
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < points.size(); ++k) sum += cost(points[k], points[k + 1]);
    if (sum > best) {
      best = sum;
      best_points = points;
    }
  }
  return {best, best_points};
}

}  // namespace

VariationResult brute_force_variation(const CadlagPath& path, double p) {
  require_exponent(p, "brute_force_variation");
  std::vector<double> grid(path.times().begin(), path.times().end());
  std::vector<std::size_t> index(grid.size());
  for (std::size_t i = 0; i < index.size(); ++i) index[i] = i;
  if (grid.back() < path.horizon()) {
    grid.push_back(path.horizon());
    index.push_back(path.size() - 1);
  }
  const RowDistance dist{path.values().data(), path.dim()};
  auto [raw, points] = enumerate_partitions(grid.size(), [&](std::size_t i, std::size_t j) {
    return std::pow(std::sqrt(dist(index[i], index[j])), p);
  });
  std::vector<double> partition;
  for (std::size_t i : points) partition.push_back(grid[i]);
  return finish(raw, p, p, std::move(partition));
}

VariationResult brute_force_variation(const TwoParamTensor& w, double q,
                                      std::span<const double> grid) {
  require_exponent(q, "brute_force_variation");
  require_grid(grid, w.horizon(), "brute_force_variation");
  auto [raw, points] = enumerate_partitions(grid.size(), [&](std::size_t i, std::size_t j) {
    return std::pow(w(grid[i], grid[j]).norm(), q);
  });
  std::vector<double> partition;
  for (std::size_t i : points) partition.push_back(grid[i]);
  return finish(raw, q, q, std::move(partition));
}

double young_bound(double c, int n, double q) {
  if (!(q > 2.0 && q < 3.0)) throw DomainError("young_bound: q must lie in (2, 3)");
  if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("young_bound: c must be finite and >= 0");
  if (n < 0) throw DomainError("young_bound: level must be >= 0");
  const double first = std::ldexp(1.0, -n) * std::pow(c, 1.0 / q);
  const double second = std::exp2(n * (q - 2.0)) * c + std::pow(c, 2.0 / q);
  return std::max(first, second);
}

}  // namespace roughcadlag

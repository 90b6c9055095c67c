#include "roughcadlag/extension.hpp"

#include <algorithm>
#include <cmath>

#include "roughcadlag/errors.hpp"
#include "roughcadlag/pvar.hpp"

namespace roughcadlag {

Vector TimeChange::g(double a) const {
  auto it = std::lower_bound(g_times.begin(), g_times.end(), a);
  if (it == g_times.end() || *it != a) throw DomainError("g is only known at sampled clock values");
  return g_values[static_cast<std::size_t>(it - g_times.begin())];
}

std::vector<double> variation_clock(const CadlagPath& path, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("variation_clock: p must be >= 1");
  const RowMatrix& x = path.values();
  auto dp = detail::partition_dp(path.size(), [&](std::size_t i, std::size_t j) {
    const double sq =
        (x.row(static_cast<Eigen::Index>(j)) - x.row(static_cast<Eigen::Index>(i))).squaredNorm();
    return detail::norm_pow(sq, p);
  });
  return std::move(dp.best);
}

TimeChange holder_reparam(const CadlagPath& path, double p) {
  TimeChange out;
  out.p = p;
  out.phi = variation_clock(path, p);
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (!out.g_times.empty() && out.phi[i] == out.g_times.back()) {
      if (path.value(i) != out.g_values.back())
        throw ConsistencyError("holder_reparam: path moves on a plateau of the variation clock");
      continue;
    }
    out.g_times.push_back(out.phi[i]);
    out.g_values.push_back(path.value(i));
  }
  for (std::size_t a = 0; a < out.g_times.size(); ++a)
    for (std::size_t b = a + 1; b < out.g_times.size(); ++b) {
      const double dist = (out.g_values[b] - out.g_values[a]).norm();
      const double ratio = dist / std::pow(out.g_times[b] - out.g_times[a], 1.0 / p);
      out.max_holder_ratio = std::max(out.max_holder_ratio, ratio);
    }
  return out;
}

}  // namespace roughcadlag

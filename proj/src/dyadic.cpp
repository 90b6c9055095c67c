#include "roughcadlag/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roughcadlag/errors.hpp"

namespace roughcadlag {

namespace {

double level_threshold(int level) {
  if (level < 0) throw DomainError("dyadic level must be >= 0");
  return std::ldexp(1.0, -level);
}

/// Walks the sample grid once, firing stopping times and accumulating the
/// completed-cell sums of either X_{tau_k} ⊗ ΔX (integral) or ΔX ⊗ ΔX
/// (bracket). Both the pointwise and the whole-path entry points go through
/// advance()/current(), so they agree bit for bit.
class ScheduleWalker {
 public:
  enum class Kind { kIntegral, kBracket };

  ScheduleWalker(const CadlagPath& path, int level, Kind kind)
      : data_(path.values().data()),
        d_(path.dim()),
        threshold_(level_threshold(level)),
        kind_(kind),
        acc_(d_ * d_, 0.0),
        diff_(d_, 0.0) {}

  /// Must be called for i = 0, 1, 2, ... in order. Returns true if i fires.
  bool advance(std::size_t i) {
    load_diff(i);
    double sq = 0.0;
    for (double v : diff_) sq += v * v;
    if (i == 0 || !(std::sqrt(sq) >= threshold_)) return false;
    add_outer(acc_.data());
    anchor_ = i;
    load_diff(i);
    return true;
  }

  /// Running sum at the last advanced sample, including the open cell.
  void current(double* out) const {
    std::copy(acc_.begin(), acc_.end(), out);
    add_outer(out);
  }

  std::size_t anchor() const noexcept { return anchor_; }
  /// X_i - X_anchor at the last advanced sample.
  std::span<const double> diff() const noexcept { return diff_; }

 private:
  void load_diff(std::size_t i) {
    const double* x = data_ + i * d_;
    const double* a = data_ + anchor_ * d_;
    for (std::size_t k = 0; k < d_; ++k) diff_[k] = x[k] - a[k];
  }

  void add_outer(double* out) const {
    const double* left = kind_ == Kind::kIntegral ? data_ + anchor_ * d_ : diff_.data();
    for (std::size_t r = 0; r < d_; ++r)
      for (std::size_t c = 0; c < d_; ++c) out[r * d_ + c] += left[r] * diff_[c];
  }

  const double* data_;
  std::size_t d_;
  double threshold_;
  Kind kind_;
  std::size_t anchor_ = 0;
  std::vector<double> acc_;
  std::vector<double> diff_;
};

Matrix walk_to(const CadlagPath& path, int level, double t, ScheduleWalker::Kind kind) {
  const std::size_t last = path.index_at(t);
  ScheduleWalker walker(path, level, kind);
  for (std::size_t i = 0; i <= last; ++i) walker.advance(i);
  const auto d = static_cast<Eigen::Index>(path.dim());
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out(d, d);
  walker.current(out.data());
  return out;
}

MatrixPath walk_path(const CadlagPath& path, int level, ScheduleWalker::Kind kind) {
  const std::size_t d = path.dim();
  RowMatrix flat(static_cast<Eigen::Index>(path.size()), static_cast<Eigen::Index>(d * d));
  ScheduleWalker walker(path, level, kind);
  for (std::size_t i = 0; i < path.size(); ++i) {
    walker.advance(i);
    walker.current(flat.data() + i * d * d);
  }
  std::vector<double> times(path.times().begin(), path.times().end());
  return MatrixPath(CadlagPath(std::move(times), std::move(flat), path.horizon()), d);
}

}  // namespace

DyadicSchedule stopping_times(const CadlagPath& path, int level) {
  DyadicSchedule schedule;
  schedule.level = level;
  schedule.threshold = level_threshold(level);
  ScheduleWalker walker(path, level, ScheduleWalker::Kind::kIntegral);
  schedule.times.push_back(0.0);
  schedule.indices.push_back(0);
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (walker.advance(i)) {
      schedule.times.push_back(path.time(i));
      schedule.indices.push_back(i);
    }
  }
  return schedule;
}

CadlagPath dyadic_path(const CadlagPath& path, int level) {
  const DyadicSchedule schedule = stopping_times(path, level);
  RowMatrix values(static_cast<Eigen::Index>(schedule.indices.size()),
                   static_cast<Eigen::Index>(path.dim()));
  for (std::size_t k = 0; k < schedule.indices.size(); ++k)
    values.row(static_cast<Eigen::Index>(k)) = path.row(schedule.indices[k]);
  return {schedule.times, std::move(values), path.horizon()};
}

double approximation_error(const CadlagPath& path, int level) {
  // On (t_i, t_{i+1}] the left-continuous X^n equals X at the latest stopping
  // time <= t_i while X_- equals X_{t_i}; the final interval (t_last, T] is
  // empty when the last sample sits at T.
  ScheduleWalker walker(path, level, ScheduleWalker::Kind::kIntegral);
  double worst = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    walker.advance(i);
    const bool has_interval = i + 1 < path.size() || path.time(i) < path.horizon();
    if (!has_interval) break;
    double sq = 0.0;
    for (double v : walker.diff()) sq += v * v;
    worst = std::max(worst, std::sqrt(sq));
  }
  return worst;
}

Matrix dyadic_integral(const CadlagPath& path, int level, double t) {
  return walk_to(path, level, t, ScheduleWalker::Kind::kIntegral);
}

MatrixPath dyadic_integral_path(const CadlagPath& path, int level) {
  return walk_path(path, level, ScheduleWalker::Kind::kIntegral);
}

Matrix dyadic_bracket(const CadlagPath& path, int level, double t) {
  return walk_to(path, level, t, ScheduleWalker::Kind::kBracket);
}

MatrixPath dyadic_bracket_path(const CadlagPath& path, int level) {
  return walk_path(path, level, ScheduleWalker::Kind::kBracket);
}

namespace {

MatrixPath full_grid_sum(const CadlagPath& path, bool bracket) {
  const std::size_t d = path.dim();
  const std::size_t dd = d * d;
  RowMatrix flat = RowMatrix::Zero(static_cast<Eigen::Index>(path.size()),
                                   static_cast<Eigen::Index>(dd));
  const double* x = path.values().data();
  double* out = flat.data();
  std::vector<double> diff(d);
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double* prev = x + (i - 1) * d;
    const double* cur = x + i * d;
    for (std::size_t k = 0; k < d; ++k) diff[k] = cur[k] - prev[k];
    const double* left = bracket ? diff.data() : prev;
    double* row = out + i * dd;
    std::copy(out + (i - 1) * dd, out + i * dd, row);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) row[r * d + c] += left[r] * diff[c];
  }
  std::vector<double> times(path.times().begin(), path.times().end());
  return MatrixPath(CadlagPath(std::move(times), std::move(flat), path.horizon()), d);
}

}  // namespace

MatrixPath left_point_integral(const CadlagPath& path) { return full_grid_sum(path, false); }

MatrixPath left_point_bracket(const CadlagPath& path) { return full_grid_sum(path, true); }

RateFit fit_log2_rate(std::span<const int> levels, std::span<const double> errors) {
  if (levels.size() != errors.size()) throw DomainError("fit_log2_rate: length mismatch");
  RateFit fit;
  fit.levels.assign(levels.begin(), levels.end());
  fit.errors.assign(errors.begin(), errors.end());
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(errors[i] >= 0.0) || !std::isfinite(errors[i]))
      throw DomainError("fit_log2_rate: errors must be finite and non-negative");
    if (errors[i] == 0.0) {
      fit.excluded.push_back(levels[i]);
      continue;
    }
    xs.push_back(levels[i]);
    ys.push_back(std::log2(errors[i]));
  }
  const bool distinct = xs.size() >= 2 && *std::min_element(xs.begin(), xs.end()) !=
                                              *std::max_element(xs.begin(), xs.end());
  if (!distinct)
    throw DegenerateFitError("fit_log2_rate: fewer than two usable levels (" +
                             std::to_string(fit.excluded.size()) + " saturated)");
  const double m = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += r * r;
  }
  // A flat error profile is fitted exactly by a zero slope.
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

RateFit fit_rate(const CadlagPath& path, const std::function<Matrix(double)>& reference,
                 std::span<const double> check_times, int n_min, int n_max) {
  if (!(n_min < n_max)) throw DomainError("fit_rate: need n_min < n_max");
  if (n_min < 0) throw DomainError("fit_rate: levels must be >= 0");
  if (check_times.empty()) throw DomainError("fit_rate: empty check set");
  if (std::find(check_times.begin(), check_times.end(), path.horizon()) == check_times.end())
    throw DomainError("fit_rate: check set must contain T");
  std::vector<Matrix> targets;
  targets.reserve(check_times.size());
  for (double t : check_times) targets.push_back(reference(t));

  std::vector<int> levels;
  std::vector<double> errors;
  for (int n = n_min; n <= n_max; ++n) {
    const MatrixPath integral = dyadic_integral_path(path, n);
    double worst = 0.0;
    for (std::size_t j = 0; j < check_times.size(); ++j)
      worst = std::max(worst, (integral.eval(check_times[j]) - targets[j]).norm());
    levels.push_back(n);
    errors.push_back(worst);
  }
  return fit_log2_rate(levels, errors);
}

std::vector<double> default_check_times(double horizon, std::size_t k) {
  if (k == 0) throw DomainError("default_check_times: need at least one point");
  std::vector<double> out;
  out.reserve(k);
  for (std::size_t j = 1; j < k; ++j)
    out.push_back(horizon * static_cast<double>(j) / static_cast<double>(k));
  out.push_back(horizon);
  return out;
}

}  // namespace roughcadlag

#include "roughcadlag/lift.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <utility>

#include "roughcadlag/errors.hpp"

namespace roughcadlag {

namespace {

bool same_grid(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

double sup_gap(const MatrixPath& a, const MatrixPath& b) {
  return (a.flat().values() - b.flat().values()).rowwise().norm().maxCoeff();
}

struct Stabilized {
  MatrixPath integral;
  int level;
  double gap;
  double tol;
  bool stabilized;
};

Stabilized stabilize(const CadlagPath& path, const LiftOptions& options) {
  if (options.n_min < 0) throw DomainError("lift: n_min must be >= 0");
  if (!(options.n_max > options.n_min)) throw DomainError("lift: need n_max > n_min");
  const double sup = path.sup_norm();
  const double tol = options.tol.value_or(1e-6 * (1.0 + sup * sup));
  if (!(tol > 0.0)) throw DomainError("lift: tolerance must be positive");

  MatrixPath current = dyadic_integral_path(path, options.n_min);
  double gap = 0.0;
  for (int n = options.n_min; n < options.n_max; ++n) {
    MatrixPath next = dyadic_integral_path(path, n + 1);
    gap = sup_gap(current, next);
    if (gap <= tol) return {std::move(current), n, gap, tol, true};
    current = std::move(next);
  }
  if (options.strict) {
    std::ostringstream os;
    os.precision(17);
    os << "lift did not stabilize by level " << options.n_max << ": gap " << gap << " > tol "
       << tol;
    throw ConvergenceError(os.str(), gap);
  }
  return {std::move(current), options.n_max, gap, tol, false};
}

void require_young_exponent(double q) {
  if (!(q >= 1.0 && q < 2.0)) throw DomainError("young regime needs q in [1, 2)");
}

}  // namespace

RoughLift::RoughLift(CadlagPath path, MatrixPath integral, double p, LiftMeta meta)
    : path_(std::move(path)), integral_(std::move(integral)), p_(p), meta_(std::move(meta)) {
  if (!(p_ > 2.0 && p_ < 3.0)) throw DomainError("rough lift: p must lie in (2, 3)");
  if (integral_.dim() != path_.dim()) throw DomainError("rough lift: dimension mismatch");
  if (!same_grid(path_.times(), integral_.times()) || integral_.horizon() != path_.horizon())
    throw DomainError("rough lift: integral grid differs from path grid");
}

Vector RoughLift::increment(double s, double t) const { return path_.increment(s, t); }

Matrix RoughLift::area_at(std::size_t i, std::size_t j) const {
  if (i > j || j >= path_.size()) throw DomainError("area: need i <= j < size");
  const Vector xs = path_.value(i);
  const Vector dx = path_.value(j) - xs;
  Matrix out = integral_.at(j) - integral_.at(i) - xs * dx.transpose();
  if (meta_.geometric_diagonal)
    for (Eigen::Index k = 0; k < dx.size(); ++k) out(k, k) = 0.5 * (dx(k) * dx(k));
  return out;
}

Matrix RoughLift::area(double s, double t) const {
  if (!(s <= t)) throw DomainError("area: need s <= t");
  return area_at(path_.index_at(s), path_.index_at(t));
}

TwoParamTensor RoughLift::area_tensor() const {
  auto self = std::make_shared<const RoughLift>(*this);
  return TwoParamTensor(dim(), horizon(),
                        [self](double s, double t) { return self->area(s, t); });
}

double RoughLift::scale() const {
  const double x = path_.sup_norm();
  return 1.0 + x * x + integral_.sup_norm();
}

RoughLift ito_lift(const CadlagPath& path, const LiftOptions& options) {
  Stabilized s = stabilize(path, options);
  LiftMeta meta;
  meta.method = "ito";
  meta.level = s.level;
  meta.gap = s.gap;
  meta.tol = s.tol;
  meta.stabilized = s.stabilized;
  return {path, std::move(s.integral), options.p, std::move(meta)};
}

RoughLift gaussian_lift(const CadlagPath& path, const LiftOptions& options) {
  Stabilized s = stabilize(path, options);
  const std::size_t d = path.dim();
  RowMatrix flat = s.integral.flat().values();
  for (std::size_t i = 0; i < path.size(); ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      const double x = path.values()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
      const double x0 = path.values()(0, static_cast<Eigen::Index>(k));
      flat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k * d + k)) =
          0.5 * x * x - 0.5 * x0 * x0;
    }
  }
  std::vector<double> times(path.times().begin(), path.times().end());
  MatrixPath integral(CadlagPath(std::move(times), std::move(flat), path.horizon()), d);
  LiftMeta meta;
  meta.method = "gaussian";
  meta.level = s.level;
  meta.gap = s.gap;
  meta.tol = s.tol;
  meta.stabilized = s.stabilized;
  meta.geometric_diagonal = true;
  return {path, std::move(integral), options.p, std::move(meta)};
}

MatrixPath young_integral(const CadlagPath& path, double q) {
  require_young_exponent(q);
  return left_point_integral(path);
}

RoughLift young_lift(const CadlagPath& path, double q, double p) {
  LiftMeta meta;
  meta.method = "young";
  meta.level = -1;
  return {path, young_integral(path, q), p, std::move(meta)};
}

RoughLift perturbed_lift(const CadlagPath& x, const CadlagPath& y, double q,
                         const LiftOptions& options) {
  require_young_exponent(q);
  if (x.dim() != y.dim()) throw DomainError("perturbed_lift: dimension mismatch");
  if (x.horizon() != y.horizon()) throw DomainError("perturbed_lift: horizon mismatch");
  if (!same_grid(x.times(), y.times())) throw DomainError("perturbed_lift: grid mismatch");
  std::vector<double> times(x.times().begin(), x.times().end());
  RowMatrix sum = x.values() + y.values();
  const CadlagPath z(std::move(times), std::move(sum), x.horizon());

  Stabilized s = stabilize(z, options);
  // Left-point sums are bilinear, so splitting along Z's schedule is exact.
  const DyadicSchedule schedule = stopping_times(z, s.level);
  const auto d = static_cast<Eigen::Index>(x.dim());
  CrossTerms cross{Matrix::Zero(d, d), Matrix::Zero(d, d), Matrix::Zero(d, d),
                   Matrix::Zero(d, d)};
  const std::size_t end = z.size() - 1;
  for (std::size_t k = 0; k < schedule.indices.size(); ++k) {
    const std::size_t a = schedule.indices[k];
    const std::size_t b = k + 1 < schedule.indices.size() ? schedule.indices[k + 1] : end;
    const Vector xa = x.value(a);
    const Vector ya = y.value(a);
    const Vector dx = x.value(b) - xa;
    const Vector dy = y.value(b) - ya;
    cross.xx += xa * dx.transpose();
    cross.xy += xa * dy.transpose();
    cross.yx += ya * dx.transpose();
    cross.yy += ya * dy.transpose();
  }

  LiftMeta meta;
  meta.method = "perturbed";
  meta.level = s.level;
  meta.gap = s.gap;
  meta.tol = s.tol;
  meta.stabilized = s.stabilized;
  meta.cross_terms = std::move(cross);
  return {z, std::move(s.integral), options.p, std::move(meta)};
}

VariationResult area_variation(const RoughLift& lift) {
  const CadlagPath& x = lift.path();
  const std::size_t d = x.dim();
  const std::size_t dd = d * d;
  const double* xs = x.values().data();
  const double* is = lift.integral().flat().values().data();
  const bool geometric = lift.meta().geometric_diagonal;
  const double q = lift.p() / 2.0;
  auto dp = detail::partition_dp(x.size(), [&](std::size_t i, std::size_t j) {
    const double* xi = xs + i * d;
    const double* xj = xs + j * d;
    const double* ii = is + i * dd;
    const double* ij = is + j * dd;
    double sq = 0.0;
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < d; ++c) {
        const double dc = xj[c] - xi[c];
        const double v = geometric && r == c ? 0.5 * (dc * dc)
                                             : ij[r * d + c] - ii[r * d + c] - xi[r] * dc;
        sq += v * v;
      }
    }
    return detail::norm_pow(sq, q);
  });
  VariationResult out;
  out.p = q;
  out.raw_sup = dp.best.back();
  out.value = std::pow(out.raw_sup, 1.0 / q);
  for (std::size_t i : dp.chain(x.size() - 1)) out.partition.push_back(x.time(i));
  if (out.partition.back() < x.horizon()) out.partition.push_back(x.horizon());
  return out;
}

double chen_defect(const CadlagPath& path, const TwoParamTensor& area, double s, double u,
                   double t) {
  if (!(s <= u && u <= t)) throw DomainError("chen_defect: need s <= u <= t");
  const Matrix residual =
      area(s, t) - area(s, u) - area(u, t) - tensor(path.increment(s, u), path.increment(u, t));
  return residual.norm();
}

double chen_defect(const RoughLift& lift, double s, double u, double t) {
  if (!(s <= u && u <= t)) throw DomainError("chen_defect: need s <= u <= t");
  const CadlagPath& x = lift.path();
  const std::size_t i = x.index_at(s);
  const std::size_t j = x.index_at(u);
  const std::size_t k = x.index_at(t);
  const Vector first = x.value(j) - x.value(i);
  const Vector second = x.value(k) - x.value(j);
  const Matrix residual =
      lift.area_at(i, k) - lift.area_at(i, j) - lift.area_at(j, k) - first * second.transpose();
  return residual.norm();
}

BracketPath bracket(const CadlagPath& path, int level) {
  const DyadicSchedule schedule = stopping_times(path, level);
  const MatrixPath full = dyadic_bracket_path(path, level);
  std::vector<double> times = schedule.times;
  std::vector<Matrix> values;
  values.reserve(times.size() + 1);
  for (std::size_t idx : schedule.indices) values.push_back(full.at(idx));
  if (times.back() < path.horizon()) {
    times.push_back(path.horizon());
    values.push_back(full.at(path.size() - 1));
  }
  return {level, MatrixPath(std::move(times), values, path.horizon())};
}

std::vector<double> ito_symmetry_defects(
    const RoughLift& lift, int level, std::span<const std::pair<std::size_t, std::size_t>> pairs,
    bool drop_bracket_diagonal) {
  const CadlagPath& x = lift.path();
  const MatrixPath brackets = level < 0 ? left_point_bracket(x) : dyadic_bracket_path(x, level);
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    const Matrix area = lift.area_at(i, j);
    const Vector dx = x.value(j) - x.value(i);
    Matrix increment = brackets.at(j) - brackets.at(i);
    if (drop_bracket_diagonal) increment.diagonal().setZero();
    const Matrix residual = area + area.transpose() + increment - dx * dx.transpose();
    out.push_back(residual.norm());
  }
  return out;
}

double ito_symmetry_defect(const RoughLift& lift, int level, double s, double t) {
  if (!(s <= t)) throw DomainError("ito_symmetry_defect: need s <= t");
  const CadlagPath& x = lift.path();
  const std::pair<std::size_t, std::size_t> pair{x.index_at(s), x.index_at(t)};
  return ito_symmetry_defects(lift, level, std::span(&pair, 1)).front();
}

double ito_symmetry_defect(const RoughLift& lift, double s, double t) {
  return ito_symmetry_defect(lift, lift.meta().level, s, t);
}

}  // namespace roughcadlag

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "roughcadlag/types.hpp"

namespace roughcadlag {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// A càdlàg path on [0, T] given by time-stamped samples and read as the
/// piecewise-constant interpolant: X_t = values[k], k = max{i : times[i] <= t}.
///
/// Times are strictly increasing and start at exactly 0; the horizon T is at
/// least the last sample time, and X is constant on [times.back(), T].
/// Instances are immutable.
class CadlagPath {
 public:
  /// `values` is n x d, one sample per row.
  CadlagPath(std::vector<double> times, RowMatrix values, double horizon);
  /// Horizon defaults to the last sample time.
  CadlagPath(std::vector<double> times, RowMatrix values);

  static CadlagPath from_samples(std::vector<double> times,
                                 const std::vector<Vector>& values);
  static CadlagPath from_samples(std::vector<double> times,
                                 const std::vector<Vector>& values, double horizon);
  /// One-dimensional convenience constructor.
  static CadlagPath scalar(std::vector<double> times, const std::vector<double>& values);
  static CadlagPath scalar(std::vector<double> times, const std::vector<double>& values,
                           double horizon);

  std::size_t size() const noexcept { return times_.size(); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(values_.cols()); }
  double horizon() const noexcept { return horizon_; }

  std::span<const double> times() const noexcept { return times_; }
  double time(std::size_t i) const { return times_[i]; }
  const RowMatrix& values() const noexcept { return values_; }
  auto row(std::size_t i) const { return values_.row(static_cast<Eigen::Index>(i)); }
  Vector value(std::size_t i) const { return row(i).transpose(); }

  /// max{i : times[i] <= t}. Throws DomainError outside [0, T].
  std::size_t index_at(double t) const;
  /// max{i : times[i] < t}, or 0 at t = 0.
  std::size_t index_before(double t) const;

  Vector eval(double t) const;
  /// X_{t-}; X_{0-} := X_0.
  Vector left_limit(double t) const;
  /// X_{s,t} = X_t - X_s.
  Vector increment(double s, double t) const;

  /// sup_t |X_t| (Euclidean).
  double sup_norm() const;

  /// The same path with an extra sample (t, X_t). Evaluation is unchanged.
  CadlagPath with_sample(double t) const;
  /// Pointwise value shift X + c.
  CadlagPath shifted(const Vector& c) const;
  /// Pointwise scaling lambda X.
  CadlagPath scaled(double lambda) const;

 private:
  void check_time(double t) const;

  std::vector<double> times_;
  RowMatrix values_;
  double horizon_;
};

/// u ⊗ v, i.e. the d x d matrix (u_i v_j).
Matrix tensor(const Vector& u, const Vector& v);

/// A càdlàg path of d x d matrices, stored as a flat path in R^{d*d}
/// (row-major per sample).
class MatrixPath {
 public:
  MatrixPath(std::vector<double> times, const std::vector<Matrix>& values, double horizon);
  MatrixPath(CadlagPath flat, std::size_t dim);

  std::size_t size() const noexcept { return flat_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  double horizon() const noexcept { return flat_.horizon(); }
  std::span<const double> times() const noexcept { return flat_.times(); }
  double time(std::size_t i) const { return flat_.time(i); }

  Matrix at(std::size_t i) const;
  Matrix eval(double t) const;
  /// max over samples of the Frobenius norm.
  double sup_norm() const;

  const CadlagPath& flat() const noexcept { return flat_; }

 private:
  CadlagPath flat_;
  std::size_t dim_;
};

/// A two-parameter function (s, t) -> d x d on the simplex 0 <= s <= t <= T,
/// evaluated on demand. W(t, t) = 0 is enforced.
class TwoParamTensor {
 public:
  using Fn = std::function<Matrix(double, double)>;

  TwoParamTensor(std::size_t dim, double horizon, Fn fn);

  std::size_t dim() const noexcept { return dim_; }
  double horizon() const noexcept { return horizon_; }

  /// Throws DomainError unless 0 <= s <= t <= T.
  Matrix operator()(double s, double t) const;

 private:
  std::size_t dim_;
  double horizon_;
  Fn fn_;
};

}  // namespace roughcadlag

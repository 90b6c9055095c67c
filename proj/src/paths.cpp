#include "roughcadlag/paths.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "roughcadlag/errors.hpp"

namespace roughcadlag {

namespace {

std::string describe_time(double t, double horizon) {
  std::ostringstream os;
  os.precision(17);
  os << "time " << t << " outside [0, " << horizon << "]";
  return os.str();
}

RowMatrix stack_rows(const std::vector<Vector>& values) {
  if (values.empty()) throw DomainError("path needs at least one sample");
  const auto d = values.front().size();
  RowMatrix out(static_cast<Eigen::Index>(values.size()), d);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].size() != d) throw DomainError("sample dimension changes along the path");
    out.row(static_cast<Eigen::Index>(i)) = values[i].transpose();
  }
  return out;
}

}  // namespace

CadlagPath::CadlagPath(std::vector<double> times, RowMatrix values, double horizon)
    : times_(std::move(times)), values_(std::move(values)), horizon_(horizon) {
  if (times_.empty()) throw DomainError("path needs at least one sample");
  if (static_cast<std::size_t>(values_.rows()) != times_.size())
    throw DomainError("times and values differ in length");
  if (values_.cols() < 1) throw DomainError("path dimension must be at least 1");
  if (times_.front() != 0.0) throw DomainError("first sample time must be exactly 0");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i])) throw DomainError("non-finite sample time");
    if (i > 0 && !(times_[i] > times_[i - 1]))
      throw DomainError("sample times must be strictly increasing");
  }
  if (!values_.allFinite()) throw DomainError("non-finite sample value");
  if (!std::isfinite(horizon_) || horizon_ < times_.back())
    throw DomainError("horizon must be finite and not before the last sample");
}

CadlagPath::CadlagPath(std::vector<double> times, RowMatrix values)
    : CadlagPath(times, std::move(values), times.empty() ? 0.0 : times.back()) {}

CadlagPath CadlagPath::from_samples(std::vector<double> times,
                                    const std::vector<Vector>& values) {
  const double horizon = times.empty() ? 0.0 : times.back();
  return {std::move(times), stack_rows(values), horizon};
}

CadlagPath CadlagPath::from_samples(std::vector<double> times,
                                    const std::vector<Vector>& values, double horizon) {
  return {std::move(times), stack_rows(values), horizon};
}

CadlagPath CadlagPath::scalar(std::vector<double> times, const std::vector<double>& values) {
  const double horizon = times.empty() ? 0.0 : times.back();
  return scalar(std::move(times), values, horizon);
}

CadlagPath CadlagPath::scalar(std::vector<double> times, const std::vector<double>& values,
                              double horizon) {
  RowMatrix m(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = values[i];
  return {std::move(times), std::move(m), horizon};
}

void CadlagPath::check_time(double t) const {
  if (!(t >= 0.0 && t <= horizon_)) throw DomainError(describe_time(t, horizon_));
}

std::size_t CadlagPath::index_at(double t) const {
  check_time(t);
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  return static_cast<std::size_t>(it - times_.begin()) - 1;
}

std::size_t CadlagPath::index_before(double t) const {
  check_time(t);
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  const auto k = static_cast<std::size_t>(it - times_.begin());
  return k == 0 ? 0 : k - 1;
}

Vector CadlagPath::eval(double t) const { return value(index_at(t)); }

Vector CadlagPath::left_limit(double t) const { return value(index_before(t)); }

Vector CadlagPath::increment(double s, double t) const { return eval(t) - eval(s); }

double CadlagPath::sup_norm() const { return values_.rowwise().norm().maxCoeff(); }

CadlagPath CadlagPath::with_sample(double t) const {
  const std::size_t k = index_at(t);
  if (times_[k] == t) return *this;
  std::vector<double> times = times_;
  times.insert(times.begin() + static_cast<std::ptrdiff_t>(k) + 1, t);
  RowMatrix values(values_.rows() + 1, values_.cols());
  const auto head = static_cast<Eigen::Index>(k) + 1;
  values.topRows(head) = values_.topRows(head);
  values.row(head) = values_.row(head - 1);
  values.bottomRows(values_.rows() - head) = values_.bottomRows(values_.rows() - head);
  return {std::move(times), std::move(values), horizon_};
}

CadlagPath CadlagPath::shifted(const Vector& c) const {
  if (static_cast<std::size_t>(c.size()) != dim()) throw DomainError("shift dimension mismatch");
  RowMatrix values = values_.rowwise() + c.transpose();
  return {times_, std::move(values), horizon_};
}

CadlagPath CadlagPath::scaled(double lambda) const {
  RowMatrix values = lambda * values_;
  return {times_, std::move(values), horizon_};
}

Matrix tensor(const Vector& u, const Vector& v) {
  if (u.size() != v.size()) throw DomainError("tensor: dimension mismatch");
  return u * v.transpose();
}

// --- MatrixPath ---

namespace {

CadlagPath flatten(std::vector<double> times, const std::vector<Matrix>& values, double horizon) {
  if (values.empty()) throw DomainError("matrix path needs at least one sample");
  const auto d = values.front().rows();
  RowMatrix flat(static_cast<Eigen::Index>(values.size()), d * d);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Matrix& m = values[i];
    if (m.rows() != d || m.cols() != d) throw DomainError("matrix path: inconsistent shape");
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c) flat(static_cast<Eigen::Index>(i), r * d + c) = m(r, c);
  }
  return {std::move(times), std::move(flat), horizon};
}

}  // namespace

MatrixPath::MatrixPath(std::vector<double> times, const std::vector<Matrix>& values,
                       double horizon)
    : flat_(flatten(std::move(times), values, horizon)),
      dim_(values.front().rows() > 0 ? static_cast<std::size_t>(values.front().rows()) : 0) {}

MatrixPath::MatrixPath(CadlagPath flat, std::size_t dim) : flat_(std::move(flat)), dim_(dim) {
  if (dim_ == 0 || flat_.dim() != dim_ * dim_)
    throw DomainError("matrix path: flat dimension is not d*d");
}

Matrix MatrixPath::at(std::size_t i) const {
  const auto d = static_cast<Eigen::Index>(dim_);
  Matrix m(d, d);
  const auto r = flat_.row(i);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) m(a, b) = r(a * d + b);
  return m;
}

Matrix MatrixPath::eval(double t) const { return at(flat_.index_at(t)); }

double MatrixPath::sup_norm() const { return flat_.sup_norm(); }

// --- TwoParamTensor ---

TwoParamTensor::TwoParamTensor(std::size_t dim, double horizon, Fn fn)
    : dim_(dim), horizon_(horizon), fn_(std::move(fn)) {
  if (dim_ == 0) throw DomainError("two-parameter tensor needs d >= 1");
  if (!fn_) throw DomainError("two-parameter tensor needs an evaluator");
}

Matrix TwoParamTensor::operator()(double s, double t) const {
  if (!(s >= 0.0 && s <= t && t <= horizon_))
    throw DomainError("two-parameter tensor: need 0 <= s <= t <= T");
  const auto d = static_cast<Eigen::Index>(dim_);
  if (s == t) return Matrix::Zero(d, d);
  return fn_(s, t);
}

}  // namespace roughcadlag

#pragma once

#include <Eigen/Dense>

namespace roughcadlag {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Euclidean norm on vectors, Frobenius norm on matrices.
inline double norm(const Vector& v) { return v.norm(); }
inline double frobenius(const Matrix& m) { return m.norm(); }

}  // namespace roughcadlag

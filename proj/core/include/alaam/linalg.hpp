#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace alaam {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Matrices with a 2-norm condition number above this are treated as singular.
inline constexpr double kMaxConditionNumber = 1e12;

double conditionNumber(const Matrix& m);

// Inverse via full-pivot LU, or nullopt when the matrix is (computationally)
// singular or non-finite.
std::optional<Matrix> invertIfWellConditioned(const Matrix& m, double maxCondition = kMaxConditionNumber);

// Row-per-sample matrix from nested vectors.
Matrix rowsToMatrix(const std::vector<std::vector<double>>& rows);
Vector toVector(std::span<const double> v);
std::vector<double> toStd(const Vector& v);

// Per-column mean and standard deviation with denominator M (matching the
// (1/M) U'U covariance estimate).
Vector columnMeans(const Matrix& samples);
Vector columnSd(const Matrix& samples);

// (mean - observed) / sd per column. NaN where sd == 0.
Vector tRatios(const Matrix& samples, const Vector& observed);

}  // namespace alaam

#include "alaam/linalg.hpp"

#include <cmath>
#include <limits>

namespace alaam {

double conditionNumber(const Matrix& m) {
  if (m.size() == 0) return 1.0;
  if (!m.allFinite()) return std::numeric_limits<double>::infinity();
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

std::optional<Matrix> invertIfWellConditioned(const Matrix& m, double maxCondition) {
  if (m.rows() != m.cols() || !m.allFinite()) return std::nullopt;
  if (!(conditionNumber(m) <= maxCondition)) return std::nullopt;
  Eigen::FullPivLU<Matrix> lu(m);
  if (!lu.isInvertible()) return std::nullopt;
  Matrix inv = lu.inverse();
  if (!inv.allFinite()) return std::nullopt;
  return inv;
}

Matrix rowsToMatrix(const std::vector<std::vector<double>>& rows) {
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index p = n ? static_cast<Eigen::Index>(rows.front().size()) : 0;
  Matrix m(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Vector toVector(std::span<const double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

std::vector<double> toStd(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector columnMeans(const Matrix& samples) { return samples.colwise().mean().transpose(); }

Vector columnSd(const Matrix& samples) {
  const Vector mean = columnMeans(samples);
  const Matrix centered = samples.rowwise() - mean.transpose();
  return (centered.array().square().colwise().sum() / double(samples.rows())).sqrt().transpose();
}

Vector tRatios(const Matrix& samples, const Vector& observed) {
  const Vector mean = columnMeans(samples);
  const Vector sd = columnSd(samples);
  Vector t(mean.size());
  for (Eigen::Index k = 0; k < t.size(); ++k) {
    t(k) = sd(k) > 0.0 ? (mean(k) - observed(k)) / sd(k) : std::numeric_limits<double>::quiet_NaN();
  }
  return t;
}

}  // namespace alaam

#include "hera/prox.hpp"

#include <Eigen/SVD>

namespace hera {

namespace {

void check_threshold(double epsilon) {
  if (epsilon < 0.0 || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::NegativeThreshold,
                "threshold must be finite and nonnegative, got " + std::to_string(epsilon));
  }
}

Eigen::JacobiSVD<Matrix> decompose(const Matrix& input, unsigned options) {
  if (!input.allFinite()) {
    throw Error(ErrorCode::SvdFailure, "non-finite input matrix");
  }
  Eigen::JacobiSVD<Matrix> svd(input, options);
  if (svd.info() != Eigen::Success) {
    throw Error(ErrorCode::SvdFailure, "decomposition did not converge");
  }
  return svd;
}

}  // namespace

Matrix shrink(const Matrix& input, double epsilon) {
  check_threshold(epsilon);
  return input.unaryExpr([epsilon](double v) { return shrink_scalar(v, epsilon); });
}

Matrix svt(const Matrix& input, double epsilon) {
  check_threshold(epsilon);
  const auto svd = decompose(input, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vector s = svd.singularValues();
  for (Index i = 0; i < s.size(); ++i) s(i) = std::max(s(i) - epsilon, 0.0);
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

Matrix project_nonneg(const Matrix& input) { return input.cwiseMax(0.0); }

Vector singular_values(const Matrix& input) {
  return decompose(input, 0).singularValues();
}

double nuclear_norm(const Matrix& input) { return singular_values(input).sum(); }

}  // namespace hera

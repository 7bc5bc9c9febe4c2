#pragma once

#include "hera/types.hpp"

namespace hera {

inline double shrink_scalar(double v, double epsilon) {
  if (v > epsilon) return v - epsilon;
  if (v < -epsilon) return v + epsilon;
  return 0.0;
}

// Elementwise soft threshold, the proximal map of epsilon * |.|_1.
Matrix shrink(const Matrix& input, double epsilon);

// Singular value thresholding, the proximal map of epsilon * |.|_*:
// SVD the input and soft-threshold the spectrum.
Matrix svt(const Matrix& input, double epsilon);

// Elementwise max(., 0).
Matrix project_nonneg(const Matrix& input);

// Descending singular values (throws SvdFailure).
Vector singular_values(const Matrix& input);

double nuclear_norm(const Matrix& input);

}  // namespace hera

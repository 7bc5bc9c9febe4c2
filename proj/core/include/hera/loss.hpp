#pragma once

#include "hera/types.hpp"

namespace hera {

// Additive pieces of the full training objective. total is the sum of the
// other six fields, in declaration order.
struct LossBreakdown {
  double ranking = 0.0;            // pairwise ranking surrogate
  double reconstruction = 0.0;     // (alpha/2) |P - W'X|_F^2
  double model_complexity = 0.0;   // beta |W|_F^2
  double sparsity = 0.0;           // mu |J|_1
  double nuclear = 0.0;            // nu |E|_*
  double lagrangian_extras = 0.0;  // multiplier traces + quadratic penalties
  double total = 0.0;
};

// Overflow-safe ln(1 + exp(-x)).
double rank_loss_scalar(double x);

// Confidence-weighted pairwise ranking loss over ordered label pairs:
//   (1/q^2) * sum_{i, j, k} (P[j,i] - P[k,i])^2 * rank_loss(((w_j - w_k)' x_i)^2)
double ranking_loss(const PartialLabelDataset& ds, const Matrix& weights,
                    const Matrix& confidence);

// ranking_loss + (alpha/2) |P - W'X|_F^2.
double heterogeneous_loss(const PartialLabelDataset& ds, const Matrix& weights,
                          const Matrix& confidence, double alpha);

// Full augmented Lagrangian of the alternating solver at the given state.
LossBreakdown augmented_objective(const PartialLabelDataset& ds, const Matrix& weights,
                                  const ConfidenceState& cs, const Hyperparams& hp,
                                  double lambda, double rho);

// Gradient of heterogeneous_loss + beta |W|_F^2 with respect to W (d x q).
Matrix grad_w(const PartialLabelDataset& ds, const Matrix& weights,
              const Matrix& confidence, const Hyperparams& hp);

// Gradient of the augmented objective with respect to P (q x n), all other
// variables frozen. Callers descend with P <- P - eta * grad.
Matrix grad_p(const PartialLabelDataset& ds, const Matrix& weights,
              const ConfidenceState& cs, const Hyperparams& hp, double lambda,
              double rho);

namespace detail {

// Hot-loop variants that reuse precomputed scores = W'X (q x n).
double ranking_loss_scores(const Matrix& scores, const Matrix& confidence);

double p_objective_scores(const Matrix& scores, const Matrix& confidence,
                          const Matrix& candidates, const Matrix& noise,
                          const Matrix& auxiliary, const Matrix& multiplier_m,
                          const Matrix& multiplier_n, double alpha, double lambda,
                          double rho);

Matrix grad_p_scores(const Matrix& scores, const Matrix& confidence,
                     const Matrix& candidates, const Matrix& noise,
                     const Matrix& auxiliary, const Matrix& multiplier_m,
                     const Matrix& multiplier_n, double alpha, double lambda,
                     double rho);

}  // namespace detail

}  // namespace hera

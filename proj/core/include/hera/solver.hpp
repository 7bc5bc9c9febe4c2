#pragma once

#include "hera/loss.hpp"
#include "hera/types.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace hera {

struct SolveReport {
  int iterations = 0;
  std::vector<double> loss_trace;  // objective after each outer iteration
  std::vector<std::pair<double, double>> feasibility_trace;  // (|Y-P-E|_F, |P-J|_F)
  bool converged = false;
};

struct IterationLogEntry {
  int iteration;
  double objective;
  double residual_decomposition;  // |Y - P - E|_F
  double residual_auxiliary;      // |P - J|_F
  double lambda;
  double rho;
};

using IterationSink = std::function<void(const IterationLogEntry&)>;

// inner_steps backtracked gradient steps on the W objective
// (ranking + reconstruction + weight decay), P frozen. Each step starts at
// eta_w and halves (up to 30 times) until the objective does not increase.
Matrix step_w(const PartialLabelDataset& ds, Matrix weights, const Matrix& confidence,
              const Hyperparams& hp);

// inner_steps backtracked gradient steps on the P terms of the augmented
// objective, then projection onto P >= 0.
Matrix step_p(const PartialLabelDataset& ds, const Matrix& weights,
              const ConfidenceState& cs, const Hyperparams& hp, double lambda,
              double rho);

// Exact minimizer of the J subproblem: shrink(P + N/rho, mu/rho).
Matrix step_j(const ConfidenceState& cs, double mu, double rho);

// Nuclear prox of the E subproblem followed by a nonnegative projection:
// project_nonneg(svt(Y - P + M/lambda, nu/lambda)).
Matrix step_e(const PartialLabelDataset& ds, const ConfidenceState& cs, double nu,
              double lambda);

// Dual ascent on both multipliers with the current penalties, then capped
// geometric penalty growth.
void update_duals(const PartialLabelDataset& ds, ConfidenceState& cs, double& lambda,
                  double& rho, const Hyperparams& hp);

struct FitResult {
  ModelState model;
  ConfidenceState state;
  SolveReport report;
};

// Alternating outer loop (W, P, J, E, duals) from init_state. Stops when the
// objective decrement falls to loss_tol or after iter_max iterations. The
// optional sink receives one entry per outer iteration.
FitResult fit(const PartialLabelDataset& ds, const Hyperparams& hp,
              const IterationSink& sink = {});

}  // namespace hera

#pragma once

#include <Eigen/Core>

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace hera {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;
using Index = Eigen::Index;

enum class ErrorCode {
  ShapeMismatch,
  EmptyCandidateSet,
  TruthNotInCandidates,
  NegativeThreshold,
  SvdFailure,
  NonFiniteIterate,
  KTooLarge,
  DegenerateNeighborhood,
  MissingGroundTruth,
  RTooLarge,
  BadFoldCount,
  ParseError,
  IoError,
  BadHyperparams,
  InvalidArgument,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Instances are stored column-wise: features is d x n, candidates is q x n
// with 0/1 entries marking candidate labels. Labels are 0-based in memory;
// the text format (see data.hpp) is 1-based.
struct PartialLabelDataset {
  Matrix features;
  Matrix candidates;
  std::optional<IntVector> ground_truth;  // length n, values in [0, q)

  Index feature_dim() const { return features.rows(); }
  Index num_instances() const { return features.cols(); }
  Index num_labels() const { return candidates.rows(); }
};

// Linear scoring model; column j holds the weight vector of label j.
struct ModelState {
  Matrix weights;  // d x q
};

// Solver state for the candidate-matrix decomposition Y = P + E with the
// sparsity split P = J. All matrices are q x n.
struct ConfidenceState {
  Matrix confidence;    // P, label confidences
  Matrix noise;         // E, low-rank noise part
  Matrix auxiliary;     // J, l1 auxiliary copy of P
  Matrix multiplier_m;  // dual for Y = P + E
  Matrix multiplier_n;  // dual for P = J
};

struct Hyperparams {
  double alpha = 0.02;      // reconstruction weight
  double beta = 1e-3;       // weight decay
  double mu = 0.1;          // l1 weight on J
  double nu = 1.0;          // nuclear weight on E
  double lambda0 = 1e-6;    // initial penalty for Y = P + E
  double rho0 = 1e-6;       // initial penalty for P = J
  double lambda_max = 1e6;
  double rho_max = 1e6;
  double tau = 1.1;         // penalty growth factor per outer iteration
  double eta_w = 1e-2;      // starting step size for W updates
  double eta_p = 1e-2;      // starting step size for P updates
  int inner_steps = 5;      // gradient steps per W/P update
  int iter_max = 200;
  double loss_tol = 1e-6;   // stop when the objective decrement falls below this
  int k_neighbors = 10;

  void validate() const;  // throws BadHyperparams
};

// Structural checks: positive dimensions, at least two labels, consistent
// shapes, every column has a candidate, ground truth (when present) lies in
// its column's candidate set.
void validate_dataset(const PartialLabelDataset& ds);

// W = 0; P spreads each column uniformly over its candidates; E = Y - P;
// J = P; both multipliers zero. The returned state is exactly feasible.
std::pair<ModelState, ConfidenceState> init_state(const PartialLabelDataset& ds);

}  // namespace hera

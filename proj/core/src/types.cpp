#include "hera/types.hpp"

namespace hera {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyCandidateSet: return "EmptyCandidateSet";
    case ErrorCode::TruthNotInCandidates: return "TruthNotInCandidates";
    case ErrorCode::NegativeThreshold: return "NegativeThreshold";
    case ErrorCode::SvdFailure: return "SvdFailure";
    case ErrorCode::NonFiniteIterate: return "NonFiniteIterate";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::DegenerateNeighborhood: return "DegenerateNeighborhood";
    case ErrorCode::MissingGroundTruth: return "MissingGroundTruth";
    case ErrorCode::RTooLarge: return "RTooLarge";
    case ErrorCode::BadFoldCount: return "BadFoldCount";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::BadHyperparams: return "BadHyperparams";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

void Hyperparams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw Error(ErrorCode::BadHyperparams, std::string(name) + " must be positive");
  };
  auto nonneg = [](double v, const char* name) {
    if (!(v >= 0.0)) throw Error(ErrorCode::BadHyperparams, std::string(name) + " must be nonnegative");
  };
  nonneg(alpha, "alpha");
  nonneg(beta, "beta");
  nonneg(mu, "mu");
  nonneg(nu, "nu");
  positive(lambda0, "lambda0");
  positive(rho0, "rho0");
  positive(lambda_max, "lambda_max");
  positive(rho_max, "rho_max");
  if (lambda0 > lambda_max) throw Error(ErrorCode::BadHyperparams, "lambda0 exceeds lambda_max");
  if (rho0 > rho_max) throw Error(ErrorCode::BadHyperparams, "rho0 exceeds rho_max");
  if (!(tau > 1.0)) throw Error(ErrorCode::BadHyperparams, "tau must exceed 1");
  positive(eta_w, "eta_w");
  positive(eta_p, "eta_p");
  if (inner_steps < 1) throw Error(ErrorCode::BadHyperparams, "inner_steps must be at least 1");
  if (iter_max < 0) throw Error(ErrorCode::BadHyperparams, "iter_max must be nonnegative");
  positive(loss_tol, "loss_tol");
  if (k_neighbors < 1) throw Error(ErrorCode::BadHyperparams, "k_neighbors must be at least 1");
}

void validate_dataset(const PartialLabelDataset& ds) {
  const Index d = ds.features.rows();
  const Index n = ds.features.cols();
  const Index q = ds.candidates.rows();
  if (d < 1 || n < 1) {
    throw Error(ErrorCode::ShapeMismatch, "features must be non-empty (d x n with d, n >= 1)");
  }
  if (q < 2) {
    throw Error(ErrorCode::ShapeMismatch, "need at least two labels");
  }
  if (ds.candidates.cols() != n) {
    throw Error(ErrorCode::ShapeMismatch,
                "candidates has " + std::to_string(ds.candidates.cols()) +
                    " columns, features has " + std::to_string(n));
  }
  if (!ds.features.allFinite()) {
    throw Error(ErrorCode::ShapeMismatch, "features contain non-finite values");
  }
  for (Index j = 0; j < n; ++j) {
    bool any = false;
    for (Index i = 0; i < q; ++i) {
      const double v = ds.candidates(i, j);
      if (v != 0.0 && v != 1.0) {
        throw Error(ErrorCode::ShapeMismatch,
                    "candidate matrix must be 0/1, found " + std::to_string(v) +
                        " in column " + std::to_string(j));
      }
      any = any || v == 1.0;
    }
    if (!any) {
      throw Error(ErrorCode::EmptyCandidateSet,
                  "column " + std::to_string(j) + " has no candidate labels");
    }
  }
  if (ds.ground_truth) {
    if (ds.ground_truth->size() != n) {
      throw Error(ErrorCode::ShapeMismatch,
                  "ground truth has " + std::to_string(ds.ground_truth->size()) +
                      " entries for " + std::to_string(n) + " instances");
    }
    for (Index j = 0; j < n; ++j) {
      const int y = (*ds.ground_truth)(j);
      if (y < 0 || y >= q) {
        throw Error(ErrorCode::ShapeMismatch,
                    "ground truth label " + std::to_string(y) + " of column " +
                        std::to_string(j) + " is out of range");
      }
      if (ds.candidates(y, j) != 1.0) {
        throw Error(ErrorCode::TruthNotInCandidates,
                    "column " + std::to_string(j) + ": true label " + std::to_string(y) +
                        " is not a candidate");
      }
    }
  }
}

std::pair<ModelState, ConfidenceState> init_state(const PartialLabelDataset& ds) {
  validate_dataset(ds);
  const Index d = ds.feature_dim();
  const Index n = ds.num_instances();
  const Index q = ds.num_labels();

  ModelState model{Matrix::Zero(d, q)};

  ConfidenceState cs;
  cs.confidence.resize(q, n);
  for (Index j = 0; j < n; ++j) {
    const double size = ds.candidates.col(j).sum();
    cs.confidence.col(j) = ds.candidates.col(j) / size;
  }
  cs.noise = ds.candidates - cs.confidence;
  cs.auxiliary = cs.confidence;
  cs.multiplier_m = Matrix::Zero(q, n);
  cs.multiplier_n = Matrix::Zero(q, n);
  return {std::move(model), std::move(cs)};
}

}  // namespace hera

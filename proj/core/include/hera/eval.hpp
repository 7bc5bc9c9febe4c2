#pragma once

#include "hera/data.hpp"
#include "hera/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace hera {

struct EvalResult {
  std::vector<double> per_fold_accuracy;
  double mean = 0.0;
  double std_dev = 0.0;  // population standard deviation over folds
};

EvalResult make_eval_result(std::vector<double> per_fold_accuracy);

enum class Method { Hera, PlKnn };

struct EvalOptions {
  int folds = 10;
  std::uint64_t seed = 0;
  Method method = Method::Hera;
  bool standardize = false;  // per-feature, statistics from the training fold
  bool grid_alpha = false;   // pick alpha by inner cross-validation
};

// Instance-based baseline: count candidate-set membership over the k nearest
// training columns, predict the argmax (lowest label on ties).
int plknn_predict(const PartialLabelDataset& train, const Vector& query, int k);

// Alpha values tried by grid_alpha, ascending.
std::vector<double> alpha_search_grid();

using FoldObserver =
    std::function<void(int fold, const FoldSplit& split, double accuracy)>;

// k-fold cross-validation of either method. Each fold trains only on its
// training block; the prediction neighbor count is min(k_neighbors, train
// size). Requires ground truth for scoring.
EvalResult cross_validate(const PartialLabelDataset& ds, const Hyperparams& hp,
                          const EvalOptions& opts, const FoldObserver& observer = {});

enum class SweepProtocol { R1, R2, R3, Eps };

const char* to_string(SweepProtocol protocol);

struct SweepPoint {
  double value;
  EvalResult hera;
  EvalResult plknn;
};

// Corrupt `clean` at every grid value under the protocol (r1/r2/r3 sweep p
// with that many false labels; eps sweeps the coupling rate at p = 1, r = 1),
// then cross-validate both methods. Corruption seeds are seed + grid index;
// the fold seed is `seed` throughout, so splits are paired across the curve.
std::vector<SweepPoint> run_sweep(const PartialLabelDataset& clean,
                                  SweepProtocol protocol,
                                  const std::vector<double>& grid,
                                  const Hyperparams& hp, int folds,
                                  std::uint64_t seed);

}  // namespace hera

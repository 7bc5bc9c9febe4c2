#pragma once

#include "hera/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hera {

// Controlled corruption of a fully labeled dataset. Without epsilon,
// round(p * n) instances (round half to even) each receive r distinct false
// labels drawn uniformly. With epsilon (requires p = 1, r = 1), every
// instance receives one false label: the coupling label (y + 1) mod q with
// probability epsilon, otherwise a uniform label that is neither the true
// nor the coupling label.
struct CorruptionSpec {
  double p = 0.0;
  int r = 1;
  std::optional<double> epsilon;
  std::uint64_t seed = 0;

  void validate(Index num_labels) const;
};

PartialLabelDataset corrupt(const PartialLabelDataset& clean, const CorruptionSpec& spec);

// Text format:
//   PLL 1
//   n d q
//   n feature rows (d values each)
//   n candidate rows (1-based label lists)
//   optional TRUTH marker followed by n rows of one 1-based label
// Values are written with 17 significant digits, so save/load round-trips
// reproduce every double exactly.
PartialLabelDataset load_dataset(const std::string& path);
void save_dataset(const PartialLabelDataset& ds, const std::string& path);

// CSV ingestion: one instance per row in both files, features.csv holds
// comma-separated reals, labels.csv holds comma-separated 1-based candidate
// lists. q is the largest label present. If every candidate list is a
// singleton, ground truth is inferred from it.
PartialLabelDataset load_csv_dataset(const std::string& features_path,
                                     const std::string& labels_path);

struct FoldSplit {
  std::vector<int> train;  // ascending
  std::vector<int> test;   // in permutation order
};

// Seeded permutation of [0, n) cut into `folds` contiguous blocks whose sizes
// differ by at most one.
std::vector<FoldSplit> kfold_split(int n, int folds, std::uint64_t seed);

// Model file:
//   PLLMODEL 1
//   d q n
//   d weight rows (q values each)
//   q confidence rows (n values each)
//   one "name value" line per hyperparameter
struct SavedModel {
  ModelState model;
  Matrix confidence;  // q x n
  Hyperparams params;
};

void save_model(const SavedModel& saved, const std::string& path);
SavedModel load_model(const std::string& path);

// Shared by the text writers; round-trip exact ("%.17g").
std::string format_double(double value);

}  // namespace hera

#include "hera/synthetic.hpp"

#include "hera/rng.hpp"

#include <cmath>
#include <string>

namespace hera {

PartialLabelDataset make_blobs(int n, int dim, int num_labels, double separation,
                               std::uint64_t seed) {
  if (n < 1 || dim < 1 || num_labels < 2 || !(separation >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "need n >= 1, dim >= 1, num_labels >= 2, separation >= 0");
  }
  if (num_labels > dim) {
    throw Error(ErrorCode::InvalidArgument,
                "axis-aligned means need num_labels <= dim, got " +
                    std::to_string(num_labels) + " > " + std::to_string(dim));
  }
  const double radius = separation / std::sqrt(2.0);
  Rng rng(seed);

  PartialLabelDataset ds;
  ds.features.resize(dim, n);
  ds.candidates = Matrix::Zero(num_labels, n);
  IntVector truth(n);
  for (int i = 0; i < n; ++i) {
    const int label = i % num_labels;
    for (int c = 0; c < dim; ++c) {
      ds.features(c, i) = rng.next_gaussian() + (c == label ? radius : 0.0);
    }
    ds.candidates(label, i) = 1.0;
    truth(i) = label;
  }
  ds.ground_truth = std::move(truth);
  return ds;
}

}  // namespace hera

#pragma once

#include "hera/types.hpp"

#include <vector>

namespace hera {

// Neighborhood of one query: its k nearest training columns, the (k+1)x(k+1)
// Gaussian similarity over neighbors + query (query last), and the stacked
// (k+1)xq label matrix (neighbor confidence rows, then the model scores of
// the query).
struct NeighborContext {
  std::vector<Index> neighbor_indices;  // ascending by distance, ties by index
  Matrix similarity;
  Matrix stacked_labels;
};

// Gaussian similarity over the given points (one per column). The kernel
// width is the mean, over the points, of the distance to the nearest other
// point. Throws DegenerateNeighborhood when that mean is zero (all points
// coincide); diagonal entries are exactly 1.
Matrix build_similarity(const Matrix& points);

NeighborContext make_neighbor_context(const Vector& query, const PartialLabelDataset& ds,
                                      const ModelState& model, const Matrix& confidence,
                                      int k);

// Label propagation over the (k+1)-point neighborhood: the query's propagated
// score row is similarity.row(k) * stacked_labels; returns its argmax, lowest
// index on ties. Falls back to uniform similarity when the neighborhood is
// degenerate.
int predict_one(const Vector& query, const PartialLabelDataset& ds,
                const ModelState& model, const Matrix& confidence, int k);

// One prediction per column of queries (d x m).
std::vector<int> predict_batch(const Matrix& queries, const PartialLabelDataset& ds,
                               const ModelState& model, const Matrix& confidence, int k);

}  // namespace hera

#include "hera/predict.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace hera {

namespace {

void check_predict_args(const Vector& query, const PartialLabelDataset& ds,
                        const ModelState& model, const Matrix& confidence, int k) {
  if (query.size() != ds.feature_dim()) {
    throw Error(ErrorCode::ShapeMismatch, "query dimension does not match the dataset");
  }
  if (model.weights.rows() != ds.feature_dim() || model.weights.cols() != ds.num_labels()) {
    throw Error(ErrorCode::ShapeMismatch, "weights must be d x q");
  }
  if (confidence.rows() != ds.num_labels() || confidence.cols() != ds.num_instances()) {
    throw Error(ErrorCode::ShapeMismatch, "confidence must be q x n");
  }
  if (k < 1 || k > ds.num_instances()) {
    throw Error(ErrorCode::KTooLarge, "k = " + std::to_string(k) + " with " +
                                          std::to_string(ds.num_instances()) +
                                          " training instances");
  }
}

Index argmax_lowest(const Eigen::RowVectorXd& row) {
  Index best = 0;
  for (Index i = 1; i < row.size(); ++i) {
    if (row(i) > row(best)) best = i;
  }
  return best;
}

}  // namespace

Matrix build_similarity(const Matrix& points) {
  const Index m = points.cols();
  if (m < 2) {
    throw Error(ErrorCode::InvalidArgument, "need at least two points");
  }
  Matrix dist2(m, m);
  for (Index i = 0; i < m; ++i) {
    dist2(i, i) = 0.0;
    for (Index j = i + 1; j < m; ++j) {
      const double d2 = (points.col(i) - points.col(j)).squaredNorm();
      dist2(i, j) = d2;
      dist2(j, i) = d2;
    }
  }
  // kernel width: mean distance to the nearest other point
  double sigma = 0.0;
  for (Index i = 0; i < m; ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < m; ++j) {
      if (j != i) nearest = std::min(nearest, dist2(i, j));
    }
    sigma += std::sqrt(nearest);
  }
  sigma /= static_cast<double>(m);
  if (sigma == 0.0) {
    throw Error(ErrorCode::DegenerateNeighborhood, "all points coincide");
  }
  return (-dist2.array() / (sigma * sigma)).exp();
}

NeighborContext make_neighbor_context(const Vector& query, const PartialLabelDataset& ds,
                                      const ModelState& model, const Matrix& confidence,
                                      int k) {
  check_predict_args(query, ds, model, confidence, k);
  const Index n = ds.num_instances();
  const Index q = ds.num_labels();

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::vector<double> dist2(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    dist2[static_cast<std::size_t>(i)] = (ds.features.col(i) - query).squaredNorm();
  }
  std::partial_sort(order.begin(), order.begin() + k, order.end(),
                    [&](Index a, Index b) {
                      const double da = dist2[static_cast<std::size_t>(a)];
                      const double db = dist2[static_cast<std::size_t>(b)];
                      return da < db || (da == db && a < b);
                    });
  order.resize(static_cast<std::size_t>(k));

  NeighborContext ctx;
  ctx.neighbor_indices = std::move(order);

  Matrix points(ds.feature_dim(), k + 1);
  ctx.stacked_labels.resize(k + 1, q);
  for (int t = 0; t < k; ++t) {
    const Index idx = ctx.neighbor_indices[static_cast<std::size_t>(t)];
    points.col(t) = ds.features.col(idx);
    ctx.stacked_labels.row(t) = confidence.col(idx).transpose();
  }
  points.col(k) = query;
  ctx.stacked_labels.row(k) = (model.weights.transpose() * query).transpose();

  try {
    ctx.similarity = build_similarity(points);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateNeighborhood) throw;
    ctx.similarity = Matrix::Ones(k + 1, k + 1);
  }
  return ctx;
}

int predict_one(const Vector& query, const PartialLabelDataset& ds,
                const ModelState& model, const Matrix& confidence, int k) {
  const NeighborContext ctx = make_neighbor_context(query, ds, model, confidence, k);
  const Eigen::RowVectorXd propagated = ctx.similarity.row(k) * ctx.stacked_labels;
  return static_cast<int>(argmax_lowest(propagated));
}

std::vector<int> predict_batch(const Matrix& queries, const PartialLabelDataset& ds,
                               const ModelState& model, const Matrix& confidence, int k) {
  if (queries.rows() != ds.feature_dim()) {
    throw Error(ErrorCode::ShapeMismatch, "query dimension does not match the dataset");
  }
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(queries.cols()));
  for (Index j = 0; j < queries.cols(); ++j) {
    labels.push_back(predict_one(queries.col(j), ds, model, confidence, k));
  }
  return labels;
}

}  // namespace hera

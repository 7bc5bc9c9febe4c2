#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "hera/predict.hpp"
#include "hera/rng.hpp"
#include "hera/synthetic.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

using namespace hera;
using testutil::thrown_code;

namespace {

// Literal reimplementation of the whole prediction pipeline.
int reference_predict(const Vector& query, const PartialLabelDataset& ds,
                      const Matrix& W, const Matrix& P, int k) {
  const Index n = ds.num_instances();
  std::vector<std::pair<double, Index>> order;
  for (Index j = 0; j < n; ++j)
    order.emplace_back((ds.features.col(j) - query).norm(), j);
  std::sort(order.begin(), order.end());

  Matrix points(ds.feature_dim(), k + 1);
  for (int i = 0; i < k; ++i) points.col(i) = ds.features.col(order[i].second);
  points.col(k) = query;

  double sigma = 0.0;
  for (int i = 0; i <= k; ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= k; ++j)
      if (j != i) nearest = std::min(nearest, (points.col(i) - points.col(j)).norm());
    sigma += nearest / double(k + 1);
  }

  Matrix S = Matrix::Ones(k + 1, k + 1);
  if (sigma > 0.0)
    for (int i = 0; i <= k; ++i)
      for (int j = 0; j <= k; ++j)
        S(i, j) = std::exp(-(points.col(i) - points.col(j)).squaredNorm() /
                           (sigma * sigma));

  const Index q = ds.num_labels();
  Vector score = Vector::Zero(q);
  for (int i = 0; i < k; ++i)
    score += S(k, i) * P.col(order[i].second);
  score += S(k, k) * (W.transpose() * query);

  Index best = 0;
  for (Index l = 1; l < q; ++l)
    if (score(l) > score(best)) best = l;
  return int(best);
}

}  // namespace

TEST_CASE("two points at their mutual distance have similarity exp(-1)") {
  Matrix pts(1, 2);
  pts << 0.0, 1.7;
  const Matrix s = build_similarity(pts);
  CHECK(s(0, 0) == 1.0);
  CHECK(s(1, 1) == 1.0);
  CHECK(s(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(s(1, 0) == s(0, 1));
}

TEST_CASE("kernel width averages each point's nearest-neighbor distance") {
  Matrix pts(1, 3);
  pts << 0.0, 1.0, 3.0;
  // nearest-other distances (1, 1, 2), width 4/3
  const Matrix s = build_similarity(pts);
  CHECK(s(0, 1) == doctest::Approx(std::exp(-9.0 / 16.0)).epsilon(1e-12));
  CHECK(s(0, 2) == doctest::Approx(std::exp(-9.0 * 9.0 / 16.0)).epsilon(1e-12));
  for (int i = 0; i < 3; ++i) CHECK(s(i, i) == 1.0);
}

TEST_CASE("similarity is symmetric with entries in (0, 1]") {
  Rng rng(901);
  const Matrix pts = oracle::uniform_matrix(rng, 4, 8);
  const Matrix s = build_similarity(pts);
  CHECK((s - s.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(s.minCoeff() > 0.0);
  CHECK(s.maxCoeff() <= 1.0);
}

TEST_CASE("coincident points are rejected as degenerate") {
  const Matrix pts = Matrix::Ones(3, 4);
  CHECK(thrown_code([&] { build_similarity(pts); }) ==
        ErrorCode::DegenerateNeighborhood);
  CHECK(thrown_code([&] { build_similarity(Matrix::Ones(3, 1)); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("neighbor context orders by distance with index tie-breaks") {
  PartialLabelDataset ds;
  ds.features = Matrix(1, 4);
  ds.features << 3.0, 1.0, 1.0, 0.5;
  ds.candidates = Matrix::Ones(2, 4);
  ModelState model;
  model.weights = Matrix::Zero(1, 2);
  const Matrix P = Matrix::Ones(2, 4);
  const Vector query = Vector::Zero(1);

  const NeighborContext ctx = make_neighbor_context(query, ds, model, P, 3);
  REQUIRE(ctx.neighbor_indices.size() == 3);
  CHECK(ctx.neighbor_indices[0] == 3);
  CHECK(ctx.neighbor_indices[1] == 1);  // ties with column 2, lower index wins
  CHECK(ctx.neighbor_indices[2] == 2);
  CHECK(ctx.stacked_labels.rows() == 4);
  CHECK(ctx.stacked_labels.cols() == 2);
  CHECK((ctx.stacked_labels.row(3) - (model.weights.transpose() * query).transpose())
            .norm() == 0.0);
}

TEST_CASE("a fully coincident neighborhood falls back to uniform similarity") {
  PartialLabelDataset ds;
  ds.features = Matrix::Zero(2, 3);
  ds.candidates = Matrix::Ones(2, 3);
  ModelState model;
  model.weights = Matrix::Zero(2, 2);
  Matrix P(2, 3);
  P << 1.0, 1.0, 0.0, 0.0, 0.0, 1.0;
  const Vector query = Vector::Zero(2);
  const NeighborContext ctx = make_neighbor_context(query, ds, model, P, 2);
  CHECK((ctx.similarity - Matrix::Ones(3, 3)).norm() == 0.0);
  // votes 2:1 for label 0
  CHECK(predict_one(query, ds, model, P, 2) == 0);
}

TEST_CASE("unanimous one-hot neighbors predict their label") {
  const PartialLabelDataset ds = make_blobs(20, 3, 3, 5.0, 31);
  Matrix P = Matrix::Zero(3, 20);
  P.row(2).setOnes();
  ModelState model;
  model.weights = Matrix::Zero(3, 3);  // silent model, the neighbors decide
  Rng rng(902);
  for (int trial = 0; trial < 5; ++trial) {
    const Vector query = oracle::uniform_matrix(rng, 3, 1).col(0);
    CHECK(predict_one(query, ds, model, P, 7) == 2);
  }
}

TEST_CASE("single-neighbor prediction expands to s*p + model scores") {
  PartialLabelDataset ds;
  ds.features = Matrix(1, 2);
  ds.features << 0.0, 5.0;
  ds.candidates = Matrix::Ones(3, 2);
  Matrix P(3, 2);
  P << 0.9, 0.0, 0.1, 0.0, 0.0, 1.0;
  ModelState model;
  model.weights = Matrix(1, 3);
  model.weights << 0.0, 0.25, 0.0;
  const Vector query = Vector::Constant(1, 1.0);

  // neighbor is column 0 at distance 1, so s = exp(-1) and the propagated
  // scores are exp(-1)*(0.9, 0.1, 0) + (0, 0.25, 0)
  const double s = std::exp(-1.0);
  const Vector expect =
      s * P.col(0) + model.weights.transpose() * query;
  const int got = predict_one(query, ds, model, P, 1);
  Index best = 0;
  expect.maxCoeff(&best);
  CHECK(got == int(best));
  CHECK(got == 0);  // 0.331 beats 0.25 + 0.037
}

TEST_CASE("prediction is invariant to a common positive rescaling") {
  const PartialLabelDataset ds = make_blobs(40, 4, 3, 3.0, 33);
  Rng rng(903);
  const Matrix W = oracle::uniform_matrix(rng, 4, 3);
  const Matrix P = oracle::uniform_matrix(rng, 3, 40, 0.0, 1.0);
  ModelState m1, m2;
  m1.weights = W;
  m2.weights = 7.3 * W;
  for (int trial = 0; trial < 20; ++trial) {
    const Vector query = 2.0 * oracle::uniform_matrix(rng, 4, 1).col(0);
    CHECK(predict_one(query, ds, m1, P, 5) ==
          predict_one(query, ds, m2, (7.3 * P).eval(), 5));
  }
}

TEST_CASE("neighbor count bounds are enforced") {
  const PartialLabelDataset ds = make_blobs(10, 3, 2, 4.0, 35);
  ModelState model;
  model.weights = Matrix::Zero(3, 2);
  const Matrix P = Matrix::Ones(2, 10);
  const Vector query = Vector::Zero(3);
  CHECK(thrown_code([&] { predict_one(query, ds, model, P, 0); }) ==
        ErrorCode::KTooLarge);
  CHECK(thrown_code([&] { predict_one(query, ds, model, P, 11); }) ==
        ErrorCode::KTooLarge);
  CHECK_NOTHROW(predict_one(query, ds, model, P, 10));
}

TEST_CASE("batch prediction is elementwise and order-preserving") {
  const PartialLabelDataset ds = make_blobs(30, 4, 3, 4.0, 37);
  Rng rng(904);
  const Matrix W = oracle::uniform_matrix(rng, 4, 3);
  const Matrix P = oracle::uniform_matrix(rng, 3, 30, 0.0, 1.0);
  ModelState model;
  model.weights = W;

  const Matrix queries = oracle::uniform_matrix(rng, 4, 6, -2.0, 2.0);
  const auto batch = predict_batch(queries, ds, model, P, 5);
  REQUIRE(batch.size() == 6);
  for (int i = 0; i < 6; ++i)
    CHECK(batch[i] == predict_one(queries.col(i), ds, model, P, 5));

  const Matrix empty(4, 0);
  CHECK(predict_batch(empty, ds, model, P, 5).empty());

  Matrix reversed(4, 6);
  for (int i = 0; i < 6; ++i) reversed.col(i) = queries.col(5 - i);
  const auto rbatch = predict_batch(reversed, ds, model, P, 5);
  for (int i = 0; i < 6; ++i) CHECK(rbatch[i] == batch[5 - i]);
}

TEST_CASE("prediction matches an independent pipeline reimplementation") {
  const PartialLabelDataset ds = make_blobs(60, 5, 4, 2.5, 39);
  Rng rng(905);
  const Matrix W = oracle::uniform_matrix(rng, 5, 4);
  const Matrix P = oracle::uniform_matrix(rng, 4, 60, 0.0, 1.0);
  ModelState model;
  model.weights = W;
  for (int trial = 0; trial < 40; ++trial) {
    const Vector query = 3.0 * oracle::uniform_matrix(rng, 5, 1).col(0);
    for (int k : {1, 3, 10}) {
      CHECK(predict_one(query, ds, model, P, k) ==
            reference_predict(query, ds, W, P, k));
    }
  }
}

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hera/eval.hpp"
#include "hera/rng.hpp"
#include "hera/synthetic.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

using namespace hera;
using testutil::thrown_code;

namespace {

PartialLabelDataset take_columns(const PartialLabelDataset& ds,
                                 const std::vector<int>& indices) {
  PartialLabelDataset out;
  const auto m = static_cast<Index>(indices.size());
  out.features.resize(ds.feature_dim(), m);
  out.candidates.resize(ds.num_labels(), m);
  IntVector truth(m);
  for (Index t = 0; t < m; ++t) {
    out.features.col(t) = ds.features.col(indices[std::size_t(t)]);
    out.candidates.col(t) = ds.candidates.col(indices[std::size_t(t)]);
    truth(t) = (*ds.ground_truth)(indices[std::size_t(t)]);
  }
  out.ground_truth = truth;
  return out;
}

PartialLabelDataset corrupted_blobs(Index n, Index d, Index q, double sep,
                                    std::uint64_t blob_seed, double p, int r,
                                    std::uint64_t corrupt_seed) {
  CorruptionSpec spec;
  spec.p = p;
  spec.r = r;
  spec.seed = corrupt_seed;
  return corrupt(make_blobs(n, d, q, sep, blob_seed), spec);
}

}  // namespace

TEST_CASE("fold summary reports mean and population standard deviation") {
  const EvalResult r = make_eval_result({0.5, 0.7, 0.9});
  CHECK(r.mean == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(r.std_dev == doctest::Approx(std::sqrt(0.08 / 3.0)).epsilon(1e-15));
  REQUIRE(r.per_fold_accuracy.size() == 3);

  const EvalResult empty = make_eval_result({});
  CHECK(empty.mean == 0.0);
  CHECK(empty.std_dev == 0.0);
  CHECK(empty.per_fold_accuracy.empty());
}

TEST_CASE("fold summary matches a direct recomputation") {
  Rng rng(911);
  for (int trial = 0; trial < 20; ++trial) {
    const int folds = 2 + int(rng.bounded(9));
    std::vector<double> acc;
    for (int f = 0; f < folds; ++f) acc.push_back(rng.next_double());
    const EvalResult r = make_eval_result(acc);
    double mean = 0.0;
    for (double a : acc) mean += a;
    mean /= double(folds);
    double ss = 0.0;
    for (double a : acc) ss += (a - mean) * (a - mean);
    CHECK(std::abs(r.mean - mean) <= 1e-12);
    CHECK(std::abs(r.std_dev - std::sqrt(ss / double(folds))) <= 1e-12);
  }
}

TEST_CASE("candidate voting follows the nearest training columns") {
  PartialLabelDataset train;
  train.features = Matrix(1, 4);
  train.features << 0.0, 1.0, 2.0, 10.0;
  train.candidates = Matrix::Zero(3, 4);
  train.candidates(0, 0) = 1.0;
  train.candidates(1, 0) = 1.0;  // {0, 1}
  train.candidates(1, 1) = 1.0;  // {1}
  train.candidates(1, 2) = 1.0;
  train.candidates(2, 2) = 1.0;  // {1, 2}
  train.candidates(2, 3) = 1.0;  // {2}

  const Vector query = Vector::Constant(1, 0.5);
  // neighbors 0, 1, 2 vote (1, 3, 1)
  CHECK(plknn_predict(train, query, 3) == 1);
  // all four columns vote (1, 3, 2)
  CHECK(plknn_predict(train, query, 4) == 1);
  // the distance tie goes to column 0, whose pair then ties to the low label
  CHECK(plknn_predict(train, query, 1) == 0);
}

TEST_CASE("unanimous singleton neighbors always win the vote") {
  PartialLabelDataset train;
  train.features = Matrix::Random(3, 12);
  train.candidates = Matrix::Zero(4, 12);
  train.candidates.row(1).setOnes();
  Rng rng(912);
  for (int trial = 0; trial < 5; ++trial) {
    const Vector query = oracle::uniform_matrix(rng, 3, 1).col(0);
    CHECK(plknn_predict(train, query, 5) == 1);
  }
}

TEST_CASE("voting rejects out-of-range neighbor counts") {
  PartialLabelDataset train;
  train.features = Matrix::Random(2, 6);
  train.candidates = Matrix::Ones(3, 6);
  const Vector query = Vector::Zero(2);
  CHECK(thrown_code([&] { plknn_predict(train, query, 0); }) == ErrorCode::KTooLarge);
  CHECK(thrown_code([&] { plknn_predict(train, query, 7); }) == ErrorCode::KTooLarge);
  CHECK(thrown_code([&] { plknn_predict(train, Vector::Zero(5), 3); }) ==
        ErrorCode::ShapeMismatch);
}

TEST_CASE("cross-validation visits every fold split exactly as dealt") {
  const PartialLabelDataset ds = corrupted_blobs(40, 4, 3, 6.0, 51, 0.5, 1, 52);
  const auto expected = kfold_split(40, 5, 9);

  Hyperparams hp;
  EvalOptions opts;
  opts.folds = 5;
  opts.seed = 9;
  opts.method = Method::PlKnn;

  std::vector<int> seen;
  std::vector<bool> covered(40, false);
  const EvalResult r = cross_validate(ds, hp, opts,
      [&](int fold, const FoldSplit& split, double accuracy) {
        REQUIRE(fold >= 0);
        REQUIRE(fold < 5);
        seen.push_back(fold);
        CHECK(split.train == expected[std::size_t(fold)].train);
        CHECK(split.test == expected[std::size_t(fold)].test);
        CHECK(accuracy >= 0.0);
        CHECK(accuracy <= 1.0);

        // recompute the fold score from scratch
        const PartialLabelDataset train = take_columns(ds, split.train);
        const int k = std::min<int>(hp.k_neighbors, int(train.num_instances()));
        int correct = 0;
        for (int j : split.test) {
          if (plknn_predict(train, ds.features.col(j), k) == (*ds.ground_truth)(j))
            ++correct;
        }
        CHECK(accuracy ==
              doctest::Approx(double(correct) / double(split.test.size()))
                  .epsilon(1e-15));
        for (int j : split.test) {
          CHECK(!covered[std::size_t(j)]);
          covered[std::size_t(j)] = true;
        }
      });

  CHECK(seen == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(std::all_of(covered.begin(), covered.end(), [](bool b) { return b; }));
  REQUIRE(r.per_fold_accuracy.size() == 5);
}

TEST_CASE("leave-one-out clamps the neighbor count to the training size") {
  const PartialLabelDataset ds = make_blobs(8, 3, 2, 6.0, 41);
  Hyperparams hp;
  EvalOptions opts;
  opts.folds = 8;
  opts.seed = 2;
  const EvalResult r = cross_validate(ds, hp, opts);
  REQUIRE(r.per_fold_accuracy.size() == 8);
  for (double a : r.per_fold_accuracy) CHECK((a == 0.0 || a == 1.0));
  CHECK(r.mean >= 0.75);  // well separated blobs
}

TEST_CASE("cross-validation is deterministic") {
  const PartialLabelDataset ds = corrupted_blobs(30, 4, 3, 6.0, 53, 0.4, 1, 54);
  Hyperparams hp;
  hp.iter_max = 40;
  EvalOptions opts;
  opts.folds = 3;
  opts.seed = 5;
  const EvalResult a = cross_validate(ds, hp, opts);
  const EvalResult b = cross_validate(ds, hp, opts);
  CHECK(a.per_fold_accuracy == b.per_fold_accuracy);
  CHECK(a.mean == b.mean);
  CHECK(a.std_dev == b.std_dev);
}

TEST_CASE("standardization cancels a power-of-two feature rescaling") {
  PartialLabelDataset ds = corrupted_blobs(36, 4, 3, 5.0, 55, 0.5, 1, 56);
  Hyperparams hp;
  EvalOptions opts;
  opts.folds = 4;
  opts.seed = 3;
  opts.method = Method::PlKnn;
  opts.standardize = true;
  const EvalResult base = cross_validate(ds, hp, opts);

  PartialLabelDataset scaled = ds;
  scaled.features.row(0) *= 4.0;
  scaled.features.row(2) *= 0.25;
  const EvalResult rescaled = cross_validate(scaled, hp, opts);
  CHECK(base.per_fold_accuracy == rescaled.per_fold_accuracy);
}

TEST_CASE("a constant feature survives standardization") {
  PartialLabelDataset ds = corrupted_blobs(36, 3, 3, 5.0, 57, 0.5, 1, 58);
  PartialLabelDataset padded = ds;
  padded.features.conservativeResize(4, Eigen::NoChange);
  padded.features.row(3).setConstant(7.5);

  Hyperparams hp;
  EvalOptions opts;
  opts.folds = 4;
  opts.seed = 6;
  opts.method = Method::PlKnn;
  opts.standardize = true;
  const EvalResult with_pad = cross_validate(padded, hp, opts);
  const EvalResult without = cross_validate(ds, hp, opts);
  // the padded row standardizes to all zeros, so distances are unchanged
  CHECK(with_pad.per_fold_accuracy == without.per_fold_accuracy);
  for (double a : with_pad.per_fold_accuracy) CHECK(std::isfinite(a));
}

TEST_CASE("scoring requires ground truth and a sane fold count") {
  PartialLabelDataset ds = corrupted_blobs(20, 3, 2, 6.0, 59, 0.5, 1, 60);
  Hyperparams hp;
  EvalOptions opts;
  opts.folds = 4;

  PartialLabelDataset blind = ds;
  blind.ground_truth.reset();
  CHECK(thrown_code([&] { cross_validate(blind, hp, opts); }) ==
        ErrorCode::MissingGroundTruth);

  opts.folds = 1;
  CHECK(thrown_code([&] { cross_validate(ds, hp, opts); }) ==
        ErrorCode::BadFoldCount);
  opts.folds = 21;
  CHECK(thrown_code([&] { cross_validate(ds, hp, opts); }) ==
        ErrorCode::BadFoldCount);
}

TEST_CASE("the alpha search grid is fixed and ascending") {
  const std::vector<double> grid = alpha_search_grid();
  REQUIRE(grid.size() == 4);
  CHECK(grid == std::vector<double>{2e-3, 2e-2, 2e-1, 2e0});
  CHECK(std::is_sorted(grid.begin(), grid.end()));
}

TEST_CASE("in-fold alpha selection produces a valid deterministic score") {
  const PartialLabelDataset ds = corrupted_blobs(24, 3, 2, 4.0, 61, 0.5, 1, 62);
  Hyperparams hp;
  hp.iter_max = 30;
  EvalOptions opts;
  opts.folds = 3;
  opts.seed = 4;
  opts.grid_alpha = true;
  const EvalResult a = cross_validate(ds, hp, opts);
  const EvalResult b = cross_validate(ds, hp, opts);
  REQUIRE(a.per_fold_accuracy.size() == 3);
  CHECK(a.mean >= 0.0);
  CHECK(a.mean <= 1.0);
  CHECK(a.per_fold_accuracy == b.per_fold_accuracy);
}

TEST_CASE("sweep protocols have stable names") {
  CHECK(std::string(to_string(SweepProtocol::R1)) == "r1");
  CHECK(std::string(to_string(SweepProtocol::R2)) == "r2");
  CHECK(std::string(to_string(SweepProtocol::R3)) == "r3");
  CHECK(std::string(to_string(SweepProtocol::Eps)) == "eps");
}

TEST_CASE("a sweep scores both methods at every grid value") {
  const PartialLabelDataset clean = make_blobs(30, 4, 3, 6.0, 43);
  Hyperparams hp;
  hp.iter_max = 40;
  const std::vector<double> grid = {0.1, 0.5};
  const auto points = run_sweep(clean, SweepProtocol::R1, grid, hp, 3, 8);
  REQUIRE(points.size() == 2);
  for (std::size_t i = 0; i < points.size(); ++i) {
    CHECK(points[i].value == grid[i]);
    REQUIRE(points[i].hera.per_fold_accuracy.size() == 3);
    REQUIRE(points[i].plknn.per_fold_accuracy.size() == 3);
    CHECK(points[i].hera.mean >= 0.0);
    CHECK(points[i].hera.mean <= 1.0);
    CHECK(points[i].plknn.mean >= 0.0);
    CHECK(points[i].plknn.mean <= 1.0);
  }

  const auto again = run_sweep(clean, SweepProtocol::R1, grid, hp, 3, 8);
  for (std::size_t i = 0; i < points.size(); ++i) {
    CHECK(points[i].hera.per_fold_accuracy == again[i].hera.per_fold_accuracy);
    CHECK(points[i].plknn.per_fold_accuracy == again[i].plknn.per_fold_accuracy);
  }
}

TEST_CASE("a coupling sweep runs at full corruption") {
  const PartialLabelDataset clean = make_blobs(24, 3, 3, 6.0, 45);
  Hyperparams hp;
  hp.iter_max = 30;
  const auto points = run_sweep(clean, SweepProtocol::Eps, {0.5}, hp, 3, 8);
  REQUIRE(points.size() == 1);
  CHECK(points[0].value == 0.5);
  CHECK(points[0].hera.per_fold_accuracy.size() == 3);
}

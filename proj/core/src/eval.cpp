#include "hera/eval.hpp"

#include "hera/predict.hpp"
#include "hera/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace hera {

namespace {

PartialLabelDataset subset_columns(const PartialLabelDataset& ds,
                                   const std::vector<int>& indices) {
  PartialLabelDataset out;
  const auto m = static_cast<Index>(indices.size());
  out.features.resize(ds.feature_dim(), m);
  out.candidates.resize(ds.num_labels(), m);
  IntVector truth(ds.ground_truth ? m : 0);
  for (Index t = 0; t < m; ++t) {
    const int j = indices[static_cast<std::size_t>(t)];
    out.features.col(t) = ds.features.col(j);
    out.candidates.col(t) = ds.candidates.col(j);
    if (ds.ground_truth) truth(t) = (*ds.ground_truth)(j);
  }
  if (ds.ground_truth) out.ground_truth = std::move(truth);
  return out;
}

struct Standardizer {
  Vector mean;
  Vector scale;

  static Standardizer fit(const Matrix& features) {
    Standardizer s;
    s.mean = features.rowwise().mean();
    const Matrix centered = features.colwise() - s.mean;
    s.scale = (centered.array().square().rowwise().mean()).sqrt();
    for (Index i = 0; i < s.scale.size(); ++i) {
      if (s.scale(i) == 0.0) s.scale(i) = 1.0;
    }
    return s;
  }

  Matrix apply(const Matrix& features) const {
    return (features.colwise() - mean).array().colwise() / scale.array();
  }
};

std::uint64_t inner_seed(std::uint64_t seed, int fold) {
  return seed + 1000003ull * static_cast<std::uint64_t>(fold + 1);
}

double select_alpha(const PartialLabelDataset& train, const Hyperparams& hp,
                    std::uint64_t seed);

double fold_accuracy(const PartialLabelDataset& train, const Matrix& queries,
                     const IntVector& truth, const Hyperparams& hp,
                     const EvalOptions& opts, int fold) {
  const int k = std::min<int>(hp.k_neighbors, static_cast<int>(train.num_instances()));
  std::vector<int> predicted;
  if (opts.method == Method::PlKnn) {
    predicted.reserve(static_cast<std::size_t>(queries.cols()));
    for (Index j = 0; j < queries.cols(); ++j) {
      predicted.push_back(plknn_predict(train, queries.col(j), k));
    }
  } else {
    Hyperparams local = hp;
    if (opts.grid_alpha) {
      local.alpha = select_alpha(train, hp, inner_seed(opts.seed, fold));
    }
    const FitResult result = fit(train, local);
    predicted = predict_batch(queries, train, result.model, result.state.confidence, k);
  }
  Index correct = 0;
  for (Index j = 0; j < queries.cols(); ++j) {
    if (predicted[static_cast<std::size_t>(j)] == truth(j)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(queries.cols());
}

double select_alpha(const PartialLabelDataset& train, const Hyperparams& hp,
                    std::uint64_t seed) {
  const int n = static_cast<int>(train.num_instances());
  const int folds = std::min(3, n);
  if (folds < 2) return hp.alpha;
  double best_alpha = hp.alpha;
  double best_mean = -1.0;
  for (const double alpha : alpha_search_grid()) {
    Hyperparams probe = hp;
    probe.alpha = alpha;
    EvalOptions opts;
    opts.folds = folds;
    opts.seed = seed;
    opts.method = Method::Hera;
    const EvalResult r = cross_validate(train, probe, opts);
    if (r.mean > best_mean) {
      best_mean = r.mean;
      best_alpha = alpha;
    }
  }
  return best_alpha;
}

}  // namespace

EvalResult make_eval_result(std::vector<double> per_fold_accuracy) {
  EvalResult r;
  r.per_fold_accuracy = std::move(per_fold_accuracy);
  const auto k = static_cast<double>(r.per_fold_accuracy.size());
  if (k == 0) return r;
  r.mean = std::accumulate(r.per_fold_accuracy.begin(), r.per_fold_accuracy.end(), 0.0) / k;
  double ss = 0.0;
  for (const double a : r.per_fold_accuracy) ss += (a - r.mean) * (a - r.mean);
  r.std_dev = std::sqrt(ss / k);
  return r;
}

int plknn_predict(const PartialLabelDataset& train, const Vector& query, int k) {
  const Index n = train.num_instances();
  if (query.size() != train.feature_dim()) {
    throw Error(ErrorCode::ShapeMismatch, "query dimension does not match the dataset");
  }
  if (k < 1 || k > n) {
    throw Error(ErrorCode::KTooLarge,
                "k = " + std::to_string(k) + " with " + std::to_string(n) + " instances");
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::vector<double> dist2(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    dist2[static_cast<std::size_t>(i)] = (train.features.col(i) - query).squaredNorm();
  }
  std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](Index a, Index b) {
    const double da = dist2[static_cast<std::size_t>(a)];
    const double db = dist2[static_cast<std::size_t>(b)];
    return da < db || (da == db && a < b);
  });
  Vector votes = Vector::Zero(train.num_labels());
  for (int t = 0; t < k; ++t) {
    votes += train.candidates.col(order[static_cast<std::size_t>(t)]);
  }
  Index best = 0;
  for (Index i = 1; i < votes.size(); ++i) {
    if (votes(i) > votes(best)) best = i;
  }
  return static_cast<int>(best);
}

std::vector<double> alpha_search_grid() { return {2e-3, 2e-2, 2e-1, 2e0}; }

EvalResult cross_validate(const PartialLabelDataset& ds, const Hyperparams& hp,
                          const EvalOptions& opts, const FoldObserver& observer) {
  validate_dataset(ds);
  hp.validate();
  if (!ds.ground_truth) {
    throw Error(ErrorCode::MissingGroundTruth, "scoring needs ground truth");
  }
  const auto splits =
      kfold_split(static_cast<int>(ds.num_instances()), opts.folds, opts.seed);

  std::vector<double> accuracies;
  accuracies.reserve(splits.size());
  for (std::size_t f = 0; f < splits.size(); ++f) {
    const FoldSplit& split = splits[f];
    PartialLabelDataset train = subset_columns(ds, split.train);
    Matrix queries(ds.feature_dim(), static_cast<Index>(split.test.size()));
    IntVector truth(static_cast<Index>(split.test.size()));
    for (std::size_t t = 0; t < split.test.size(); ++t) {
      queries.col(static_cast<Index>(t)) = ds.features.col(split.test[t]);
      truth(static_cast<Index>(t)) = (*ds.ground_truth)(split.test[t]);
    }
    if (opts.standardize) {
      const Standardizer s = Standardizer::fit(train.features);
      train.features = s.apply(train.features);
      queries = s.apply(queries);
    }
    const double acc =
        fold_accuracy(train, queries, truth, hp, opts, static_cast<int>(f));
    if (observer) observer(static_cast<int>(f), split, acc);
    accuracies.push_back(acc);
  }
  return make_eval_result(std::move(accuracies));
}

const char* to_string(SweepProtocol protocol) {
  switch (protocol) {
    case SweepProtocol::R1: return "r1";
    case SweepProtocol::R2: return "r2";
    case SweepProtocol::R3: return "r3";
    case SweepProtocol::Eps: return "eps";
  }
  return "?";
}

std::vector<SweepPoint> run_sweep(const PartialLabelDataset& clean,
                                  SweepProtocol protocol,
                                  const std::vector<double>& grid,
                                  const Hyperparams& hp, int folds,
                                  std::uint64_t seed) {
  std::vector<SweepPoint> points;
  points.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double value = grid[i];
    CorruptionSpec spec;
    spec.seed = seed + i;
    switch (protocol) {
      case SweepProtocol::R1: spec.p = value; spec.r = 1; break;
      case SweepProtocol::R2: spec.p = value; spec.r = 2; break;
      case SweepProtocol::R3: spec.p = value; spec.r = 3; break;
      case SweepProtocol::Eps: spec.p = 1.0; spec.r = 1; spec.epsilon = value; break;
    }
    const PartialLabelDataset corrupted = corrupt(clean, spec);

    EvalOptions opts;
    opts.folds = folds;
    opts.seed = seed;
    opts.method = Method::Hera;
    SweepPoint point;
    point.value = value;
    point.hera = cross_validate(corrupted, hp, opts);
    opts.method = Method::PlKnn;
    point.plknn = cross_validate(corrupted, hp, opts);
    points.push_back(std::move(point));
  }
  return points;
}

}  // namespace hera

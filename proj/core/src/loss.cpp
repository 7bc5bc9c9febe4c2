#include "hera/loss.hpp"

#include "hera/prox.hpp"

#include <cmath>
#include <string>

namespace hera {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::ShapeMismatch, what);
}

void check_model_shapes(const PartialLabelDataset& ds, const Matrix& weights,
                        const Matrix& confidence) {
  require(weights.rows() == ds.feature_dim() && weights.cols() == ds.num_labels(),
          "weights must be d x q");
  require(confidence.rows() == ds.num_labels() && confidence.cols() == ds.num_instances(),
          "confidence must be q x n");
}

void check_state_shapes(const PartialLabelDataset& ds, const ConfidenceState& cs) {
  const Index q = ds.num_labels();
  const Index n = ds.num_instances();
  for (const Matrix* m :
       {&cs.confidence, &cs.noise, &cs.auxiliary, &cs.multiplier_m, &cs.multiplier_n}) {
    require(m->rows() == q && m->cols() == n, "state matrices must be q x n");
  }
}

}  // namespace

double rank_loss_scalar(double x) {
  if (x >= 0.0) return std::log1p(std::exp(-x));
  return -x + std::log1p(std::exp(x));
}

namespace detail {

double ranking_loss_scores(const Matrix& scores, const Matrix& confidence) {
  const Index q = confidence.rows();
  const double gamma = static_cast<double>(q) * static_cast<double>(q);
  double total = 0.0;
  for (Index j = 0; j < q; ++j) {
    for (Index k = j + 1; k < q; ++k) {
      const Eigen::ArrayXd dp = (confidence.row(j) - confidence.row(k)).transpose().array();
      const Eigen::ArrayXd m = (scores.row(j) - scores.row(k)).transpose().array();
      // margin squares are nonnegative, so ln(1+exp(-m^2)) never overflows
      const Eigen::ArrayXd l = (-m.square()).exp().log1p();
      total += (dp.square() * l).sum();
    }
  }
  // an ordered (j,k) pass would visit each unordered pair twice
  return 2.0 * total / gamma;
}

double p_objective_scores(const Matrix& scores, const Matrix& confidence,
                          const Matrix& candidates, const Matrix& noise,
                          const Matrix& auxiliary, const Matrix& multiplier_m,
                          const Matrix& multiplier_n, double alpha, double lambda,
                          double rho) {
  double value = ranking_loss_scores(scores, confidence);
  value += 0.5 * alpha * (confidence - scores).squaredNorm();
  const Matrix residual_d = candidates - confidence - noise;
  const Matrix residual_a = confidence - auxiliary;
  value += multiplier_m.cwiseProduct(residual_d).sum();
  value += multiplier_n.cwiseProduct(residual_a).sum();
  value += 0.5 * lambda * residual_d.squaredNorm();
  value += 0.5 * rho * residual_a.squaredNorm();
  return value;
}

Matrix grad_p_scores(const Matrix& scores, const Matrix& confidence,
                     const Matrix& candidates, const Matrix& noise,
                     const Matrix& auxiliary, const Matrix& multiplier_m,
                     const Matrix& multiplier_n, double alpha, double lambda,
                     double rho) {
  const Index q = confidence.rows();
  const double gamma = static_cast<double>(q) * static_cast<double>(q);
  Matrix g = alpha * (confidence - scores);
  g -= multiplier_m;
  g += multiplier_n;
  g -= lambda * (candidates - confidence - noise);
  g += rho * (confidence - auxiliary);
  for (Index j = 0; j < q; ++j) {
    for (Index k = j + 1; k < q; ++k) {
      const Eigen::ArrayXd dp = (confidence.row(j) - confidence.row(k)).transpose().array();
      const Eigen::ArrayXd m = (scores.row(j) - scores.row(k)).transpose().array();
      const Eigen::ArrayXd l = (-m.square()).exp().log1p();
      // (4/gamma) folds in the ordered-pair double count
      const Eigen::RowVectorXd r = ((4.0 / gamma) * dp * l).matrix().transpose();
      g.row(j) += r;
      g.row(k) -= r;
    }
  }
  return g;
}

}  // namespace detail

double ranking_loss(const PartialLabelDataset& ds, const Matrix& weights,
                    const Matrix& confidence) {
  check_model_shapes(ds, weights, confidence);
  return detail::ranking_loss_scores(weights.transpose() * ds.features, confidence);
}

double heterogeneous_loss(const PartialLabelDataset& ds, const Matrix& weights,
                          const Matrix& confidence, double alpha) {
  check_model_shapes(ds, weights, confidence);
  const Matrix scores = weights.transpose() * ds.features;
  return detail::ranking_loss_scores(scores, confidence) +
         0.5 * alpha * (confidence - scores).squaredNorm();
}

LossBreakdown augmented_objective(const PartialLabelDataset& ds, const Matrix& weights,
                                  const ConfidenceState& cs, const Hyperparams& hp,
                                  double lambda, double rho) {
  check_model_shapes(ds, weights, cs.confidence);
  check_state_shapes(ds, cs);
  const Matrix scores = weights.transpose() * ds.features;
  LossBreakdown b;
  b.ranking = detail::ranking_loss_scores(scores, cs.confidence);
  b.reconstruction = 0.5 * hp.alpha * (cs.confidence - scores).squaredNorm();
  b.model_complexity = hp.beta * weights.squaredNorm();
  b.sparsity = hp.mu * cs.auxiliary.cwiseAbs().sum();
  b.nuclear = hp.nu * nuclear_norm(cs.noise);
  const Matrix residual_d = ds.candidates - cs.confidence - cs.noise;
  const Matrix residual_a = cs.confidence - cs.auxiliary;
  b.lagrangian_extras = cs.multiplier_m.cwiseProduct(residual_d).sum() +
                        cs.multiplier_n.cwiseProduct(residual_a).sum() +
                        0.5 * lambda * residual_d.squaredNorm() +
                        0.5 * rho * residual_a.squaredNorm();
  b.total = b.ranking + b.reconstruction + b.model_complexity + b.sparsity + b.nuclear +
            b.lagrangian_extras;
  return b;
}

Matrix grad_w(const PartialLabelDataset& ds, const Matrix& weights,
              const Matrix& confidence, const Hyperparams& hp) {
  check_model_shapes(ds, weights, confidence);
  const Index q = confidence.rows();
  const double gamma = static_cast<double>(q) * static_cast<double>(q);
  const Matrix& X = ds.features;
  const Matrix scores = weights.transpose() * X;

  Matrix g = 2.0 * hp.beta * weights;
  if (hp.alpha != 0.0) {
    g.noalias() += hp.alpha * (X * (X.transpose() * weights - confidence.transpose()));
  }
  for (Index j = 0; j < q; ++j) {
    for (Index k = j + 1; k < q; ++k) {
      const Eigen::ArrayXd dp = (confidence.row(j) - confidence.row(k)).transpose().array();
      const Eigen::ArrayXd m = (scores.row(j) - scores.row(k)).transpose().array();
      const Eigen::ArrayXd t = (-m.square()).exp();
      const Eigen::ArrayXd sig = t / (1.0 + t);  // logistic of -m^2
      const Vector coef = ((4.0 / gamma) * dp.square() * sig * m).matrix();
      const Vector xc = X * coef;
      g.col(j) -= xc;
      g.col(k) += xc;
    }
  }
  return g;
}

Matrix grad_p(const PartialLabelDataset& ds, const Matrix& weights,
              const ConfidenceState& cs, const Hyperparams& hp, double lambda,
              double rho) {
  check_model_shapes(ds, weights, cs.confidence);
  check_state_shapes(ds, cs);
  return detail::grad_p_scores(weights.transpose() * ds.features, cs.confidence,
                               ds.candidates, cs.noise, cs.auxiliary, cs.multiplier_m,
                               cs.multiplier_n, hp.alpha, lambda, rho);
}

}  // namespace hera

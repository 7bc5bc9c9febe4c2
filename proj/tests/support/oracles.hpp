#pragma once

// Slow reference implementations the tests compare the library against.
// Everything here is written as literal loop translations, independent of the
// vectorized code paths under test.

#include <Eigen/Core>
#include <Eigen/SVD>

#include <cmath>
#include <functional>

#include "hera/rng.hpp"
#include "hera/types.hpp"

namespace oracle {

inline double ranking_loss(const hera::Matrix& X, const hera::Matrix& W,
                           const hera::Matrix& P) {
  const Eigen::Index q = P.rows();
  const Eigen::Index n = P.cols();
  const double gamma = double(q) * double(q);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < q; ++j) {
      for (Eigen::Index k = 0; k < q; ++k) {
        if (j == k) continue;
        const double dp = P(j, i) - P(k, i);
        const double m = (W.col(j) - W.col(k)).dot(X.col(i));
        total += (1.0 / gamma) * dp * dp * std::log(1.0 + std::exp(-m * m));
      }
    }
  }
  return total;
}

inline double heterogeneous_loss(const hera::Matrix& X, const hera::Matrix& W,
                                 const hera::Matrix& P, double alpha) {
  double recon = 0.0;
  const hera::Matrix R = P - W.transpose() * X;
  for (Eigen::Index i = 0; i < R.size(); ++i) recon += R(i) * R(i);
  return ranking_loss(X, W, P) + 0.5 * alpha * recon;
}

inline double nuclear_norm(const hera::Matrix& A) {
  Eigen::JacobiSVD<hera::Matrix> svd(A);
  return svd.singularValues().sum();
}

// Term-by-term augmented objective: heterogeneous loss, weight decay, l1 on
// J, nuclear on E, both multiplier traces, both quadratic penalties.
inline double augmented_objective(const hera::Matrix& X, const hera::Matrix& Y,
                                  const hera::Matrix& W, const hera::Matrix& P,
                                  const hera::Matrix& E, const hera::Matrix& J,
                                  const hera::Matrix& M, const hera::Matrix& N,
                                  const hera::Hyperparams& hp, double lambda,
                                  double rho) {
  double total = heterogeneous_loss(X, W, P, hp.alpha);
  total += hp.beta * W.squaredNorm();
  total += hp.mu * J.cwiseAbs().sum();
  total += hp.nu * nuclear_norm(E);
  const hera::Matrix rd = Y - P - E;
  const hera::Matrix ra = P - J;
  total += (M.cwiseProduct(rd)).sum() + (N.cwiseProduct(ra)).sum();
  total += 0.5 * lambda * rd.squaredNorm() + 0.5 * rho * ra.squaredNorm();
  return total;
}

// Central finite differences of a scalar function of a matrix argument.
inline hera::Matrix fd_gradient(const std::function<double(const hera::Matrix&)>& f,
                                const hera::Matrix& at, double eps = 1e-5) {
  hera::Matrix g(at.rows(), at.cols());
  hera::Matrix x = at;
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    const double save = x(i);
    x(i) = save + eps;
    const double up = f(x);
    x(i) = save - eps;
    const double down = f(x);
    x(i) = save;
    g(i) = (up - down) / (2.0 * eps);
  }
  return g;
}

// Three-stage grid search for argmin_z 0.5 (z - v)^2 + eps |z|; resolution
// well below 1e-6 on unit-scale inputs.
inline double grid_prox_l1(double v, double eps) {
  const auto h = [&](double z) { return 0.5 * (z - v) * (z - v) + eps * std::abs(z); };
  double lo = -std::abs(v) - eps - 1.0;
  double hi = std::abs(v) + eps + 1.0;
  double best = 0.0;
  for (int stage = 0; stage < 3; ++stage) {
    const double step = (hi - lo) / 4000.0;
    double best_val = h(lo);
    best = lo;
    for (int i = 1; i <= 4000; ++i) {
      const double z = lo + step * i;
      const double val = h(z);
      if (val < best_val) {
        best_val = val;
        best = z;
      }
    }
    lo = best - step;
    hi = best + step;
  }
  return best;
}

inline hera::Matrix uniform_matrix(hera::Rng& rng, Eigen::Index rows,
                                   Eigen::Index cols, double lo = -1.0,
                                   double hi = 1.0) {
  hera::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i)
    m(i) = lo + (hi - lo) * rng.next_double();
  return m;
}

// Random dataset with features in [-1, 1], a uniform true label per column,
// and each false label joining the candidate set with probability 0.4.
inline hera::PartialLabelDataset random_partial_dataset(hera::Rng& rng, int d,
                                                        int q, int n) {
  hera::PartialLabelDataset ds;
  ds.features = uniform_matrix(rng, d, n);
  ds.candidates = hera::Matrix::Zero(q, n);
  ds.ground_truth.emplace(n);
  for (int i = 0; i < n; ++i) {
    const int truth = int(rng.bounded(std::uint64_t(q)));
    (*ds.ground_truth)[i] = truth;
    ds.candidates(truth, i) = 1.0;
    for (int l = 0; l < q; ++l)
      if (l != truth && rng.next_double() < 0.4) ds.candidates(l, i) = 1.0;
  }
  return ds;
}

}  // namespace oracle

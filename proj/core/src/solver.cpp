#include "hera/solver.hpp"

#include "hera/prox.hpp"

#include <cmath>
#include <functional>
#include <string>

namespace hera {

namespace {

constexpr int kMaxHalvings = 30;

struct Step {
  Matrix iterate;
  double objective;
};

// One descent step with backtracking: start at eta0 and halve until the
// objective stops increasing. If no step length works, stay put.
Step backtracked_step(const Matrix& x, double fx, const Matrix& grad, double eta0,
                      const std::function<double(const Matrix&)>& objective) {
  double eta = eta0;
  for (int h = 0; h <= kMaxHalvings; ++h) {
    Matrix candidate = x - eta * grad;
    if (candidate.allFinite()) {
      const double f = objective(candidate);
      if (std::isfinite(f) && f <= fx) return {std::move(candidate), f};
    }
    eta *= 0.5;
  }
  return {x, fx};
}

void check_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::NonFiniteIterate, std::string(what) + " became non-finite");
  }
}

}  // namespace

Matrix step_w(const PartialLabelDataset& ds, Matrix weights, const Matrix& confidence,
              const Hyperparams& hp) {
  const auto objective = [&](const Matrix& w) {
    return heterogeneous_loss(ds, w, confidence, hp.alpha) + hp.beta * w.squaredNorm();
  };
  double f = objective(weights);
  for (int s = 0; s < hp.inner_steps; ++s) {
    const Matrix g = grad_w(ds, weights, confidence, hp);
    check_finite(g, "W gradient");
    Step step = backtracked_step(weights, f, g, hp.eta_w, objective);
    weights = std::move(step.iterate);
    f = step.objective;
  }
  check_finite(weights, "W");
  return weights;
}

Matrix step_p(const PartialLabelDataset& ds, const Matrix& weights,
              const ConfidenceState& cs, const Hyperparams& hp, double lambda,
              double rho) {
  const Matrix scores = weights.transpose() * ds.features;
  const auto objective = [&](const Matrix& p) {
    return detail::p_objective_scores(scores, p, ds.candidates, cs.noise, cs.auxiliary,
                                      cs.multiplier_m, cs.multiplier_n, hp.alpha, lambda,
                                      rho);
  };
  Matrix confidence = cs.confidence;
  double f = objective(confidence);
  for (int s = 0; s < hp.inner_steps; ++s) {
    const Matrix g =
        detail::grad_p_scores(scores, confidence, ds.candidates, cs.noise, cs.auxiliary,
                              cs.multiplier_m, cs.multiplier_n, hp.alpha, lambda, rho);
    check_finite(g, "P gradient");
    Step step = backtracked_step(confidence, f, g, hp.eta_p, objective);
    confidence = std::move(step.iterate);
    f = step.objective;
  }
  check_finite(confidence, "P");
  return project_nonneg(confidence);
}

Matrix step_j(const ConfidenceState& cs, double mu, double rho) {
  return shrink(cs.confidence + cs.multiplier_n / rho, mu / rho);
}

Matrix step_e(const PartialLabelDataset& ds, const ConfidenceState& cs, double nu,
              double lambda) {
  return project_nonneg(
      svt(ds.candidates - cs.confidence + cs.multiplier_m / lambda, nu / lambda));
}

void update_duals(const PartialLabelDataset& ds, ConfidenceState& cs, double& lambda,
                  double& rho, const Hyperparams& hp) {
  cs.multiplier_m += lambda * (ds.candidates - cs.confidence - cs.noise);
  cs.multiplier_n += rho * (cs.confidence - cs.auxiliary);
  lambda = std::min(hp.lambda_max, hp.tau * lambda);
  rho = std::min(hp.rho_max, hp.tau * rho);
}

FitResult fit(const PartialLabelDataset& ds, const Hyperparams& hp,
              const IterationSink& sink) {
  hp.validate();
  auto [model, cs] = init_state(ds);
  double lambda = hp.lambda0;
  double rho = hp.rho0;

  SolveReport report;
  double previous = augmented_objective(ds, model.weights, cs, hp, lambda, rho).total;

  for (int t = 1; t <= hp.iter_max; ++t) {
    try {
      model.weights = step_w(ds, std::move(model.weights), cs.confidence, hp);
      cs.confidence = step_p(ds, model.weights, cs, hp, lambda, rho);
      cs.auxiliary = step_j(cs, hp.mu, rho);
      cs.noise = step_e(ds, cs, hp.nu, lambda);
      update_duals(ds, cs, lambda, rho, hp);

      const LossBreakdown b = augmented_objective(ds, model.weights, cs, hp, lambda, rho);
      const double residual_d = (ds.candidates - cs.confidence - cs.noise).norm();
      const double residual_a = (cs.confidence - cs.auxiliary).norm();
      report.iterations = t;
      report.loss_trace.push_back(b.total);
      report.feasibility_trace.emplace_back(residual_d, residual_a);
      if (sink) sink({t, b.total, residual_d, residual_a, lambda, rho});

      if (std::abs(b.total - previous) <= hp.loss_tol) {
        report.converged = true;
        break;
      }
      previous = b.total;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NonFiniteIterate || e.code() == ErrorCode::SvdFailure) {
        throw Error(e.code(), "outer iteration " + std::to_string(t) + ": " + e.what());
      }
      throw;
    }
  }
  return {std::move(model), std::move(cs), std::move(report)};
}

}  // namespace hera

#include "odeup/odefilter.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "odeup/error.hpp"

namespace odeup {

void SolverConfig::validate() const {
  if (q < 1) {
    throw Error(ErrorCode::InvalidArgument, "solver needs q ≥ 1");
  }
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw Error(ErrorCode::NonPositiveStep, "solver step must be positive and finite");
  }
  if (!(kappa2 > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "kappa2 must be positive");
  }
}

Gaussian ODESolution::solution_marginal(std::size_t k) const {
  const Matrix e0 = projection(prior, 0);
  const Gaussian& s = states.at(k);
  return Gaussian(e0 * s.mean(), linalg::triangularize(e0 * s.cov_sqrt()));
}

std::vector<double> make_grid(double t0, double t1, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorCode::NonPositiveStep, "grid step must be positive and finite");
  }
  if (!(t1 > t0)) {
    throw Error(ErrorCode::InvalidArgument, "grid needs t1 > t0");
  }
  const double ratio = (t1 - t0) / h;
  const double nearest = std::round(ratio);
  std::vector<double> times;
  if (nearest >= 1.0 && std::abs(ratio - nearest) <= 1e-12 * std::max(1.0, ratio)) {
    const auto n = static_cast<std::size_t>(nearest);
    times.reserve(n + 1);
    for (std::size_t k = 0; k < n; ++k) {
      times.push_back(t0 + static_cast<double>(k) * h);
    }
  } else {
    const auto full = static_cast<std::size_t>(std::floor(ratio));
    times.reserve(full + 2);
    for (std::size_t k = 0; k <= full; ++k) {
      times.push_back(t0 + static_cast<double>(k) * h);
    }
  }
  times.push_back(t1);
  return times;
}

Gaussian initialize(const ConcreteIVP& ivp, int q, bool diffuse_fallback) {
  const int d = ivp.dim();
  const int supplied = diffuse_fallback ? std::min(q, ivp.max_derivative_order()) : q;
  const std::vector<Vector> derivs = solution_derivatives(ivp, supplied);

  const int stride = q + 1;
  Vector mean = Vector::Zero(d * stride);
  Matrix cov_sqrt = Matrix::Zero(d * stride, d * stride);
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k <= q; ++k) {
      const int idx = i * stride + k;
      if (k <= supplied) {
        mean[idx] = derivs[static_cast<std::size_t>(k)][i];
      } else {
        cov_sqrt(idx, idx) = std::sqrt(kDiffuseVariance);
      }
    }
  }
  return Gaussian(std::move(mean), std::move(cov_sqrt));
}

namespace {

// Everything about a step that depends only on h.
struct StepModel {
  double h = 0.0;
  Matrix phi;
  Matrix noise_sqrt;
};

StepModel make_step_model(const IWPPrior& prior, double h) { return {h, transition(prior, h), process_noise_sqrt(prior, h)}; }

StepResult step_with(const Gaussian& state, const ConcreteIVP& ivp, const StepModel& model, const Matrix& e0,
                     const Matrix& e1, double t, Linearization linearization) {
  const Eigen::Index d = e0.rows();
  Gaussian predicted = affine_predict(state, model.phi, Vector::Zero(model.phi.rows()), model.noise_sqrt);
  const double t_next = t + model.h;
  const Vector y = e0 * predicted.mean();
  Vector residual = e1 * predicted.mean() - ivp.eval(y, t_next);
  Matrix obs = e1;
  if (linearization == Linearization::EK1) {
    obs -= ivp.jacobian(y, t_next) * e0;
  }
  Conditioned cond = condition_linear(predicted, obs, residual, Matrix::Zero(d, d));
  return {std::move(predicted), std::move(cond.posterior), std::move(residual), std::move(cond.innovation_sqrt)};
}

void check_pivots(const Matrix& lower, ErrorCode code, const char* what, std::size_t index) {
  const Vector diag = lower.diagonal();
  const double largest = diag.maxCoeff();
  if (!(largest > 0.0) || diag.minCoeff() <= 1e-14 * largest) {
    throw Error(code, what, index);
  }
}

}  // namespace

StepResult ek_step(const Gaussian& state, const ConcreteIVP& ivp, const IWPPrior& prior, double t, double h,
                   Linearization linearization) {
  if (state.dim() != prior.state_dim() || prior.d != ivp.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "state, prior and problem dimensions disagree");
  }
  const StepModel model = make_step_model(prior, h);
  return step_with(state, ivp, model, projection(prior, 0), projection(prior, 1), t, linearization);
}

double calibrate(const std::vector<Vector>& residuals, const std::vector<Matrix>& innovation_sqrts, int d,
                 std::size_t n) {
  if (residuals.size() != n || innovation_sqrts.size() != n || n == 0 || d < 1) {
    throw Error(ErrorCode::InvalidArgument, "calibrate needs n ≥ 1 residuals and innovation factors");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Matrix& s = innovation_sqrts[k];
    const Vector diag = s.diagonal();
    if (diag.size() == 0 || !(diag.minCoeff() > 0.0)) {
      throw Error(ErrorCode::DegenerateResidual, "innovation covariance is singular", k);
    }
    const Vector w = s.triangularView<Eigen::Lower>().solve(residuals[k]);
    sum += w.squaredNorm();
  }
  const double kappa2 = sum / (static_cast<double>(n) * d);
  return std::max(kappa2, kMinDiffusion);
}

std::vector<Gaussian> smooth(const std::vector<Gaussian>& filtered, const std::vector<Gaussian>& predicted,
                             const IWPPrior& prior, const std::vector<double>& steps) {
  const std::size_t n = filtered.size();
  if (n == 0 || predicted.size() + 1 != n || steps.size() + 1 != n) {
    throw Error(ErrorCode::InvalidArgument, "smooth needs N filtered, N−1 predicted states and N−1 steps");
  }
  std::vector<Gaussian> out(n);
  out[n - 1] = filtered[n - 1];
  if (n == 1) {
    return out;
  }
  const Eigen::Index dim = filtered.front().dim();
  const Matrix identity = Matrix::Identity(dim, dim);
  StepModel model;
  for (std::size_t k = n - 1; k-- > 0;) {
    if (model.h != steps[k]) {
      model = make_step_model(prior, steps[k]);
    }
    const Gaussian& filt = filtered[k];
    const Gaussian& pred = predicted[k];
    const Matrix& pred_sqrt = pred.cov_sqrt();
    check_pivots(pred_sqrt, ErrorCode::SingularPrediction, "predicted covariance is singular", k + 1);

    // G = Σₖ Φᵀ (Σ⁻ₖ₊₁)⁻¹ via two triangular solves.
    const Matrix cross = filt.cov_sqrt() * (model.phi * filt.cov_sqrt()).transpose();
    Matrix gain_t = pred_sqrt.triangularView<Eigen::Lower>().solve(cross.transpose());
    pred_sqrt.transpose().triangularView<Eigen::Upper>().solveInPlace(gain_t);
    const Matrix gain = gain_t.transpose();

    Vector mean = filt.mean() + gain * (out[k + 1].mean() - pred.mean());
    Matrix stacked(dim, 3 * dim);
    stacked << (identity - gain * model.phi) * filt.cov_sqrt(), gain * model.noise_sqrt, gain * out[k + 1].cov_sqrt();
    out[k] = Gaussian(std::move(mean), linalg::triangularize(stacked));
  }
  return out;
}

ODESolution solve(const ConcreteIVP& ivp, const SolverConfig& config) {
  config.validate();
  const std::vector<double> times = make_grid(ivp.t0(), ivp.t1(), config.step);
  const std::size_t n_steps = times.size() - 1;

  std::vector<double> steps(n_steps);
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double diff = times[k + 1] - times[k];
    steps[k] = std::abs(diff - config.step) <= 1e-9 * config.step ? config.step : diff;
  }

  IWPPrior prior(ivp.dim(), config.q, config.calibrate ? 1.0 : config.kappa2);
  const Matrix e0 = projection(prior, 0);
  const Matrix e1 = projection(prior, 1);

  std::vector<Gaussian> filtered;
  std::vector<Gaussian> predicted;
  std::vector<Vector> residuals;
  std::vector<Matrix> innovations;
  filtered.reserve(n_steps + 1);
  predicted.reserve(n_steps);
  residuals.reserve(n_steps);
  innovations.reserve(n_steps);
  filtered.push_back(initialize(ivp, config.q, config.diffuse_fallback));

  StepModel model;
  for (std::size_t k = 0; k < n_steps; ++k) {
    if (model.h != steps[k]) {
      model = make_step_model(prior, steps[k]);
    }
    StepResult r;
    try {
      r = step_with(filtered.back(), ivp, model, e0, e1, times[k], config.linearization);
    } catch (const Error& e) {
      throw Error(e.code(), std::string("step to t=") + std::to_string(times[k + 1]) + " failed: " + e.what(), k + 1);
    }
    if (!r.updated.mean().allFinite() || !r.updated.cov_sqrt().allFinite()) {
      throw Error(ErrorCode::NonFiniteState, "filter state became non-finite at t=" + std::to_string(times[k + 1]),
                  k + 1);
    }
    filtered.push_back(std::move(r.updated));
    predicted.push_back(std::move(r.predicted));
    residuals.push_back(std::move(r.residual));
    innovations.push_back(std::move(r.innovation_sqrt));
  }

  double kappa2 = config.kappa2;
  if (config.calibrate) {
    kappa2 = calibrate(residuals, innovations, ivp.dim(), n_steps);
    for (auto& g : filtered) {
      g = g.scaled(kappa2);
    }
    for (auto& g : predicted) {
      g = g.scaled(kappa2);
    }
    prior = prior.with_diffusion(kappa2);
  }

  ODESolution sol;
  sol.times = times;
  sol.states = config.smooth ? smooth(filtered, predicted, prior, steps) : filtered;
  sol.filtered = std::move(filtered);
  sol.kappa2_hat = kappa2;
  sol.config = config;
  sol.prior = prior;
  return sol;
}

}  // namespace odeup

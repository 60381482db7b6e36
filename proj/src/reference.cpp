#include "odeup/reference.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "odeup/error.hpp"
#include "odeup/parallel.hpp"
#include "odeup/quadrature.hpp"

namespace odeup {

namespace {

class Rk4Stepper {
 public:
  explicit Rk4Stepper(const ConcreteIVP& ivp)
      : ivp_(ivp), k1_(ivp.dim()), k2_(ivp.dim()), k3_(ivp.dim()), k4_(ivp.dim()), tmp_(ivp.dim()) {}

  void step(Vector& y, double t, double h) {
    ivp_.eval(y, t, k1_);
    tmp_ = y + 0.5 * h * k1_;
    ivp_.eval(tmp_, t + 0.5 * h, k2_);
    tmp_ = y + 0.5 * h * k2_;
    ivp_.eval(tmp_, t + 0.5 * h, k3_);
    tmp_ = y + h * k3_;
    ivp_.eval(tmp_, t + h, k4_);
    y += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }

 private:
  const ConcreteIVP& ivp_;
  Vector k1_, k2_, k3_, k4_, tmp_;
};

}  // namespace

ReferenceSolution rk4_solve(const ConcreteIVP& ivp, double h, const std::vector<double>& output_grid) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorCode::NonPositiveStep, "RK4 step must be positive and finite");
  }
  ReferenceSolution out;
  out.times = output_grid;
  out.values.reserve(output_grid.size());

  Rk4Stepper stepper(ivp);
  Vector y = ivp.y0();
  double t = ivp.t0();
  for (std::size_t k = 0; k < output_grid.size(); ++k) {
    const double target = output_grid[k];
    const double span = target - t;
    if (span < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "output grid must be nondecreasing and start at or after t0", k);
    }
    if (span > 0.0) {
      const double substeps = std::max(1.0, std::ceil(span / h - 1e-9));
      const double hs = span / substeps;
      const auto count = static_cast<long>(substeps);
      for (long s = 0; s < count; ++s) {
        stepper.step(y, t + static_cast<double>(s) * hs, hs);
      }
      t = target;
    }
    if (!y.allFinite()) {
      throw Error(ErrorCode::NonFiniteState, "RK4 state became non-finite at t=" + std::to_string(target), k);
    }
    out.values.push_back(y);
  }
  return out;
}

MonteCarloReference mc_reference(const IVProblem& problem, const ParameterDistribution& dist,
                                 const MonteCarloOptions& options, const std::vector<double>& output_grid) {
  if (options.n < 2) {
    throw Error(ErrorCode::InvalidArgument, "Monte Carlo reference needs n ≥ 2");
  }
  const QuadratureRule samples = monte_carlo(dist, options.n, options.seed);
  const std::size_t n_times = output_grid.size();
  const Eigen::Index d = problem.dim;
  const auto max_failed = static_cast<std::size_t>(std::floor(options.max_failed_fraction * options.n));

  // Welford accumulation in sample order; samples are solved chunk-wise in parallel.
  std::vector<Vector> mean(n_times, Vector::Zero(d));
  std::vector<Matrix> comoment(n_times, Matrix::Zero(d, d));
  std::size_t used = 0;
  std::size_t failed = 0;

  const std::size_t chunk = 256;
  std::vector<ReferenceSolution> solved(chunk);
  std::vector<char> ok(chunk, 0);
  for (std::size_t begin = 0; begin < options.n; begin += chunk) {
    const std::size_t count = std::min(chunk, options.n - begin);
    parallel_for(count, options.jobs, [&](std::size_t i) {
      const ConcreteIVP ivp = apply_params(problem, samples.nodes[begin + i]);
      try {
        solved[i] = rk4_solve(ivp, options.h, output_grid);
        ok[i] = 1;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NonFiniteState) {
          throw;
        }
        ok[i] = 0;
      }
    });
    for (std::size_t i = 0; i < count; ++i) {
      if (!ok[i]) {
        if (++failed > max_failed) {
          throw Error(ErrorCode::NonFiniteState, "reference trajectory diverged", begin + i);
        }
        continue;
      }
      ++used;
      const double inv = 1.0 / static_cast<double>(used);
      for (std::size_t k = 0; k < n_times; ++k) {
        const Vector& x = solved[i].values[k];
        const Vector before = x - mean[k];
        mean[k] += inv * before;
        comoment[k] += before * (x - mean[k]).transpose();
      }
    }
  }
  if (used < 2) {
    throw Error(ErrorCode::NonFiniteState, "fewer than two reference samples succeeded");
  }

  MonteCarloReference out;
  out.times = output_grid;
  out.samples_used = used;
  out.mean = std::move(mean);
  out.cov.reserve(n_times);
  out.std_error.reserve(n_times);
  for (std::size_t k = 0; k < n_times; ++k) {
    Matrix cov = comoment[k] / static_cast<double>(used - 1);
    cov = 0.5 * (cov + cov.transpose());
    out.std_error.push_back((cov.diagonal() / static_cast<double>(used)).cwiseSqrt());
    out.cov.push_back(std::move(cov));
  }
  return out;
}

ScalarMoments linear_analytic(double a, double b, double y0_mean, double y0_var, double t) {
  const double growth = std::exp(a * t);
  // y(t) = e^{at} y0 + (b/a)(e^{at} − 1); the b/a term degenerates to b·t at a = 0.
  const double shift = a == 0.0 ? b * t : (b / a) * std::expm1(a * t);
  return {growth * y0_mean + shift, growth * growth * y0_var};
}

StateEstimationDemo fig1_demo(double prior_var) {
  if (!(prior_var > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "prior variance must be positive");
  }
  const Matrix one = Matrix::Identity(1, 1);
  const Vector zero = Vector::Zero(1);
  const Matrix noise_sqrt = Matrix::Constant(1, 1, 0.1);
  const double observation = 2.0;

  auto filter_from = [&](const Gaussian& x0) {
    const Gaussian predicted = affine_predict(x0, one, zero, noise_sqrt);
    const Vector residual = predicted.mean() - Vector::Constant(1, observation);
    return condition_linear(predicted, one, residual, noise_sqrt).posterior;
  };

  Gaussian filter = filter_from(make_gaussian(zero, Matrix::Constant(1, 1, prior_var)));

  // Per-x₀ posteriors are affine in x₀ with x₀-independent variance, so the
  // marginal follows from two Dirac runs.
  const Gaussian at0 = filter_from(Gaussian::dirac(Vector::Constant(1, 0.0)));
  const Gaussian at1 = filter_from(Gaussian::dirac(Vector::Constant(1, 1.0)));
  const double slope = at1.mean()[0] - at0.mean()[0];
  const double var = at0.cov()(0, 0) + slope * slope * prior_var;
  Gaussian marginal = make_gaussian(at0.mean(), Matrix::Constant(1, 1, var));
  return {std::move(filter), std::move(marginal)};
}

}  // namespace odeup

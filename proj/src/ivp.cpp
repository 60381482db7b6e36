#include "odeup/ivp.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "odeup/error.hpp"

namespace odeup {

IVProblem IVProblem::with_tspan(double new_t0, double new_t1) const {
  if (!(new_t1 > new_t0) || !std::isfinite(new_t0) || !std::isfinite(new_t1)) {
    throw Error(ErrorCode::InvalidArgument, "time span needs t1 > t0");
  }
  IVProblem copy = *this;
  copy.t0 = new_t0;
  copy.t1 = new_t1;
  return copy;
}

ParameterDistribution::ParameterDistribution(GaussianParams gaussian) : kind_(std::move(gaussian)) {
  const auto& g = std::get<GaussianParams>(kind_);
  if (g.mean.size() == 0 || g.cov.rows() != g.mean.size() || g.cov.cols() != g.mean.size()) {
    throw Error(ErrorCode::ShapeMismatch, "Gaussian parameter covariance must be e×e");
  }
  // psd_factor throws NonPSD for asymmetric or indefinite input.
  (void)linalg::psd_factor(g.cov);
}

ParameterDistribution::ParameterDistribution(UniformBox box) : kind_(std::move(box)) {
  const auto& b = std::get<UniformBox>(kind_);
  if (b.lower.size() == 0 || b.lower.size() != b.upper.size()) {
    throw Error(ErrorCode::ShapeMismatch, "uniform box bounds must have equal nonzero length");
  }
  if (!(b.lower.array() < b.upper.array()).all()) {
    throw Error(ErrorCode::InvalidArgument, "uniform box needs lower < upper in every coordinate");
  }
}

Eigen::Index ParameterDistribution::dim() const {
  return is_gaussian() ? gaussian().mean.size() : uniform().lower.size();
}

Vector ParameterDistribution::mean() const {
  if (is_gaussian()) {
    return gaussian().mean;
  }
  return 0.5 * (uniform().lower + uniform().upper);
}

Matrix ParameterDistribution::cov() const {
  if (is_gaussian()) {
    return gaussian().cov;
  }
  const Vector width = uniform().upper - uniform().lower;
  return (width.array().square() / 12.0).matrix().asDiagonal();
}

ParameterDistribution uniform_counterpart(const ParameterDistribution& dist) {
  if (!dist.is_gaussian()) {
    throw Error(ErrorCode::InvalidArgument, "uniform_counterpart expects a Gaussian distribution");
  }
  const Vector sigma = dist.gaussian().cov.diagonal().cwiseSqrt();
  const Vector& mu = dist.gaussian().mean;
  return ParameterDistribution(UniformBox{mu - 1.96 * sigma, mu + 1.96 * sigma});
}

ParameterDistribution with_isotropic_variance(const ParameterDistribution& dist, double variance) {
  if (!(variance >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "variance must be nonnegative");
  }
  const Eigen::Index e = dist.dim();
  return ParameterDistribution(GaussianParams{dist.mean(), variance * Matrix::Identity(e, e)});
}

ConcreteIVP::ConcreteIVP(IVProblem problem, Vector theta) : problem_(std::move(problem)), theta_(std::move(theta)) {
  if (theta_.size() != problem_.theta_dim) {
    throw Error(ErrorCode::DimensionMismatch, "parameter vector has length " + std::to_string(theta_.size()) +
                                                  ", problem expects " + std::to_string(problem_.theta_dim));
  }
  y0_ = problem_.init_map(theta_);
  if (y0_.size() != problem_.dim) {
    throw Error(ErrorCode::DimensionMismatch, "initial value map returned the wrong dimension");
  }
}

Vector ConcreteIVP::eval(const Vector& y, double t) const {
  Vector out(problem_.dim);
  problem_.f(y, t, theta_, out);
  return out;
}

Matrix ConcreteIVP::jacobian(const Vector& y, double t) const {
  Matrix out(problem_.dim, problem_.dim);
  problem_.jac(y, t, theta_, out);
  return out;
}

int ConcreteIVP::max_derivative_order() const noexcept {
  return problem_.derivative_oracle ? std::max(1, problem_.oracle_max_order) : 1;
}

ConcreteIVP apply_params(const IVProblem& problem, const Vector& theta) { return ConcreteIVP(problem, theta); }

std::vector<Vector> solution_derivatives(const ConcreteIVP& ivp, int up_to) {
  if (up_to < 0) {
    throw Error(ErrorCode::UnsupportedOrder, "derivative order must be nonnegative");
  }
  if (up_to <= 1) {
    std::vector<Vector> out{ivp.y0()};
    if (up_to == 1) {
      out.push_back(ivp.eval(ivp.y0(), ivp.t0()));
    }
    return out;
  }
  if (up_to > ivp.max_derivative_order()) {
    throw Error(ErrorCode::UnsupportedOrder, "problem '" + ivp.problem().name + "' supplies derivatives up to order " +
                                                 std::to_string(ivp.max_derivative_order()));
  }
  return ivp.problem().derivative_oracle(ivp.y0(), ivp.t0(), ivp.theta(), up_to);
}

// Benchmarks. Every derivative oracle is the chain rule applied by hand to
// the vector field, valid up to third order.

namespace {

constexpr int kOracleOrder = 3;

ParameterDistribution gaussian_dist(Vector mean, double variance) {
  const Eigen::Index e = mean.size();
  return ParameterDistribution(GaussianParams{std::move(mean), variance * Matrix::Identity(e, e)});
}

Vector vec1(double a) { return Vector::Constant(1, a); }

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

std::vector<Vector> truncate(std::vector<Vector> derivs, int up_to) {
  derivs.resize(static_cast<std::size_t>(up_to) + 1);
  return derivs;
}

IVProblem make_linear() {
  constexpr double a = 1.0;
  constexpr double b = 0.0;
  IVProblem p;
  p.name = "linear";
  p.dim = 1;
  p.theta_dim = 1;
  p.f = [](const Vector& y, double, const Vector&, Vector& out) { out[0] = a * y[0] + b; };
  p.jac = [](const Vector&, double, const Vector&, Matrix& out) { out(0, 0) = a; };
  p.init_map = [](const Vector& theta) { return theta; };
  p.t0 = 0.0;
  p.t1 = 3.0;
  p.oracle_max_order = kOracleOrder;
  p.derivative_oracle = [](const Vector& y0, double, const Vector&, int up_to) {
    const double d1 = a * y0[0] + b;
    return truncate({y0, vec1(d1), vec1(a * d1), vec1(a * a * d1)}, up_to);
  };
  return p;
}

IVProblem make_logistic() {
  constexpr double a = 3.0;
  IVProblem p;
  p.name = "logistic";
  p.dim = 1;
  p.theta_dim = 1;
  p.f = [](const Vector& y, double, const Vector& theta, Vector& out) { out[0] = a * y[0] * (1.0 - y[0] / theta[0]); };
  p.jac = [](const Vector& y, double, const Vector& theta, Matrix& out) {
    out(0, 0) = a * (1.0 - 2.0 * y[0] / theta[0]);
  };
  p.init_map = [](const Vector&) { return vec1(0.05); };
  p.t0 = 0.0;
  p.t1 = 3.0;
  p.oracle_max_order = kOracleOrder;
  p.derivative_oracle = [](const Vector& y0, double, const Vector& theta, int up_to) {
    const double b = theta[0];
    const double y = y0[0];
    const double d1 = a * y * (1.0 - y / b);
    const double slope = a * (1.0 - 2.0 * y / b);
    const double d2 = slope * d1;
    const double d3 = -2.0 * a / b * d1 * d1 + slope * d2;
    return truncate({y0, vec1(d1), vec1(d2), vec1(d3)}, up_to);
  };
  return p;
}

IVProblem make_fitzhugh_nagumo() {
  constexpr double a = 0.0;
  constexpr double b = 0.08;
  constexpr double c = 0.07;
  constexpr double d = 1.25;
  IVProblem p;
  p.name = "fitzhugh_nagumo";
  p.dim = 2;
  p.theta_dim = 2;
  p.f = [](const Vector& y, double, const Vector&, Vector& out) {
    out[0] = y[0] - y[0] * y[0] * y[0] / 3.0 - y[1] + a;
    out[1] = (y[0] + b - c * y[1]) / d;
  };
  p.jac = [](const Vector& y, double, const Vector&, Matrix& out) {
    out(0, 0) = 1.0 - y[0] * y[0];
    out(0, 1) = -1.0;
    out(1, 0) = 1.0 / d;
    out(1, 1) = -c / d;
  };
  p.init_map = [](const Vector& theta) { return theta; };
  p.t0 = 0.0;
  p.t1 = 20.0;
  p.oracle_max_order = kOracleOrder;
  p.derivative_oracle = [](const Vector& y0, double, const Vector&, int up_to) {
    const double u = y0[0];
    const double v = y0[1];
    const double u1 = u - u * u * u / 3.0 - v + a;
    const double v1 = (u + b - c * v) / d;
    const double u2 = (1.0 - u * u) * u1 - v1;
    const double v2 = (u1 - c * v1) / d;
    const double u3 = -2.0 * u * u1 * u1 + (1.0 - u * u) * u2 - v2;
    const double v3 = (u2 - c * v2) / d;
    return truncate({y0, vec2(u1, v1), vec2(u2, v2), vec2(u3, v3)}, up_to);
  };
  return p;
}

IVProblem make_lotka_volterra() {
  constexpr double a = 5.0;
  constexpr double b = 0.5;
  constexpr double c = 5.0;
  constexpr double d = 0.5;
  IVProblem p;
  p.name = "lotka_volterra";
  p.dim = 2;
  p.theta_dim = 2;
  p.f = [](const Vector& y, double, const Vector&, Vector& out) {
    out[0] = a * y[0] - b * y[0] * y[1];
    out[1] = -c * y[1] + d * y[0] * y[1];
  };
  p.jac = [](const Vector& y, double, const Vector&, Matrix& out) {
    out(0, 0) = a - b * y[1];
    out(0, 1) = -b * y[0];
    out(1, 0) = d * y[1];
    out(1, 1) = -c + d * y[0];
  };
  p.init_map = [](const Vector& theta) { return theta; };
  p.t0 = 0.0;
  p.t1 = 3.0;
  p.oracle_max_order = kOracleOrder;
  p.derivative_oracle = [](const Vector& y0, double, const Vector&, int up_to) {
    const double u = y0[0];
    const double v = y0[1];
    const double u1 = a * u - b * u * v;
    const double v1 = -c * v + d * u * v;
    const double w1 = u1 * v + u * v1;  // (uv)'
    const double u2 = a * u1 - b * w1;
    const double v2 = -c * v1 + d * w1;
    const double w2 = u2 * v + 2.0 * u1 * v1 + u * v2;  // (uv)''
    const double u3 = a * u2 - b * w2;
    const double v3 = -c * v2 + d * w2;
    return truncate({y0, vec2(u1, v1), vec2(u2, v2), vec2(u3, v3)}, up_to);
  };
  return p;
}

IVProblem make_van_der_pol() {
  constexpr double a = 0.05;
  IVProblem p;
  p.name = "van_der_pol";
  p.dim = 2;
  p.theta_dim = 2;
  p.f = [](const Vector& y, double, const Vector&, Vector& out) {
    out[0] = y[1];
    out[1] = a * (1.0 - y[0] * y[0]) * y[1] - y[0];
  };
  p.jac = [](const Vector& y, double, const Vector&, Matrix& out) {
    out(0, 0) = 0.0;
    out(0, 1) = 1.0;
    out(1, 0) = -2.0 * a * y[0] * y[1] - 1.0;
    out(1, 1) = a * (1.0 - y[0] * y[0]);
  };
  p.init_map = [](const Vector& theta) { return theta; };
  p.t0 = 0.0;
  p.t1 = 10.0;
  p.oracle_max_order = kOracleOrder;
  p.derivative_oracle = [](const Vector& y0, double, const Vector&, int up_to) {
    const double u = y0[0];
    const double v = y0[1];
    const double u1 = v;
    const double v1 = a * (1.0 - u * u) * v - u;
    const double u2 = v1;
    const double v2 = a * (-2.0 * u * u1 * v + (1.0 - u * u) * v1) - u1;
    const double u3 = v2;
    const double v3 = a * (-2.0 * u1 * u1 * v - 2.0 * u * u2 * v - 4.0 * u * u1 * v1 + (1.0 - u * u) * v2) - u2;
    return truncate({y0, vec2(u1, v1), vec2(u2, v2), vec2(u3, v3)}, up_to);
  };
  return p;
}

}  // namespace

const std::vector<std::string>& benchmark_names() {
  static const std::vector<std::string> names{"linear", "logistic", "fitzhugh_nagumo", "lotka_volterra",
                                              "van_der_pol"};
  return names;
}

Benchmark benchmark(const std::string& name) {
  if (name == "linear") {
    return {make_linear(), gaussian_dist(vec1(1.0), 0.01)};
  }
  if (name == "logistic") {
    return {make_logistic(), gaussian_dist(vec1(3.0), 0.01)};
  }
  if (name == "fitzhugh_nagumo") {
    return {make_fitzhugh_nagumo(), gaussian_dist(vec2(0.5, 1.0), 0.1)};
  }
  if (name == "lotka_volterra") {
    return {make_lotka_volterra(), gaussian_dist(vec2(5.0, 5.0), 0.3)};
  }
  if (name == "van_der_pol") {
    return {make_van_der_pol(), gaussian_dist(vec2(5.0, 5.0), 2.0)};
  }
  throw Error(ErrorCode::UnknownProblem, "unknown problem '" + name + "'");
}

}  // namespace odeup

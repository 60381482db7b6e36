#include "properties.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <sstream>
#include <vector>

#include "odeup/gaussians.hpp"
#include "odeup/ivp.hpp"
#include "odeup/odefilter.hpp"
#include "odeup/propagate.hpp"
#include "odeup/quadrature.hpp"
#include "odeup/reference.hpp"
#include "oracles.hpp"

namespace properties {

using odeup::Matrix;
using odeup::Vector;

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

bool same_bytes(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

std::vector<double> flatten(const std::vector<Vector>& vs) {
  std::vector<double> out;
  for (const auto& v : vs) {
    out.insert(out.end(), v.data(), v.data() + v.size());
  }
  return out;
}

std::vector<double> flatten(const std::vector<Matrix>& ms) {
  std::vector<double> out;
  for (const auto& m : ms) {
    out.insert(out.end(), m.data(), m.data() + m.size());
  }
  return out;
}

// Random mixture of `k` components in dimension `d`, some of them Dirac.
odeup::GaussianMixture random_mixture(int k, int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  Vector w(k);
  for (int i = 0; i < k; ++i) {
    w[i] = unif(rng);
  }
  w /= w.sum();
  std::vector<odeup::Gaussian> comps;
  for (int i = 0; i < k; ++i) {
    const Vector mu = oracle::random_vector(d, rng, 2.0);
    if (i == 0) {
      comps.push_back(odeup::Gaussian::dirac(mu));
    } else {
      comps.push_back(odeup::make_gaussian(mu, 0.3 * oracle::random_spd(d, rng)));
    }
  }
  return odeup::GaussianMixture(w, comps);
}

}  // namespace

Outcome cubature_degree3_exactness(int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim_dist(1, 5);
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const int e = dim_dist(rng);
    const Vector mu = oracle::random_vector(e, rng);
    const Matrix cov = oracle::random_spd(e, rng, 0.05);
    const odeup::QuadratureRule rule = odeup::spherical_cubature(mu, cov);

    // Random cubic p(x) = c0 + Σ cᵢxᵢ + Σ cᵢⱼxᵢxⱼ + Σ cᵢⱼₖxᵢxⱼxₖ.
    const double c0 = oracle::random_vector(1, rng)[0];
    const Vector c1 = oracle::random_vector(e, rng);
    const Matrix c2 = oracle::random_spd(e, rng, 0.0) - oracle::random_spd(e, rng, 0.0);
    std::vector<double> c3(static_cast<std::size_t>(e * e * e));
    for (auto& c : c3) {
      c = oracle::random_vector(1, rng)[0];
    }
    auto poly = [&](const Vector& x) {
      double v = c0 + c1.dot(x) + x.dot(c2 * x);
      for (int i = 0; i < e; ++i) {
        for (int j = 0; j < e; ++j) {
          for (int k = 0; k < e; ++k) {
            v += c3[(i * e + j) * e + k] * x[i] * x[j] * x[k];
          }
        }
      }
      return v;
    };
    double exact = c0 + c1.dot(mu) + (c2 * (cov + mu * mu.transpose())).trace();
    double scale = std::abs(c0) + c1.cwiseAbs().dot(mu.cwiseAbs());
    for (int i = 0; i < e; ++i) {
      for (int j = 0; j < e; ++j) {
        for (int k = 0; k < e; ++k) {
          const double m3 = oracle::gaussian_third_moment(mu, cov, i, j, k);
          exact += c3[(i * e + j) * e + k] * m3;
          scale += std::abs(c3[(i * e + j) * e + k] * m3);
        }
      }
    }
    double approx = 0.0;
    for (std::size_t n = 0; n < rule.size(); ++n) {
      approx += rule.weights[static_cast<Eigen::Index>(n)] * poly(rule.nodes[n]);
    }
    worst = std::max(worst, std::abs(approx - exact) / std::max(1.0, scale));
  }
  return {worst <= 1e-10, "worst relative error " + fmt(worst) + " over " + std::to_string(trials) + " cubics"};
}

Outcome mixture_moments_vs_samples(std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int d = 2;
  const odeup::GaussianMixture mix = random_mixture(3, d, rng);
  const Vector mean = odeup::mixture_mean(mix);
  const odeup::MixtureCovariance cov = odeup::mixture_cov(mix);

  std::discrete_distribution<int> pick(mix.weights().data(), mix.weights().data() + mix.size());
  std::normal_distribution<double> normal;
  std::vector<Vector> draws(samples);
  Vector sum = Vector::Zero(d);
  for (auto& x : draws) {
    const auto& g = mix.components()[static_cast<std::size_t>(pick(rng))];
    Vector z(d);
    for (int i = 0; i < d; ++i) {
      z[i] = normal(rng);
    }
    x = g.mean() + g.cov_sqrt() * z;
    sum += x;
  }
  const double n = static_cast<double>(samples);
  const Vector emp_mean = sum / n;

  double worst = 0.0;
  for (int i = 0; i < d; ++i) {
    double ss = 0.0;
    for (const auto& x : draws) {
      ss += (x[i] - emp_mean[i]) * (x[i] - emp_mean[i]);
    }
    const double se = std::sqrt(ss / (n - 1) / n);
    worst = std::max(worst, std::abs(emp_mean[i] - mean[i]) / se);
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      double s1 = 0.0;
      double s2 = 0.0;
      for (const auto& x : draws) {
        const double p = (x[i] - emp_mean[i]) * (x[j] - emp_mean[j]);
        s1 += p;
        s2 += p * p;
      }
      const double emp_cov = s1 / (n - 1);
      const double var_p = (s2 / n - (s1 / n) * (s1 / n)) * n / (n - 1);
      const double se = std::sqrt(var_p / n);
      worst = std::max(worst, std::abs(emp_cov - cov.total(i, j)) / se);
    }
  }
  return {worst <= 3.0, "largest deviation " + fmt(worst) + " standard errors over " + std::to_string(samples) +
                            " samples"};
}

Outcome decomposition_identity(int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> k_dist(1, 6);
  std::uniform_int_distribution<int> d_dist(1, 4);
  bool exact = true;
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const int d = d_dist(rng);
    const odeup::GaussianMixture mix = random_mixture(k_dist(rng), d, rng);
    const odeup::MixtureCovariance c = odeup::mixture_cov(mix);
    const Matrix sum = c.pn + c.non_pn;
    exact = exact && std::memcmp(sum.data(), c.total.data(), sizeof(double) * sum.size()) == 0;

    // Second-moment form, computed independently.
    Vector mu = Vector::Zero(d);
    Matrix second = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < mix.size(); ++i) {
      const auto& g = mix.components()[i];
      const double w = mix.weights()[static_cast<Eigen::Index>(i)];
      mu += w * g.mean();
      second += w * (g.cov() + g.mean() * g.mean().transpose());
    }
    const Matrix expected = second - mu * mu.transpose();
    worst = std::max(worst, (expected - c.total).norm() / std::max(1.0, second.norm()));
  }
  return {exact && worst <= 1e-12, std::string(exact ? "pn + non_pn == total bitwise" : "pn + non_pn != total") +
                                       ", second-moment deviation " + fmt(worst)};
}

Outcome solver_convergence_order() {
  const odeup::IVProblem linear = odeup::benchmark("linear").problem.with_tspan(0.0, 1.0);
  const odeup::ConcreteIVP ivp = odeup::apply_params(linear, Vector::Constant(1, 1.0));
  const double exact = std::exp(1.0);
  const std::vector<double> steps{0.1, 0.05, 0.025, 0.0125};
  bool pass = true;
  std::ostringstream detail;
  for (int q = 1; q <= 3; ++q) {
    odeup::SolverConfig cfg;
    cfg.q = q;
    std::vector<double> log_h;
    std::vector<double> log_err;
    for (double h : steps) {
      cfg.step = h;
      const odeup::ODESolution sol = odeup::solve(ivp, cfg);
      log_h.push_back(std::log(h));
      log_err.push_back(std::log(std::abs(sol.solution_marginal(sol.times.size() - 1).mean()[0] - exact)));
    }
    // Least-squares slope of log error against log h.
    const double n = static_cast<double>(steps.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      mx += log_h[i] / n;
      my += log_err[i] / n;
    }
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      sxy += (log_h[i] - mx) * (log_err[i] - my);
      sxx += (log_h[i] - mx) * (log_h[i] - mx);
    }
    const double order = sxy / sxx;
    pass = pass && order >= q;
    detail << "q=" << q << " order " << fmt(order) << (q < 3 ? "; " : "");
  }
  return {pass, detail.str()};
}

Outcome smoother_batch_equivalence() {
  Matrix a(2, 2);
  a << -0.5, 1.0, -1.0, -0.3;
  const Vector b = (Vector(2) << 0.2, -0.1).finished();
  const Vector y0 = (Vector(2) << 1.0, 0.5).finished();

  odeup::IVProblem p;
  p.name = "affine";
  p.dim = 2;
  p.theta_dim = 1;
  p.f = [a, b](const Vector& y, double, const Vector&, Vector& out) { out = a * y + b; };
  p.jac = [a](const Vector&, double, const Vector&, Matrix& out) { out = a; };
  p.init_map = [y0](const Vector&) { return y0; };
  p.t0 = 0.0;
  p.t1 = 1.0;
  p.oracle_max_order = 3;
  p.derivative_oracle = [a, b](const Vector& y, double, const Vector&, int up_to) {
    std::vector<Vector> out{y, a * y + b};
    for (int j = 2; j <= up_to; ++j) {
      out.push_back(a * out.back());
    }
    return out;
  };
  const odeup::ConcreteIVP ivp(p, Vector::Zero(1));

  double worst = 0.0;
  for (int q = 1; q <= 3; ++q) {
    odeup::SolverConfig cfg;
    cfg.q = q;
    cfg.step = 0.1;
    cfg.calibrate = false;
    const odeup::ODESolution sol = odeup::solve(ivp, cfg);
    const oracle::DenseRun batch = oracle::batch_affine_regression(a, b, y0, q, 0.1, 10);
    for (std::size_t n = 0; n < batch.means.size(); ++n) {
      const double scale_m = std::max(1.0, batch.means[n].norm());
      const double scale_c = std::max(1e-3, batch.covs[n].norm());
      worst = std::max(worst, (sol.states[n].mean() - batch.means[n]).norm() / scale_m);
      worst = std::max(worst, (sol.states[n].cov() - batch.covs[n]).norm() / scale_c);
    }
  }
  return {worst <= 1e-8, "largest relative deviation " + fmt(worst) + " for q = 1..3"};
}

Outcome rk4_order_ratio() {
  const odeup::Benchmark logistic = odeup::benchmark("logistic");
  const odeup::ConcreteIVP ivp = odeup::apply_params(logistic.problem, Vector::Constant(1, 3.0));
  auto exact = [](double t) { return 3.0 / (1.0 + (3.0 / 0.05 - 1.0) * std::exp(-3.0 * t)); };
  std::vector<double> errs;
  for (double h : {0.1, 0.05, 0.025}) {
    const odeup::ReferenceSolution ref = odeup::rk4_solve(ivp, h, {0.0, 1.0, 2.0, 3.0});
    double err = 0.0;
    for (std::size_t k = 0; k < ref.times.size(); ++k) {
      err = std::max(err, std::abs(ref.values[k][0] - exact(ref.times[k])));
    }
    errs.push_back(err);
  }
  const double o1 = std::log2(errs[0] / errs[1]);
  const double o2 = std::log2(errs[1] / errs[2]);
  const bool pass = std::abs(o1 - 4.0) <= 0.3 && std::abs(o2 - 4.0) <= 0.3;
  return {pass, "observed orders " + fmt(o1) + ", " + fmt(o2)};
}

Outcome seed_determinism() {
  const odeup::Benchmark lv = odeup::benchmark("lotka_volterra");
  const odeup::QuadratureRule r1 = odeup::monte_carlo(lv.dist, 500, 42);
  const odeup::QuadratureRule r2 = odeup::monte_carlo(lv.dist, 500, 42);
  const odeup::QuadratureRule r3 = odeup::monte_carlo(lv.dist, 500, 43);
  const bool rules = same_bytes(flatten(r1.nodes), flatten(r2.nodes)) && !same_bytes(flatten(r1.nodes), flatten(r3.nodes));

  const odeup::IVProblem short_lv = lv.problem.with_tspan(0.0, 0.5);
  const std::vector<double> grid = odeup::make_grid(0.0, 0.5, 0.05);
  odeup::MonteCarloOptions mc;
  mc.n = 300;
  mc.seed = 9;
  mc.jobs = 1;
  const odeup::MonteCarloReference a = odeup::mc_reference(short_lv, lv.dist, mc, grid);
  mc.jobs = 3;
  const odeup::MonteCarloReference b = odeup::mc_reference(short_lv, lv.dist, mc, grid);
  const bool refs = same_bytes(flatten(a.mean), flatten(b.mean)) && same_bytes(flatten(a.cov), flatten(b.cov));

  odeup::RuleSpec spec;
  spec.kind = odeup::RuleKind::MonteCarlo;
  spec.n = 40;
  spec.seed = 5;
  odeup::SolverConfig cfg;
  cfg.step = 0.05;
  const odeup::PropagationResult p1 = odeup::propagate(short_lv, lv.dist, spec, cfg, 1);
  const odeup::PropagationResult p2 = odeup::propagate(short_lv, lv.dist, spec, cfg, 3);
  const bool props = same_bytes(flatten(p1.mean), flatten(p2.mean)) &&
                     same_bytes(flatten(p1.cov_total), flatten(p2.cov_total)) &&
                     same_bytes(p1.component_cov_sqrt, p2.component_cov_sqrt);

  return {rules && refs && props, std::string("rules ") + (rules ? "ok" : "differ") + ", references " +
                                      (refs ? "ok" : "differ") + ", propagation " + (props ? "ok" : "differ")};
}

}  // namespace properties

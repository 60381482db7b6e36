#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>

#include "odeup/error.hpp"
#include "odeup/propagate.hpp"
#include "odeup/reference.hpp"

using namespace odeup;

TEST_CASE("linear propagation agrees with the analytic pushforward") {
  const Benchmark lin = benchmark("linear");
  SolverConfig cfg;
  cfg.step = 0.01;
  const PropagationResult r = propagate(lin.problem, lin.dist, RuleSpec{}, cfg);
  REQUIRE(r.times.size() == 301);
  CHECK(r.rule.size() == 2);
  for (std::size_t k : {std::size_t{100}, std::size_t{300}}) {
    const ScalarMoments exact = linear_analytic(1.0, 0.0, 1.0, 0.01, r.times[k]);
    CHECK(r.mean[k][0] == doctest::Approx(exact.mean).epsilon(5e-3));
    CHECK(r.cov_total[k](0, 0) == doctest::Approx(exact.var).epsilon(0.05));
  }
  CHECK(r.cov_pn[0](0, 0) == 0.0);
}

TEST_CASE("the covariance parts add up and the mixture accessor agrees") {
  const Benchmark lv = benchmark("lotka_volterra");
  SolverConfig cfg;
  cfg.q = 2;
  cfg.step = 0.05;
  const PropagationResult r = propagate(lv.problem.with_tspan(0.0, 1.0), lv.dist, RuleSpec{}, cfg);
  CHECK(r.kappa2_per_node.size() == 4);
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    const Matrix sum = r.cov_pn[k] + r.cov_non_pn[k];
    CHECK(std::memcmp(sum.data(), r.cov_total[k].data(), sizeof(double) * 4) == 0);
    const GaussianMixture mix = r.mixture(k);
    CHECK(mix.size() == 4);
    CHECK((mixture_mean(mix) - r.mean[k]).norm() <= 1e-12 * r.mean[k].norm());
  }
}

TEST_CASE("the classic baseline has no solver part") {
  const Benchmark lg = benchmark("logistic");
  const PropagationResult r = propagate_nonpn(lg.problem, lg.dist, RuleSpec{}, ClassicSolverConfig{0.01, 10});
  for (const auto& c : r.cov_pn) {
    CHECK(c.norm() == 0.0);
  }
  const PropagationResult pn = propagate(lg.problem, lg.dist, RuleSpec{}, SolverConfig{});
  CHECK(r.mean.back()[0] == doctest::Approx(pn.mean.back()[0]).epsilon(1e-3));
  CHECK(r.cov_non_pn.back()(0, 0) == doctest::Approx(pn.cov_non_pn.back()(0, 0)).epsilon(0.02));
}

TEST_CASE("node failures are attributed to their node") {
  IVProblem p = benchmark("logistic").problem.with_tspan(0.0, 1.0);
  p.derivative_oracle = nullptr;
  p.f = [](const Vector& y, double, const Vector& theta, Vector& out) {
    out[0] = theta[0] > 3.0 ? std::numeric_limits<double>::quiet_NaN() : y[0];
  };
  QuadratureRule rule;
  rule.nodes = {Vector::Constant(1, 2.0), Vector::Constant(1, 2.5), Vector::Constant(1, 4.0)};
  rule.weights = Vector::Constant(3, 1.0 / 3.0);
  SolverConfig cfg;
  cfg.step = 0.1;
  try {
    (void)propagate_rule(p, rule, cfg, 2);
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NodeSolveFailed);
    REQUIRE(e.index().has_value());
    CHECK(*e.index() == 2);
  }
}

TEST_CASE("logspace") {
  const auto s = logspace(0.01, 3.0, 10);
  REQUIRE(s.size() == 10);
  CHECK(s.front() == 0.01);
  CHECK(s.back() == 3.0);
  CHECK(s[1] / s[0] == doctest::Approx(s[9] / s[8]));
  CHECK(logspace(0.5, 0.5, 1).size() == 1);
  CHECK_THROWS_AS((void)logspace(0.0, 1.0, 3), Error);
}

TEST_CASE("step-size sweep shows the decomposition trend on the linear ODE") {
  const Benchmark lin = benchmark("linear");
  const auto steps = logspace(0.01, 0.3, 5);
  const auto rows = step_size_sweep(lin.problem, lin.dist, RuleSpec{}, 1, steps);
  REQUIRE(rows.size() == 5);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].ok);
    CHECK(rows[i].cov_pn(0, 0) > rows[i - 1].cov_pn(0, 0));
    CHECK(rows[i].cov_non_pn(0, 0) < rows[i - 1].cov_non_pn(0, 0));
  }
  CHECK_THROWS_AS((void)step_size_sweep(lin.problem, lin.dist, RuleSpec{}, 1, {0.1, 0.01}), Error);
}

TEST_CASE("sweep rows record failures without aborting") {
  IVProblem p = benchmark("logistic").problem.with_tspan(0.0, 1.0);
  p.derivative_oracle = nullptr;
  p.f = [](const Vector& y, double t, const Vector&, Vector& out) {
    out[0] = t > 0.15 && t < 0.25 ? std::numeric_limits<double>::infinity() : y[0];
  };
  // Step 0.1 lands on t = 0.2 and fails; step 0.3 never samples the window.
  const auto rows = step_size_sweep(p, benchmark("logistic").dist, RuleSpec{}, 1, {0.1, 0.3});
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(rows[0].ok);
  CHECK_FALSE(rows[0].error.empty());
  CHECK(rows[1].ok);
}

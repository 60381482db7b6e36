#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace oracle {

std::pair<Matrix, Matrix> iwp_van_loan(int q, double h) {
  const int n = q + 1;
  Matrix m = Matrix::Zero(2 * n, 2 * n);
  for (int i = 0; i < q; ++i) {
    m(i, i + 1) = -h;          // -F
    m(n + i + 1, n + i) = h;   // Fᵀ
  }
  m(q, n + q) = h;  // L Lᵀ with L = e_q
  Matrix term = Matrix::Identity(2 * n, 2 * n);
  Matrix expm = term;
  for (int k = 1; k <= 2 * n; ++k) {
    term = term * m / static_cast<double>(k);
    expm += term;
  }
  const Matrix g12 = expm.topRightCorner(n, n);
  const Matrix g22 = expm.bottomRightCorner(n, n);
  Matrix phi = g22.transpose();
  Matrix q_mat = phi * g12;
  q_mat = 0.5 * (q_mat + q_mat.transpose()).eval();
  return {phi, q_mat};
}

Matrix kron_eye(int d, const Matrix& block) {
  const auto r = block.rows();
  const auto c = block.cols();
  Matrix out = Matrix::Zero(d * r, d * c);
  for (int i = 0; i < d; ++i) {
    out.block(i * r, i * c, r, c) = block;
  }
  return out;
}

namespace {

Matrix selector(int d, int q, int order) {
  Matrix e = Matrix::Zero(d, d * (q + 1));
  for (int i = 0; i < d; ++i) {
    e(i, i * (q + 1) + order) = 1.0;
  }
  return e;
}

Vector stack(int d, int q, const std::vector<Vector>& derivs) {
  Vector x = Vector::Zero(d * (q + 1));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= q; ++j) {
      x[i * (q + 1) + j] = derivs[j][i];
    }
  }
  return x;
}

}  // namespace

DenseRun dense_ek_filter(const odeup::ConcreteIVP& ivp, int q, double h, bool ek1, bool calibrate, bool smooth) {
  if (q > 2) {
    throw std::invalid_argument("dense oracle supports q <= 2");
  }
  const int d = ivp.dim();
  const double span = ivp.t1() - ivp.t0();
  const int steps = static_cast<int>(std::lround(span / h));
  const auto [phi1, q1] = iwp_van_loan(q, h);
  const Matrix phi = kron_eye(d, phi1);
  const Matrix qn = kron_eye(d, q1);
  const Matrix e0 = selector(d, q, 0);
  const Matrix e1 = selector(d, q, 1);

  std::vector<Vector> derivs{ivp.y0(), ivp.eval(ivp.y0(), ivp.t0())};
  if (q == 2) {
    derivs.push_back(ivp.jacobian(ivp.y0(), ivp.t0()) * derivs[1]);
  }

  DenseRun run;
  run.times.push_back(ivp.t0());
  run.means.push_back(stack(d, q, derivs));
  run.covs.push_back(Matrix::Zero(d * (q + 1), d * (q + 1)));
  std::vector<Vector> pred_means;
  std::vector<Matrix> pred_covs;
  double quad = 0.0;
  for (int n = 0; n < steps; ++n) {
    const double t = ivp.t0() + (n + 1) * h;
    const Vector mp = phi * run.means.back();
    const Matrix pp = phi * run.covs.back() * phi.transpose() + qn;
    const Vector y = e0 * mp;
    const Vector z = e1 * mp - ivp.eval(y, t);
    const Matrix hmat = ek1 ? Matrix(e1 - ivp.jacobian(y, t) * e0) : e1;
    const Matrix s = hmat * pp * hmat.transpose();
    const Matrix k = pp * hmat.transpose() * s.inverse();
    quad += z.dot(s.ldlt().solve(z));
    pred_means.push_back(mp);
    pred_covs.push_back(pp);
    run.times.push_back(t);
    run.means.push_back(mp - k * z);
    Matrix p = pp - k * s * k.transpose();
    run.covs.push_back(0.5 * (p + p.transpose()));
  }
  if (calibrate) {
    run.kappa2_hat = quad / (static_cast<double>(steps) * d);
    for (auto& p : run.covs) {
      p *= run.kappa2_hat;
    }
    for (auto& p : pred_covs) {
      p *= run.kappa2_hat;
    }
  }
  if (smooth) {
    for (int n = steps - 1; n >= 0; --n) {
      const Matrix g = run.covs[n] * phi.transpose() * pred_covs[n].inverse();
      run.means[n] = run.means[n] + g * (run.means[n + 1] - pred_means[n]);
      run.covs[n] = run.covs[n] + g * (run.covs[n + 1] - pred_covs[n]) * g.transpose();
    }
  }
  return run;
}

DenseRun batch_affine_regression(const Matrix& a, const Vector& b, const Vector& y0, int q, double h, int steps) {
  const int d = static_cast<int>(y0.size());
  const int sd = d * (q + 1);
  const auto [phi1, q1] = iwp_van_loan(q, h);
  const Matrix phi = kron_eye(d, phi1);
  const Matrix qn = kron_eye(d, q1);

  std::vector<Vector> derivs{y0, a * y0 + b};
  for (int j = 2; j <= q; ++j) {
    derivs.push_back(a * derivs.back());
  }
  const int total = sd * (steps + 1);
  Vector mu(total);
  Matrix cov = Matrix::Zero(total, total);
  mu.head(sd) = stack(d, q, derivs);
  std::vector<Matrix> marg{Matrix::Zero(sd, sd)};
  for (int n = 1; n <= steps; ++n) {
    mu.segment(n * sd, sd) = phi * mu.segment((n - 1) * sd, sd);
    marg.push_back(phi * marg.back() * phi.transpose() + qn);
  }
  for (int n = 0; n <= steps; ++n) {
    Matrix cross = marg[n];  // Cov(x_m, x_n) for m = n, n+1, ...
    for (int m = n; m <= steps; ++m) {
      cov.block(m * sd, n * sd, sd, sd) = cross;
      cov.block(n * sd, m * sd, sd, sd) = cross.transpose();
      cross = phi * cross;
    }
  }
  const Matrix obs = selector(d, q, 1) - a * selector(d, q, 0);
  Matrix hbig = Matrix::Zero(d * steps, total);
  Vector target(d * steps);
  for (int n = 1; n <= steps; ++n) {
    hbig.block((n - 1) * d, n * sd, d, sd) = obs;
    target.segment((n - 1) * d, d) = b;
  }
  const Matrix s = hbig * cov * hbig.transpose();
  const Eigen::LDLT<Matrix> ldlt(s);
  const Vector post_mu = mu + cov * hbig.transpose() * ldlt.solve(target - hbig * mu);
  const Matrix post_cov = cov - cov * hbig.transpose() * ldlt.solve(hbig * cov);

  DenseRun run;
  for (int n = 0; n <= steps; ++n) {
    run.times.push_back(n * h);
    run.means.push_back(post_mu.segment(n * sd, sd));
    run.covs.push_back(post_cov.block(n * sd, n * sd, sd, sd));
  }
  return run;
}

Matrix fd_jacobian(const odeup::IVProblem& problem, const Vector& y, double t, const Vector& theta, double eps) {
  const int d = problem.dim;
  Matrix jac(d, d);
  Vector plus(d);
  Vector minus(d);
  for (int j = 0; j < d; ++j) {
    Vector yp = y;
    Vector ym = y;
    const double step = eps * std::max(1.0, std::abs(y[j]));
    yp[j] += step;
    ym[j] -= step;
    problem.f(yp, t, theta, plus);
    problem.f(ym, t, theta, minus);
    jac.col(j) = (plus - minus) / (2.0 * step);
  }
  return jac;
}

double gaussian_third_moment(const Vector& mu, const Matrix& cov, int i, int j, int k) {
  return mu[i] * mu[j] * mu[k] + mu[i] * cov(j, k) + mu[j] * cov(i, k) + mu[k] * cov(i, j);
}

Matrix random_spd(int n, std::mt19937_64& rng, double shift) {
  std::normal_distribution<double> normal;
  Matrix b(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      b(i, j) = normal(rng);
    }
  }
  return b * b.transpose() + shift * Matrix::Identity(n, n);
}

Vector random_vector(int n, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = normal(rng);
  }
  return v;
}

}  // namespace oracle

#include <doctest.h>

#include "odeup/error.hpp"
#include "odeup/prior.hpp"
#include "oracles.hpp"

using namespace odeup;

TEST_CASE("prior rejects invalid hyperparameters") {
  CHECK_THROWS_AS(IWPPrior(0, 1), Error);
  CHECK_THROWS_AS(IWPPrior(1, 0), Error);
  CHECK_THROWS_AS(IWPPrior(1, 1, 0.0), Error);
  CHECK(IWPPrior(3, 2).state_dim() == 9);
}

TEST_CASE("transition and process noise match the Van Loan oracle") {
  for (int q = 1; q <= 4; ++q) {
    for (double h : {1e-3, 0.01, 0.37, 1.0, 3.0}) {
      const auto [phi, qn] = oracle::iwp_van_loan(q, h);
      const IWPPrior prior(2, q, 1.7);
      CAPTURE(q);
      CAPTURE(h);
      CHECK(linalg::relative_frobenius(transition(prior, h), oracle::kron_eye(2, phi)) < 1e-13);
      const Matrix expected = 1.7 * oracle::kron_eye(2, qn);
      CHECK(linalg::relative_frobenius(process_noise(prior, h), expected) < 1e-12);
      const Matrix l = process_noise_sqrt(prior, h);
      CHECK(linalg::is_lower_triangular(l));
      CHECK(linalg::relative_frobenius(l * l.transpose(), expected) < 1e-12);
    }
  }
}

TEST_CASE("once-integrated Wiener process in closed form") {
  const IWPPrior prior(1, 1);
  const double h = 0.5;
  Matrix phi(2, 2);
  phi << 1, h, 0, 1;
  Matrix q(2, 2);
  q << h * h * h / 3, h * h / 2, h * h / 2, h;
  CHECK(linalg::relative_frobenius(transition(prior, h), phi) < 1e-15);
  CHECK(linalg::relative_frobenius(process_noise(prior, h), q) < 1e-15);
}

TEST_CASE("projection selects one derivative order per coordinate") {
  const IWPPrior prior(2, 2);
  const Matrix e1 = projection(prior, 1);
  CHECK(e1.rows() == 2);
  CHECK(e1.cols() == 6);
  CHECK(e1(0, 1) == 1.0);
  CHECK(e1(1, 4) == 1.0);
  CHECK(e1.sum() == 2.0);
  CHECK_THROWS_AS((void)projection(prior, 3), Error);
  CHECK_THROWS_AS((void)projection(prior, -1), Error);
}

TEST_CASE("non-positive steps are rejected") {
  const IWPPrior prior(1, 2);
  for (double h : {0.0, -0.1}) {
    try {
      (void)transition(prior, h);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonPositiveStep);
    }
    CHECK_THROWS_AS((void)process_noise_sqrt(prior, h), Error);
  }
}

TEST_CASE("process noise factor stays accurate for tiny steps") {
  const IWPPrior prior(1, 3);
  const double h = 1e-6;
  const auto [phi, qn] = oracle::iwp_van_loan(3, h);
  const Matrix l = process_noise_sqrt(prior, h);
  // Entrywise relative accuracy, since the entries span many magnitudes.
  const Matrix got = l * l.transpose();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      CHECK(got(i, j) == doctest::Approx(qn(i, j)).epsilon(1e-10));
    }
  }
}

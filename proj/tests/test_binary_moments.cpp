#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "prfopt/binary_moments.hpp"
#include "prfopt/rng.hpp"

using namespace prf;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd random_symmetric(int n, Rng& rng) {
  MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      G(i, j) = rng.normal();
      G(j, i) = G(i, j);
    }
  return G;
}

VectorXd random_vec(int n, Rng& rng) {
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

VectorXd random_mean(int n, Rng& rng) {
  VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = rng.uniform(-0.95, 0.95);
  return y;
}

// Exact moments by enumerating all 2^n sign vectors with independent
// probabilities P(x_i = 1) = (1 + y_i) / 2.
struct Enumerated {
  double qf = 0.0, ql = 0.0, qs = 0.0;
};

Enumerated enumerate_moments(const MatrixXd& G, const VectorXd& z,
                             const VectorXd& y) {
  const int n = static_cast<int>(y.size());
  Enumerated out;
  VectorXd x(n);
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      const bool up = (mask >> i) & 1ULL;
      x(i) = up ? 1.0 : -1.0;
      w *= up ? (1.0 + y(i)) / 2.0 : (1.0 - y(i)) / 2.0;
    }
    const double q = x.dot(G * x);
    const double l = z.dot(x);
    out.qf += w * (q + l);
    out.ql += w * (q * l);
    out.qs += w * (q * q);
  }
  return out;
}

}  // namespace

TEST_CASE("strip_diag zeroes the diagonal only") {
  Rng rng(3);
  const MatrixXd G = random_symmetric(5, rng);
  const MatrixXd S = strip_diag(G);
  CHECK(S.diagonal().isZero(0.0));
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      if (i != j) CHECK(S(i, j) == G(i, j));
}

TEST_CASE("covariance has unit diagonal and rank-one off-diagonal") {
  Rng rng(5);
  const VectorXd y = random_mean(4, rng);
  const MatrixXd C = covariance(y);
  for (int i = 0; i < 4; ++i) {
    CHECK(C(i, i) == 1.0);
    for (int j = 0; j < 4; ++j)
      if (i != j) CHECK(C(i, j) == doctest::Approx(y(i) * y(j)).epsilon(1e-15));
  }
}

TEST_CASE("closed-form moments match exhaustive enumeration") {
  Rng rng(7);
  for (int n = 2; n <= 8; ++n) {
    for (int trial = 0; trial < 10; ++trial) {
      const MatrixXd G = random_symmetric(n, rng);
      const VectorXd z = random_vec(n, rng);
      const VectorXd y = random_mean(n, rng);
      const Enumerated ref = enumerate_moments(G, z, y);
      CHECK(mean_qf(G, z, y) ==
            doctest::Approx(ref.qf).epsilon(1e-10).scale(1.0));
      CHECK(mean_ql(G, z, y) ==
            doctest::Approx(ref.ql).epsilon(1e-10).scale(1.0));
      CHECK(mean_qs(G, y) == doctest::Approx(ref.qs).epsilon(1e-10).scale(1.0));
      CHECK(mean_qs(G, y, SecondMomentImpl::LiteralKron) ==
            doctest::Approx(ref.qs).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("gradients agree with central finite differences") {
  Rng rng(11);
  const int n = 7;
  const double h = 1e-5;
  for (int trial = 0; trial < 5; ++trial) {
    const MatrixXd G = random_symmetric(n, rng);
    const VectorXd z = random_vec(n, rng);
    const VectorXd y = random_mean(n, rng);
    const VectorXd gqf = grad_qf(G, z, y);
    const VectorXd gql = grad_ql(G, z, y);
    const VectorXd gqs = grad_qs(G, y);
    for (int i = 0; i < n; ++i) {
      VectorXd yp = y, ym = y;
      yp(i) += h;
      ym(i) -= h;
      const double dqf = (mean_qf(G, z, yp) - mean_qf(G, z, ym)) / (2 * h);
      const double dql = (mean_ql(G, z, yp) - mean_ql(G, z, ym)) / (2 * h);
      const double dqs = (mean_qs(G, yp) - mean_qs(G, ym)) / (2 * h);
      CHECK(gqf(i) == doctest::Approx(dqf).epsilon(1e-6).scale(1.0));
      CHECK(gql(i) == doctest::Approx(dql).epsilon(1e-6).scale(1.0));
      CHECK(gqs(i) == doctest::Approx(dqs).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("both quartic strategies agree beyond enumeration scale") {
  Rng rng(13);
  for (const int n : {5, 17, 33}) {
    const MatrixXd G = random_symmetric(n, rng);
    const VectorXd y = random_mean(n, rng);
    const MatrixXd G_wd = strip_diag(G);
    const MatrixXd Ud = second_moment_u(G_wd, y, SecondMomentImpl::Direct);
    const MatrixXd Uk = second_moment_u(G_wd, y, SecondMomentImpl::LiteralKron);
    CHECK((Ud - Uk).cwiseAbs().maxCoeff() <
          1e-9 * std::max(1.0, Ud.cwiseAbs().maxCoeff()));
    const double qd = mean_qs(G, y, SecondMomentImpl::Direct);
    const double qk = mean_qs(G, y, SecondMomentImpl::LiteralKron);
    CHECK(qk == doctest::Approx(qd).epsilon(1e-9));
    const VectorXd gd = grad_qs(G, y, SecondMomentImpl::Direct);
    const VectorXd gk = grad_qs(G, y, SecondMomentImpl::LiteralKron);
    CHECK((gd - gk).cwiseAbs().maxCoeff() <
          1e-9 * std::max(1.0, gd.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("a degenerate distribution reproduces the deterministic values") {
  Rng rng(17);
  const int n = 6;
  const MatrixXd G = random_symmetric(n, rng);
  const VectorXd z = random_vec(n, rng);
  VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = (rng.uniform() < 0.5) ? -1.0 : 1.0;
  const double q = x.dot(G * x);
  CHECK(mean_qf(G, z, x) == doctest::Approx(q + z.dot(x)).epsilon(1e-12));
  CHECK(mean_ql(G, z, x) == doctest::Approx(q * z.dot(x)).epsilon(1e-12));
  CHECK(mean_qs(G, x) == doctest::Approx(q * q).epsilon(1e-12));
}

TEST_CASE("the quadratic form's variance is never negative") {
  Rng rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(10));
    const MatrixXd G = random_symmetric(n, rng);
    const VectorXd y = random_mean(n, rng);
    const double m1 = mean_qf(G, VectorXd::Zero(n), y);
    const double m2 = mean_qs(G, y);
    CHECK(m2 - m1 * m1 >= -1e-9 * std::max(1.0, m2));
  }
}

TEST_CASE("asymmetry beyond 1e-10 is rejected; symmetrizing repairs it") {
  Rng rng(23);
  MatrixXd G = random_symmetric(4, rng);
  const VectorXd z = random_vec(4, rng);
  const VectorXd y = random_mean(4, rng);
  G(1, 2) += 1e-6;
  CHECK_THROWS_AS(mean_qf(G, z, y), std::domain_error);
  CHECK_THROWS_AS(mean_ql(G, z, y), std::domain_error);
  CHECK_THROWS_AS(mean_qs(G, y), std::domain_error);
  CHECK_THROWS_AS(grad_qs(G, y), std::domain_error);
  const MatrixXd Gs = 0.5 * (G + G.transpose());
  CHECK_NOTHROW(mean_qf(Gs, z, y));
  CHECK_NOTHROW(mean_qs(Gs, y));
}

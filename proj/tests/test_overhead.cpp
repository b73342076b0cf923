#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "prfopt/overhead.hpp"
#include "prfopt/rng.hpp"

using namespace prf;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

ChannelSet test_channels(int N, std::uint64_t seed) {
  ScenarioConfig sc;
  sc.N = N;
  sc.N_I = 1;
  sc.seed = seed;
  Rng rng(seed);
  return gen_rician(sc, rng);
}

MatrixXd random_ternary_rows(int rows, int N, Rng& rng) {
  MatrixXd thetas(rows, N);
  for (int r = 0; r < rows; ++r)
    for (int i = 0; i < N; ++i) {
      const double u = rng.uniform();
      thetas(r, i) = u < 1.0 / 3 ? -1.0 : u < 2.0 / 3 ? 0.0 : 1.0;
    }
  return thetas;
}

}  // namespace

TEST_CASE("estimation time counts one pilot per active element plus one") {
  OverheadModel m;
  m.T0 = 0.5e-3;
  CHECK(t_e(m, 0) == doctest::Approx(0.5e-3).epsilon(1e-15));
  CHECK(t_e(m, 7) == doctest::Approx(4e-3).epsilon(1e-15));
}

TEST_CASE("feedback time is bits over the feedback link's log capacity") {
  OverheadModel m;
  // Pick the feedback SNR so ln(1 + snr) = 1: t_f(n) = n b_F / B_F exactly.
  m.N0_psd = 1.0;
  m.B_F = 2.0;
  m.h_F2 = 1.0;
  m.p_F = 2.0 * (std::exp(1.0) - 1.0);
  m.b_F = 2.0;
  CHECK(t_f(m, 0) == 0.0);
  CHECK(t_f(m, 3) == doctest::Approx(3.0).epsilon(1e-12));

  OverheadModel d;  // defaults: hand-evaluate the formula once
  const double cap = std::log(1.0 + d.p_F * d.h_F2 / (d.N0_psd * d.B_F));
  CHECK(t_f(d, 5) == doctest::Approx(5.0 * d.b_F / (d.B_F * cap)).epsilon(1e-15));
  CHECK(t_f(d, 1) < 1e-6);  // negligible next to the 1 ms pilots
}

TEST_CASE("the usable element count is overhead-limited at the defaults") {
  OverheadModel m;
  // 1 ms pilots in a 100 ms slot: n + 1 pilots plus ~60 ns/element feedback
  // leave room for 98 elements before the budget is consumed.
  CHECK(max_elements(m) == 98);

  m.N_max = 10;  // the hard cap binds first
  CHECK(max_elements(m) == 10);

  OverheadModel tight;
  tight.T0 = 0.05;  // one pilot fits, two do not
  CHECK(max_elements(tight) == 0);

  OverheadModel hopeless;
  hopeless.T0 = 0.2;  // not even the initial pilot fits
  CHECK(max_elements(hopeless) == 0);
}

TEST_CASE("rate applies the slot prefactor to the Shannon rate and throws when the slot is full") {
  const int N = 6;
  const ChannelSet ch = test_channels(N, 11);
  OverheadModel m;
  VectorXd theta(N);
  theta << 1, -1, 0, 1, 0, -1;  // 4 active elements
  const double used = t_e(m, 4) + t_f(m, 4);
  const double expect =
      (1.0 - used / m.T) * m.B * std::log2(1.0 + sinr_channels(theta, ch));
  CHECK(rate(theta, ch, m) == doctest::Approx(expect).epsilon(1e-14));

  OverheadModel full;
  full.T0 = 0.025;  // 5 pilots = 125 ms > 100 ms slot
  CHECK_THROWS_AS(rate(theta, ch, full), std::domain_error);
  VectorXd sparse = VectorXd::Zero(N);
  sparse(0) = 1.0;  // 2 pilots = 50 ms still fits
  CHECK_NOTHROW(rate(sparse, ch, full));
}

TEST_CASE("total power combines pilot, data, feedback, and static terms") {
  OverheadModel m;
  m.T = 1.0;
  m.T0 = 0.01;
  m.P0 = 2.0;
  m.p = 4.0;
  m.mu = 1.5;
  m.p_F = 8.0;
  m.mu_F = 0.5;
  m.P_cn = 3.0;
  m.P_c0 = 7.0;
  const int n_on = 5;
  const double te = t_e(m, n_on), tf = t_f(m, n_on);
  const double expect = m.P0 * te / m.T + (1.0 - te / m.T) * m.mu * m.p +
                        tf / m.T * (m.mu_F * m.p_F - m.mu * m.p) +
                        n_on * m.P_cn + m.P_c0;
  CHECK(p_tot(m, n_on) == doctest::Approx(expect).epsilon(1e-15));

  OverheadModel d;
  // Defaults at n_on = 0: 10 dBm pilot over 1% of the slot, 30 dBm = 1 W data
  // over the rest, 45 dBm static. Feedback term is zero (mu_F p_F = mu p).
  CHECK(p_tot(d, 0) ==
        doctest::Approx(1e-4 + 0.99 + dbm2watt(45.0)).epsilon(1e-12));
  // Each active element adds its 10 dBm share plus the extra pilot's tilt.
  CHECK(p_tot(d, 3) - p_tot(d, 0) ==
        doctest::Approx(3.0 * dbm2watt(10.0) +
                        (t_e(d, 3) - t_e(d, 0)) / d.T * (d.P0 - d.mu * d.p))
            .epsilon(1e-9));
}

TEST_CASE("energy efficiency is rate over total power") {
  const int N = 8;
  const ChannelSet ch = test_channels(N, 12);
  OverheadModel m;
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const VectorXd theta = random_ternary_rows(1, N, rng).row(0).transpose();
    int n_on = 0;
    for (int i = 0; i < N; ++i)
      if (theta(i) != 0.0) ++n_on;
    CHECK(ee(theta, ch, m) ==
          doctest::Approx(rate(theta, ch, m) / p_tot(m, n_on)).epsilon(1e-14));
  }
}

TEST_CASE("batch evaluation matches the scalar evaluation row by row") {
  const int N = 7;
  const ChannelSet ch = test_channels(N, 14);
  OverheadModel m;
  Rng rng(15);
  const MatrixXd thetas = random_ternary_rows(40, N, rng);
  const VectorXd r = rate_batch(thetas, ch, m);
  const VectorXd e = ee_batch(thetas, ch, m);
  REQUIRE(r.size() == 40);
  REQUIRE(e.size() == 40);
  for (int k = 0; k < 40; ++k) {
    const VectorXd row = thetas.row(k).transpose();
    CHECK(r(k) == doctest::Approx(rate(row, ch, m)).epsilon(1e-12));
    CHECK(e(k) == doctest::Approx(ee(row, ch, m)).epsilon(1e-12));
  }
}

TEST_CASE("switching elements off trades SINR for slot time and power") {
  // With everything else fixed, the all-off vector still pays the base
  // overhead (one pilot) and static power but earns the no-surface rate.
  const int N = 6;
  ScenarioConfig sc;
  sc.N = N;
  sc.N_I = 1;
  sc.seed = 16;
  sc.blocked_direct = false;  // keep a direct path so the all-off rate is > 0
  Rng crng(sc.seed);
  const ChannelSet ch = gen_rician(sc, crng);
  OverheadModel m;
  const VectorXd off = VectorXd::Zero(N);
  const double r_off = rate(off, ch, m);
  CHECK(r_off > 0.0);  // direct link still carries signal
  CHECK(p_tot(m, 0) < p_tot(m, N));
  // Activating elements costs overhead: the prefactor strictly decreases.
  const VectorXd on = VectorXd::Ones(N);
  const double pre_off = 1.0 - (t_e(m, 0) + t_f(m, 0)) / m.T;
  const double pre_on = 1.0 - (t_e(m, N) + t_f(m, N)) / m.T;
  CHECK(pre_on < pre_off);
  CHECK(rate(on, ch, m) / (m.B * std::log2(1.0 + sinr_channels(on, ch))) ==
        doctest::Approx(pre_on).epsilon(1e-12));
}

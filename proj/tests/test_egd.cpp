#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "prfopt/baselines.hpp"
#include "prfopt/egd.hpp"

using namespace prf;
using Eigen::VectorXd;

namespace {

struct Instance {
  ChannelSet ch;
  SinrProblem prob;
};

Instance make_instance(int N, int N_I, std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.N = N;
  cfg.N_I = N_I;
  cfg.seed = seed;
  Rng rng(seed);
  Instance inst;
  inst.ch = gen_rician(cfg, rng);
  inst.prob = build_problem(inst.ch);
  return inst;
}

}  // namespace

TEST_CASE("surrogates collapse to the true SINR on vertices") {
  const Instance inst = make_instance(8, 1, 51);
  Rng rng(52);
  for (int trial = 0; trial < 20; ++trial) {
    VectorXd t(8);
    for (int i = 0; i < 8; ++i) t(i) = (rng.uniform() < 0.5) ? -1.0 : 1.0;
    const double s = sinr(t, inst.prob);
    CHECK(taylor1(t, inst.prob) == doctest::Approx(s).epsilon(1e-10));
    // With zero variance the covariance corrections cancel exactly.
    CHECK(taylor2(t, inst.prob) == doctest::Approx(s).epsilon(1e-8));
  }
}

TEST_CASE("surrogate gradients agree with central finite differences") {
  const Instance inst = make_instance(6, 1, 53);
  Rng rng(54);
  const double h = 1e-5;
  for (int trial = 0; trial < 5; ++trial) {
    VectorXd y(6);
    for (int i = 0; i < 6; ++i) y(i) = rng.uniform(-0.9, 0.9);
    const VectorXd g1 = grad_taylor1(y, inst.prob);
    const VectorXd g2 = grad_taylor2(y, inst.prob);
    for (int i = 0; i < 6; ++i) {
      VectorXd yp = y, ym = y;
      yp(i) += h;
      ym(i) -= h;
      const double d1 = (taylor1(yp, inst.prob) - taylor1(ym, inst.prob)) / (2 * h);
      const double d2 = (taylor2(yp, inst.prob) - taylor2(ym, inst.prob)) / (2 * h);
      CHECK(g1(i) == doctest::Approx(d1).epsilon(1e-5).scale(1.0));
      CHECK(g2(i) == doctest::Approx(d2).epsilon(1e-5).scale(1.0));
    }
  }
}

TEST_CASE("cross and second denominator moments match enumeration") {
  const Instance inst = make_instance(5, 2, 55);
  const auto& prob = inst.prob;
  Rng rng(56);
  for (int trial = 0; trial < 5; ++trial) {
    VectorXd y(5);
    for (int i = 0; i < 5; ++i) y(i) = rng.uniform(-0.9, 0.9);
    double cv = 0.0, v2 = 0.0;
    VectorXd x(5);
    for (std::uint64_t mask = 0; mask < 32; ++mask) {
      double w = 1.0;
      for (int i = 0; i < 5; ++i) {
        const bool up = (mask >> i) & 1ULL;
        x(i) = up ? 1.0 : -1.0;
        w *= up ? (1.0 + y(i)) / 2.0 : (1.0 - y(i)) / 2.0;
      }
      const double fs = x.dot(prob.R0 * x) + prob.c0.dot(x);
      const double fI = x.dot(prob.K * x) + prob.s.dot(x);
      cv += w * fs * fI;
      v2 += w * fI * fI;
    }
    CHECK(cross_moment(y, prob) == doctest::Approx(cv).epsilon(1e-9));
    CHECK(denom_second_moment(y, prob) == doctest::Approx(v2).epsilon(1e-9));
    CHECK(cross_moment(y, prob, SecondMomentImpl::LiteralKron) ==
          doctest::Approx(cv).epsilon(1e-9));
  }
}

TEST_CASE("signal alignment emits +-1 and beats random phases without interference") {
  double aligned_total = 0.0, random_total = 0.0;
  Rng trng(57);
  for (int inst_i = 0; inst_i < 20; ++inst_i) {
    const Instance inst = make_instance(16, 0, 600 + inst_i);
    const VectorXd t = sa_init(inst.ch);
    for (int i = 0; i < t.size(); ++i) CHECK(std::abs(t(i)) == 1.0);
    aligned_total += sinr(t, inst.prob);
    VectorXd r(16);
    for (int i = 0; i < 16; ++i) r(i) = (trng.uniform() < 0.5) ? -1.0 : 1.0;
    random_total += sinr(r, inst.prob);
  }
  CHECK(aligned_total > random_total);
}

TEST_CASE("box projection clips exactly to [-1, 1]") {
  VectorXd v(4);
  v << -2.5, -0.3, 0.9, 7.0;
  const VectorXd p = project_box(v);
  CHECK(p(0) == -1.0);
  CHECK(p(1) == -0.3);
  CHECK(p(2) == 0.9);
  CHECK(p(3) == 1.0);
  CHECK(project_box(p) == p);
}

TEST_CASE("the line search accepts only sufficient increase") {
  const Instance inst = make_instance(6, 1, 61);
  EgdConfig cfg;
  VectorXd y = 0.5 * sa_init(inst.ch);
  const auto J = [&inst](const VectorXd& v) { return taylor1(v, inst.prob); };
  const VectorXd g = grad_taylor1(y, inst.prob);
  const double beta = ag_line_search(y, g, J, cfg);
  REQUIRE(beta > 0.0);
  CHECK(J(project_box(y + beta * g)) >=
        J(y) + cfg.eps_armijo * beta * g.squaredNorm());
  // A descending direction admits no acceptable step.
  CHECK(ag_line_search(y, -g, J, cfg) == 0.0);
}

TEST_CASE("solver output is consistent and the order knob is validated") {
  const Instance inst = make_instance(10, 1, 63);
  EgdConfig cfg;
  Rng rng(64);
  const EgdResult res = egd_solve(inst.prob, inst.ch, cfg, rng);
  REQUIRE(res.theta_best.size() == 10);
  for (int i = 0; i < 10; ++i) CHECK(std::abs(res.theta_best(i)) == 1.0);
  CHECK(res.sinr_best == doctest::Approx(sinr(res.theta_best, inst.prob)));
  CHECK(res.iterations == static_cast<int>(res.trace.size()));
  CHECK(res.iterations >= 1);
  CHECK_FALSE(res.truncated);
  for (int i = 0; i < 10; ++i) {
    CHECK(res.y_star(i) >= -1.0);
    CHECK(res.y_star(i) <= 1.0);
  }

  EgdConfig bad;
  bad.order = 3;
  Rng rng2(65);
  CHECK_THROWS_AS(egd_solve(inst.prob, inst.ch, bad, rng2),
                  std::invalid_argument);
}

TEST_CASE("identical seeds give identical solves") {
  const Instance inst = make_instance(12, 1, 67);
  EgdConfig cfg;
  cfg.order = 2;
  Rng r1(68), r2(68);
  const EgdResult a = egd_solve(inst.prob, inst.ch, cfg, r1);
  const EgdResult b = egd_solve(inst.prob, inst.ch, cfg, r2);
  CHECK(a.theta_best == b.theta_best);
  CHECK(a.sinr_best == b.sinr_best);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("tiny instances are solved to the exhaustive optimum almost always") {
  // First-order solver at N = 2: compare against full enumeration.
  int hits = 0;
  const Alphabet pm{{-1.0, 1.0}};
  for (int k = 0; k < 200; ++k) {
    const Instance inst = make_instance(2, 1, 700 + k);
    EgdConfig cfg;
    Rng rng(9000 + k);
    const EgdResult res = egd_solve(inst.prob, inst.ch, cfg, rng);
    const auto [x_best, v_best] = exhaustive(
        [&inst](const VectorXd& t) { return sinr(t, inst.prob); }, pm, 2);
    if (res.sinr_best >= v_best * (1.0 - 1e-9)) ++hits;
  }
  CHECK(hits >= 190);  // >= 95% of 200 seeds
}

TEST_CASE("expectation solver beats the rounding baseline on average") {
  // N = 10 paired comparison against the continuous-relaxation-then-round
  // solver over the same channels.
  double egd_total = 0.0, cpp_total = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Instance inst = make_instance(10, 1, 7100 + k);
    EgdConfig cfg;
    Rng rng(9100 + k);
    egd_total += capacity(egd_solve(inst.prob, inst.ch, cfg, rng).theta_best,
                          inst.prob);
    cpp_total +=
        capacity(cpp2(inst.prob, sa_init(inst.ch), cfg), inst.prob);
  }
  CHECK(egd_total >= cpp_total);
}

// Expectation-based projected gradient solver for +-1 phase selection.
//
// The discrete SINR maximization is relaxed to the box [-1,1]^N through the
// mean vector y of an independent +-1 distribution. First- and second-order
// Taylor surrogates of E[f_s/f_I] are ascended with an Armijo-Goldstein
// backtracking line search and box projection; the solution distribution is
// then sampled and the best drawn phase vector returned.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "prfopt/binary_moments.hpp"
#include "prfopt/rng.hpp"
#include "prfopt/sinr_scenario.hpp"

namespace prf {

struct EgdConfig {
  int order = 1;              // surrogate order (1 or 2)
  double rho = 0.5;           // backtracking shrink factor
  double eps_armijo = 5e-4;   // sufficient-increase slope
  double eps_th = 1e-9;       // stop when ||dy||^2 <= eps_th * N
  double beta_init = 0.01;    // first step size tried
  int G = 100;                // final sample count
  int max_iter = 1000;        // safety cap
  double temper = 0.25;       // final-sampling mix toward uniform, in [0,1]
  SecondMomentImpl qs_impl = SecondMomentImpl::Direct;
};

// First-order surrogate: ratio of the two expected forms,
// J1(y) = E[f_s] / E[f_I].
double taylor1(const Eigen::VectorXd& y, const SinrProblem& prob);
Eigen::VectorXd grad_taylor1(const Eigen::VectorXd& y, const SinrProblem& prob);

// Second-order surrogate: J1 corrected by the covariance terms
// J2 = J1 - E[f_s f_I]/E[f_I]^2 + E[f_I^2] E[f_s]/E[f_I]^3.
double taylor2(const Eigen::VectorXd& y, const SinrProblem& prob,
               SecondMomentImpl impl = SecondMomentImpl::Direct);
Eigen::VectorXd grad_taylor2(const Eigen::VectorXd& y, const SinrProblem& prob,
                             SecondMomentImpl impl = SecondMomentImpl::Direct);

// Cross- and second moments of the SINR's numerator and denominator forms
// (exposed for tests): E[f_s f_I], E[f_I^2], and their gradients in y.
double cross_moment(const Eigen::VectorXd& y, const SinrProblem& prob,
                    SecondMomentImpl impl = SecondMomentImpl::Direct);
double denom_second_moment(const Eigen::VectorXd& y, const SinrProblem& prob,
                           SecondMomentImpl impl = SecondMomentImpl::Direct);
Eigen::VectorXd grad_cross_moment(const Eigen::VectorXd& y,
                                  const SinrProblem& prob,
                                  SecondMomentImpl impl = SecondMomentImpl::Direct);
Eigen::VectorXd grad_denom_second_moment(
    const Eigen::VectorXd& y, const SinrProblem& prob,
    SecondMomentImpl impl = SecondMomentImpl::Direct);

// Signal-alignment initialization: per element, the continuous phase that
// aligns the reflected path with the direct path (reference phase 0 when
// the direct path is blocked), projected to the nearer of {+1, -1}.
Eigen::VectorXd sa_init(const ChannelSet& ch);

// Clip every entry into [-1, 1].
Eigen::VectorXd project_box(const Eigen::VectorXd& v);

// Largest step beta_init * rho^k (k <= 60, beta floor 1e-18) satisfying the
// sufficient-increase test J(project_box(y + beta g)) >= J(y) +
// eps_armijo * beta * ||g||^2. Returns 0 when no step qualifies.
double ag_line_search(const Eigen::VectorXd& y, const Eigen::VectorXd& grad,
                      const std::function<double(const Eigen::VectorXd&)>& J,
                      const EgdConfig& cfg);

struct EgdResult {
  Eigen::VectorXd y_star;      // converged box point
  Eigen::VectorXd theta_best;  // best sampled +-1 vector
  double sinr_best = 0.0;
  std::vector<double> trace;   // log2(1 + surrogate) per iteration
  int iterations = 0;
  bool truncated = false;      // max_iter reached before the stop test
};

// Full solve: signal-aligned vertex start, projected surrogate ascent, then
// final selection over sign(y*) plus cfg.G draws from the tempered solution
// distribution p = (1 - temper) (y*+1)/2 + temper/2, scored by true SINR.
EgdResult egd_solve(const SinrProblem& prob, const ChannelSet& ch,
                    const EgdConfig& cfg, Rng& rng);

}  // namespace prf

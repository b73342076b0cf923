// Score-function (log-derivative) stochastic solvers for binary and ternary
// phase selection.
//
// The objective J is MINIMIZED and evaluated on sample batches: callers pass
// e.g. J = -SINR, -rate, or -EE. Gradients of E[J] in the distribution
// parameters are estimated as sample means of J * dlogP, variance-reduced by
// the closed-form optimal scalar baseline, and followed by projected
// constant-step descent. The ternary solver alternates the two parameter
// blocks (probability of -1, probability of +1) under an outer loop with a
// keep/revert test on the sampled mean objective.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "prfopt/rng.hpp"
#include "prfopt/sinr_scenario.hpp"

namespace prf {

// J evaluated on a batch: row k of thetas -> out(k). Minimization convention.
using BatchObjective = std::function<Eigen::VectorXd(const Eigen::MatrixXd&)>;

// Interior floor keeping 1/p and 1/(1-p-q) terms finite.
constexpr double kSsaDelta = 1e-3;

// Per-element probabilities of the ternary states: p for -1, q for +1,
// remainder 1-p-q for 0 (element off). Strict interior required.
struct TernaryParams {
  Eigen::VectorXd p, q;
  void validate() const;  // throws std::domain_error off the open interior
};

enum class Wrt { P, Q };

struct SsaConfig {
  int t_max = 300;        // subproblem iteration cap
  double eps_t = 1e-8;    // subproblem stop: ||dr||^2 <= eps_t
  double beta_s = 0.5;    // constant step size
  int N_e = 200;          // samples per estimator batch
  int b_m = 10;           // batches per iteration
  double r_max = 0.1;     // init: probabilities drawn uniform in [delta, r_max]
  int G_s = 10000;        // final / per-round sample count
  double eps_bcd = 1e-6;  // outer stop on relative mean-objective change
  int max_rounds = 50;    // outer loop safety cap
  double temper = 0.25;   // final-sampling mix toward uniform
};

// d log P(theta) / d p (or q), entrywise; theta in {-1,0,1}^N.
Eigen::VectorXd log_grad_ternary(const Eigen::VectorXd& theta,
                                 const TernaryParams& params, Wrt wrt);

// d log P(theta) / d p for independent +-1 entries with P(+1) = p.
Eigen::VectorXd log_grad_binary(const Eigen::VectorXd& theta,
                                const Eigen::VectorXd& p);

// One estimator batch: raw score-gradient estimate and mean score vector
// over the same N_e draws (common random numbers).
struct EstimatorBatch {
  int N_e = 0;
  Eigen::VectorXd g_hat;  // (1/N_e) sum_k J_k dlogP_k
  Eigen::VectorXd d;      // (1/N_e) sum_k dlogP_k
};

// Draw N_e ternary samples from params and estimate the gradient of E[J]
// with respect to the chosen block, with baseline b already subtracted from
// g_hat ((J - b) weighting). b = 0 gives the raw estimator.
EstimatorBatch grad_estimate(const BatchObjective& J,
                             const TernaryParams& params, Wrt wrt, int N_e,
                             double baseline, Rng& rng);

// Binary counterpart (theta in {-1,+1}^N, p = probability of +1).
EstimatorBatch grad_estimate_binary(const BatchObjective& J,
                                    const Eigen::VectorXd& p, int N_e,
                                    double baseline, Rng& rng);

// Variance-optimal scalar baseline from per-batch raw estimates:
// b* = N_e / sum_n(1/r_n + 1/(1-p_n-q_n)) * mean_b(g_hat_b . d_b).
// The binary overload uses sum_n(1/p_n + 1/(1-p_n)).
double optimal_baseline(const TernaryParams& params, Wrt wrt,
                        const std::vector<EstimatorBatch>& batches);
double optimal_baseline_binary(const Eigen::VectorXd& p,
                               const std::vector<EstimatorBatch>& batches);

// Projected stochastic descent on one ternary block r (the other block s
// held fixed): per iteration, b_m batches of N_e samples feed the baseline
// estimate, the batch-mean variance-reduced gradient drives the step
// r <- clip(r - beta_s g, delta, 1-delta) capped at 1 - s - delta.
// Returns the final block after at most t_max iterations or the first
// iteration with ||dr||^2 <= eps_t.
Eigen::VectorXd ssa_subproblem(const BatchObjective& J,
                               const Eigen::VectorXd& fixed_s,
                               Eigen::VectorXd r, Wrt wrt,
                               const SsaConfig& cfg, Rng& rng);

struct SsaTResult {
  Eigen::VectorXd theta;            // best sampled ternary vector
  double value = 0.0;               // J at theta (minimum found)
  std::vector<double> gamma_trace;  // sampled mean J per outer round
  std::vector<double> best_trace;   // best -J so far per outer round
  int rounds = 0;
};

// Alternating two-block solver: optimize p then q via ssa_subproblem, draw
// G_s samples, track the best, keep or revert the distribution on the
// sampled mean, stop when its relative change falls below eps_bcd. A final
// candidate set (per-element modal rounding plus G_s tempered draws) can
// only improve the reported best.
SsaTResult ssa_t_bcd(const BatchObjective& J, int N, const SsaConfig& cfg,
                     Rng& rng);

// Binary solver on the SINR problem: projected stochastic descent of -SINR
// on p from the uninformative start 0.5, then final selection over the
// rounding of p plus G_s tempered draws, scored by true SINR.
Eigen::VectorXd ssa_b_solve(const SinrProblem& prob, const SsaConfig& cfg,
                            Rng& rng);

}  // namespace prf

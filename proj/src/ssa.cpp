#include "prfopt/ssa.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace prf {

namespace {

Eigen::MatrixXd sample_ternary(const TernaryParams& params, int M, Rng& rng) {
  const int N = static_cast<int>(params.p.size());
  Eigen::MatrixXd out(M, N);
  for (int k = 0; k < M; ++k)
    for (int i = 0; i < N; ++i) {
      const double u = rng.uniform();
      out(k, i) = (u < params.p(i)) ? -1.0
                  : (u < params.p(i) + params.q(i)) ? 1.0
                                                    : 0.0;
    }
  return out;
}

Eigen::MatrixXd sample_binary(const Eigen::VectorXd& p, int M, Rng& rng) {
  const int N = static_cast<int>(p.size());
  Eigen::MatrixXd out(M, N);
  for (int k = 0; k < M; ++k)
    for (int i = 0; i < N; ++i)
      out(k, i) = (rng.uniform() < p(i)) ? 1.0 : -1.0;
  return out;
}

}  // namespace

void TernaryParams::validate() const {
  if (p.size() != q.size()) throw std::domain_error("p, q size mismatch");
  for (int i = 0; i < p.size(); ++i) {
    if (!(p(i) > 0.0 && p(i) < 1.0 && q(i) > 0.0 && q(i) < 1.0))
      throw std::domain_error("ternary probabilities must lie in (0,1)");
    if (p(i) + q(i) > 1.0 - 1e-9)
      throw std::domain_error("need p + q <= 1 - 1e-9 entrywise");
  }
}

Eigen::VectorXd log_grad_ternary(const Eigen::VectorXd& theta,
                                 const TernaryParams& params, Wrt wrt) {
  params.validate();
  const int N = static_cast<int>(theta.size());
  if (N != params.p.size()) throw std::invalid_argument("dimension mismatch");
  Eigen::VectorXd out(N);
  for (int i = 0; i < N; ++i) {
    const double t = theta(i);
    const double off = (t * t - 1.0) / (1.0 - params.p(i) - params.q(i));
    out(i) = (wrt == Wrt::P) ? t * (t - 1.0) / (2.0 * params.p(i)) + off
                             : t * (t + 1.0) / (2.0 * params.q(i)) + off;
  }
  return out;
}

Eigen::VectorXd log_grad_binary(const Eigen::VectorXd& theta,
                                const Eigen::VectorXd& p) {
  const int N = static_cast<int>(theta.size());
  if (N != p.size()) throw std::invalid_argument("dimension mismatch");
  Eigen::VectorXd out(N);
  for (int i = 0; i < N; ++i) {
    if (!(p(i) > 0.0 && p(i) < 1.0))
      throw std::domain_error("binary probabilities must lie in (0,1)");
    out(i) = (1.0 + theta(i)) / (2.0 * p(i)) -
             (1.0 - theta(i)) / (2.0 * (1.0 - p(i)));
  }
  return out;
}

namespace {

EstimatorBatch score_batch(const Eigen::MatrixXd& thetas,
                           const Eigen::VectorXd& J, double baseline,
                           const std::function<Eigen::VectorXd(
                               const Eigen::VectorXd&)>& log_grad) {
  EstimatorBatch batch;
  const int M = static_cast<int>(thetas.rows());
  const int N = static_cast<int>(thetas.cols());
  batch.N_e = M;
  batch.g_hat = Eigen::VectorXd::Zero(N);
  batch.d = Eigen::VectorXd::Zero(N);
  for (int k = 0; k < M; ++k) {
    const Eigen::VectorXd sc = log_grad(thetas.row(k).transpose());
    batch.g_hat += (J(k) - baseline) * sc;
    batch.d += sc;
  }
  batch.g_hat /= static_cast<double>(M);
  batch.d /= static_cast<double>(M);
  return batch;
}

}  // namespace

EstimatorBatch grad_estimate(const BatchObjective& J,
                             const TernaryParams& params, Wrt wrt, int N_e,
                             double baseline, Rng& rng) {
  if (N_e < 2) throw std::invalid_argument("need N_e >= 2");
  params.validate();
  const Eigen::MatrixXd thetas = sample_ternary(params, N_e, rng);
  const Eigen::VectorXd Jv = J(thetas);
  return score_batch(thetas, Jv, baseline, [&](const Eigen::VectorXd& t) {
    return log_grad_ternary(t, params, wrt);
  });
}

EstimatorBatch grad_estimate_binary(const BatchObjective& J,
                                    const Eigen::VectorXd& p, int N_e,
                                    double baseline, Rng& rng) {
  if (N_e < 2) throw std::invalid_argument("need N_e >= 2");
  const Eigen::MatrixXd thetas = sample_binary(p, N_e, rng);
  const Eigen::VectorXd Jv = J(thetas);
  return score_batch(thetas, Jv, baseline, [&](const Eigen::VectorXd& t) {
    return log_grad_binary(t, p);
  });
}

namespace {

double baseline_from(const std::vector<EstimatorBatch>& batches,
                     double denom) {
  if (batches.empty()) throw std::invalid_argument("need at least one batch");
  double egd = 0.0;
  for (const auto& b : batches) egd += b.g_hat.dot(b.d);
  egd /= static_cast<double>(batches.size());
  return static_cast<double>(batches.front().N_e) / denom * egd;
}

}  // namespace

double optimal_baseline(const TernaryParams& params, Wrt wrt,
                        const std::vector<EstimatorBatch>& batches) {
  params.validate();
  double denom = 0.0;
  for (int i = 0; i < params.p.size(); ++i) {
    const double r = (wrt == Wrt::P) ? params.p(i) : params.q(i);
    denom += 1.0 / r + 1.0 / (1.0 - params.p(i) - params.q(i));
  }
  return baseline_from(batches, denom);
}

double optimal_baseline_binary(const Eigen::VectorXd& p,
                               const std::vector<EstimatorBatch>& batches) {
  double denom = 0.0;
  for (int i = 0; i < p.size(); ++i)
    denom += 1.0 / p(i) + 1.0 / (1.0 - p(i));
  return baseline_from(batches, denom);
}

namespace {

// Shared projected-descent loop body: returns the projected block.
Eigen::VectorXd project_block(const Eigen::VectorXd& r,
                              const Eigen::VectorXd& s) {
  Eigen::VectorXd out =
      r.cwiseMax(kSsaDelta).cwiseMin(1.0 - kSsaDelta);
  return out.cwiseMin(Eigen::VectorXd::Constant(r.size(), 1.0 - kSsaDelta) -
                      s);
}

}  // namespace

Eigen::VectorXd ssa_subproblem(const BatchObjective& J,
                               const Eigen::VectorXd& fixed_s,
                               Eigen::VectorXd r, Wrt wrt,
                               const SsaConfig& cfg, Rng& rng) {
  const int N = static_cast<int>(r.size());
  r = project_block(r, fixed_s);  // callers may hand in an infeasible start
  for (int t = 0; t < cfg.t_max; ++t) {
    TernaryParams params;
    if (wrt == Wrt::P) {
      params.p = r;
      params.q = fixed_s;
    } else {
      params.p = fixed_s;
      params.q = r;
    }
    std::vector<EstimatorBatch> batches;
    batches.reserve(static_cast<std::size_t>(cfg.b_m));
    Eigen::VectorXd g_mean = Eigen::VectorXd::Zero(N);
    Eigen::VectorXd d_mean = Eigen::VectorXd::Zero(N);
    for (int b = 0; b < cfg.b_m; ++b) {
      batches.push_back(grad_estimate(J, params, wrt, cfg.N_e, 0.0, rng));
      g_mean += batches.back().g_hat;
      d_mean += batches.back().d;
    }
    g_mean /= static_cast<double>(cfg.b_m);
    d_mean /= static_cast<double>(cfg.b_m);
    const double b_star = optimal_baseline(params, wrt, batches);
    const Eigen::VectorXd g_tilde = g_mean - b_star * d_mean;
    const Eigen::VectorXd r_next = project_block(r - cfg.beta_s * g_tilde,
                                                 fixed_s);
    const double d2 = (r_next - r).squaredNorm();
    r = r_next;
    if (d2 <= cfg.eps_t) break;
  }
  return r;
}

SsaTResult ssa_t_bcd(const BatchObjective& J, int N, const SsaConfig& cfg,
                     Rng& rng) {
  SsaTResult res;
  TernaryParams cur;
  cur.p.resize(N);
  cur.q.resize(N);
  for (int i = 0; i < N; ++i) cur.p(i) = rng.uniform(kSsaDelta, cfg.r_max);
  for (int i = 0; i < N; ++i) cur.q(i) = rng.uniform(kSsaDelta, cfg.r_max);
  cur.q = project_block(cur.q, cur.p);

  double best_val = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_theta = Eigen::VectorXd::Zero(N);
  double gamma_prev = std::numeric_limits<double>::quiet_NaN();
  TernaryParams snap = cur;

  const auto scan_best = [&](const Eigen::MatrixXd& thetas,
                             const Eigen::VectorXd& Jv) {
    for (int k = 0; k < Jv.size(); ++k)
      if (Jv(k) < best_val) {
        best_val = Jv(k);
        best_theta = thetas.row(k).transpose();
      }
  };

  for (int round = 0; round < cfg.max_rounds; ++round) {
    cur.p = ssa_subproblem(J, cur.q, cur.p, Wrt::P, cfg, rng);
    cur.q = ssa_subproblem(J, cur.p, cur.q, Wrt::Q, cfg, rng);
    const Eigen::MatrixXd thetas = sample_ternary(cur, cfg.G_s, rng);
    const Eigen::VectorXd Jv = J(thetas);
    const double gamma = Jv.mean();
    scan_best(thetas, Jv);
    res.gamma_trace.push_back(gamma);
    res.best_trace.push_back(-best_val);
    res.rounds = round + 1;
    if (!std::isnan(gamma_prev)) {
      if (gamma >= gamma_prev) cur = snap;  // revert to the better distribution
      const double denom = std::abs(gamma_prev);
      const double delta = (denom == 0.0)
                               ? std::numeric_limits<double>::infinity()
                               : std::abs(gamma - gamma_prev) / denom;
      if (delta <= cfg.eps_bcd) break;
    }
    if (std::isnan(gamma_prev) || gamma < gamma_prev) {
      gamma_prev = gamma;
      snap = cur;
    }
  }

  // Final candidates: per-element modal rounding plus tempered draws.
  Eigen::VectorXd mode(N);
  for (int i = 0; i < N; ++i) {
    const double off = 1.0 - cur.p(i) - cur.q(i);
    if (cur.p(i) >= cur.q(i) && cur.p(i) >= off)
      mode(i) = -1.0;
    else if (cur.q(i) >= off)
      mode(i) = 1.0;
    else
      mode(i) = 0.0;
  }
  {
    const Eigen::MatrixXd m = mode.transpose();
    scan_best(m, J(m));
  }
  TernaryParams tempered;
  tempered.p = (1.0 - cfg.temper) * cur.p +
               Eigen::VectorXd::Constant(N, cfg.temper / 3.0);
  tempered.q = (1.0 - cfg.temper) * cur.q +
               Eigen::VectorXd::Constant(N, cfg.temper / 3.0);
  const Eigen::MatrixXd thetas = sample_ternary(tempered, cfg.G_s, rng);
  scan_best(thetas, J(thetas));

  res.theta = best_theta;
  res.value = best_val;
  return res;
}

Eigen::VectorXd ssa_b_solve(const SinrProblem& prob, const SsaConfig& cfg,
                            Rng& rng) {
  const int N = prob.N();
  // Batch -SINR through the quadratic forms.
  const BatchObjective J = [&](const Eigen::MatrixXd& thetas) {
    const Eigen::VectorXd fs =
        ((thetas * prob.R0).cwiseProduct(thetas)).rowwise().sum() +
        thetas * prob.c0;
    const Eigen::VectorXd fI =
        ((thetas * prob.K).cwiseProduct(thetas)).rowwise().sum() +
        thetas * prob.s;
    return (-fs.array() / fI.array()).matrix().eval();
  };

  Eigen::VectorXd p = Eigen::VectorXd::Constant(N, 0.5);
  for (int t = 0; t < cfg.t_max; ++t) {
    std::vector<EstimatorBatch> batches;
    batches.reserve(static_cast<std::size_t>(cfg.b_m));
    Eigen::VectorXd g_mean = Eigen::VectorXd::Zero(N);
    Eigen::VectorXd d_mean = Eigen::VectorXd::Zero(N);
    for (int b = 0; b < cfg.b_m; ++b) {
      batches.push_back(grad_estimate_binary(J, p, cfg.N_e, 0.0, rng));
      g_mean += batches.back().g_hat;
      d_mean += batches.back().d;
    }
    g_mean /= static_cast<double>(cfg.b_m);
    d_mean /= static_cast<double>(cfg.b_m);
    const double b_star = optimal_baseline_binary(p, batches);
    const Eigen::VectorXd g_tilde = g_mean - b_star * d_mean;
    const Eigen::VectorXd p_next =
        (p - cfg.beta_s * g_tilde).cwiseMax(kSsaDelta).cwiseMin(1.0 - kSsaDelta);
    const double d2 = (p_next - p).squaredNorm();
    p = p_next;
    if (d2 <= cfg.eps_t) break;
  }

  // Final selection by true SINR: rounding of p, then tempered draws.
  Eigen::VectorXd best(N);
  for (int i = 0; i < N; ++i) best(i) = (p(i) >= 0.5) ? 1.0 : -1.0;
  double best_val = sinr(best, prob);
  const Eigen::VectorXd p_smp =
      (1.0 - cfg.temper) * p +
      Eigen::VectorXd::Constant(N, cfg.temper / 2.0);
  Eigen::VectorXd cand(N);
  for (int g = 0; g < cfg.G_s; ++g) {
    for (int i = 0; i < N; ++i)
      cand(i) = (rng.uniform() < p_smp(i)) ? 1.0 : -1.0;
    const double val = sinr(cand, prob);
    if (val > best_val) {
      best_val = val;
      best = cand;
    }
  }
  return best;
}

}  // namespace prf

#include "prfopt/egd.hpp"

#include <cmath>
#include <stdexcept>

namespace prf {

namespace {

// Hollow quadratic coupling between two linear coefficient vectors:
// a^T ((y y^T) o E_m + I) b with E_m the hollow all-ones matrix.
double linear_cross(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                    const Eigen::VectorXd& y) {
  const double ay = a.dot(y), by = b.dot(y);
  return ay * by - a.cwiseProduct(y).dot(b.cwiseProduct(y)) + a.dot(b);
}

// Gradient of linear_cross in y (a, b fixed).
Eigen::VectorXd grad_linear_cross(const Eigen::VectorXd& a,
                                  const Eigen::VectorXd& b,
                                  const Eigen::VectorXd& y) {
  const double ay = a.dot(y), by = b.dot(y);
  return a * by + b * ay - 2.0 * a.cwiseProduct(b).cwiseProduct(y);
}

}  // namespace

double taylor1(const Eigen::VectorXd& y, const SinrProblem& prob) {
  const double den = mean_qf(prob.K, prob.s, y);
  if (den <= 0.0) throw std::domain_error("expected denominator not positive");
  return mean_qf(prob.R0, prob.c0, y) / den;
}

Eigen::VectorXd grad_taylor1(const Eigen::VectorXd& y, const SinrProblem& prob) {
  const double den = mean_qf(prob.K, prob.s, y);
  if (den <= 0.0) throw std::domain_error("expected denominator not positive");
  const double j1 = mean_qf(prob.R0, prob.c0, y) / den;
  return (grad_qf(prob.R0, prob.c0, y) - j1 * grad_qf(prob.K, prob.s, y)) / den;
}

double cross_moment(const Eigen::VectorXd& y, const SinrProblem& prob,
                    SecondMomentImpl impl) {
  // E[f_s f_I]: the quartic part E[(t^T R0 t)(t^T K t)] by polarization of
  // the square moment, plus the quadratic-linear cross terms and the
  // linear-linear coupling.
  const double quad = (mean_qs(prob.R0 + prob.K, y, impl) -
                       mean_qs(prob.R0 - prob.K, y, impl)) /
                      4.0;
  return quad + mean_ql(prob.R0, prob.s, y) + mean_ql(prob.K, prob.c0, y) +
         linear_cross(prob.c0, prob.s, y);
}

double denom_second_moment(const Eigen::VectorXd& y, const SinrProblem& prob,
                           SecondMomentImpl impl) {
  return mean_qs(prob.K, y, impl) + linear_cross(prob.s, prob.s, y) +
         2.0 * mean_ql(prob.K, prob.s, y);
}

Eigen::VectorXd grad_cross_moment(const Eigen::VectorXd& y,
                                  const SinrProblem& prob,
                                  SecondMomentImpl impl) {
  const Eigen::VectorXd quad = (grad_qs(prob.R0 + prob.K, y, impl) -
                                grad_qs(prob.R0 - prob.K, y, impl)) /
                               4.0;
  return quad + grad_ql(prob.R0, prob.s, y) + grad_ql(prob.K, prob.c0, y) +
         grad_linear_cross(prob.c0, prob.s, y);
}

Eigen::VectorXd grad_denom_second_moment(const Eigen::VectorXd& y,
                                         const SinrProblem& prob,
                                         SecondMomentImpl impl) {
  return grad_qs(prob.K, y, impl) + grad_linear_cross(prob.s, prob.s, y) +
         2.0 * grad_ql(prob.K, prob.s, y);
}

double taylor2(const Eigen::VectorXd& y, const SinrProblem& prob,
               SecondMomentImpl impl) {
  const double den = mean_qf(prob.K, prob.s, y);
  if (den <= 0.0) throw std::domain_error("expected denominator not positive");
  const double num = mean_qf(prob.R0, prob.c0, y);
  const double cv = cross_moment(y, prob, impl);
  const double v = denom_second_moment(y, prob, impl);
  return num / den - cv / (den * den) + v * num / (den * den * den);
}

Eigen::VectorXd grad_taylor2(const Eigen::VectorXd& y, const SinrProblem& prob,
                             SecondMomentImpl impl) {
  const double den = mean_qf(prob.K, prob.s, y);
  if (den <= 0.0) throw std::domain_error("expected denominator not positive");
  const double num = mean_qf(prob.R0, prob.c0, y);
  const double cv = cross_moment(y, prob, impl);
  const double v = denom_second_moment(y, prob, impl);
  const Eigen::VectorXd gnum = grad_qf(prob.R0, prob.c0, y);
  const Eigen::VectorXd gden = grad_qf(prob.K, prob.s, y);
  const double d2 = den * den, d3 = d2 * den, d4 = d3 * den;
  return (gnum - (num / den) * gden) / den -
         grad_cross_moment(y, prob, impl) / d2 +
         num * (grad_denom_second_moment(y, prob, impl) / d3 -
                3.0 * v * gden / d4) +
         2.0 * cv * gden / d3 + v * gnum / d3;
}

Eigen::VectorXd sa_init(const ChannelSet& ch) {
  const auto& hc = ch.hc[0];
  const std::complex<double> hd = ch.h_d[0];
  const double ref = (std::abs(hd) > 0.0) ? std::arg(hd) : 0.0;
  Eigen::VectorXd theta(hc.size());
  for (int n = 0; n < hc.size(); ++n)
    theta(n) = (std::cos(ref - std::arg(hc(n))) >= 0.0) ? 1.0 : -1.0;
  return theta;
}

Eigen::VectorXd project_box(const Eigen::VectorXd& v) {
  return v.cwiseMax(-1.0).cwiseMin(1.0);
}

double ag_line_search(const Eigen::VectorXd& y, const Eigen::VectorXd& grad,
                      const std::function<double(const Eigen::VectorXd&)>& J,
                      const EgdConfig& cfg) {
  const double base = J(y);
  const double slope = cfg.eps_armijo * grad.squaredNorm();
  double beta = cfg.beta_init;
  for (int k = 0; k <= 60 && beta >= 1e-18; ++k) {
    // Near the step floor, beta * grad can underflow below the resolution of
    // y, making the sufficient-increase test vacuously true; require the
    // projected step to actually move the iterate.
    const Eigen::VectorXd y_new = project_box(y + beta * grad);
    if (y_new != y && J(y_new) >= base + beta * slope) return beta;
    beta *= cfg.rho;
  }
  return 0.0;
}

EgdResult egd_solve(const SinrProblem& prob, const ChannelSet& ch,
                    const EgdConfig& cfg, Rng& rng) {
  if (cfg.order != 1 && cfg.order != 2)
    throw std::invalid_argument("surrogate order must be 1 or 2");
  const int N = prob.N();
  const auto J = [&](const Eigen::VectorXd& v) {
    return cfg.order == 1 ? taylor1(v, prob) : taylor2(v, prob, cfg.qs_impl);
  };
  const auto gradJ = [&](const Eigen::VectorXd& v) {
    return cfg.order == 1 ? grad_taylor1(v, prob)
                          : grad_taylor2(v, prob, cfg.qs_impl);
  };

  EgdResult res;
  Eigen::VectorXd y = sa_init(ch);
  res.truncated = true;
  for (int t = 0; t < cfg.max_iter; ++t) {
    const Eigen::VectorXd g = gradJ(y);
    const double beta = ag_line_search(y, g, J, cfg);
    const Eigen::VectorXd y_next = project_box(y + beta * g);
    const double delta2 = (y_next - y).squaredNorm();
    y = y_next;
    res.trace.push_back(std::log2(1.0 + J(y)));
    res.iterations = t + 1;
    if (beta == 0.0 || delta2 <= cfg.eps_th * static_cast<double>(N)) {
      res.truncated = false;
      break;
    }
  }
  res.y_star = y;

  // Final selection: deterministic rounding first, then G draws from the
  // tempered solution distribution.
  Eigen::VectorXd best(N);
  for (int i = 0; i < N; ++i) best(i) = (y(i) >= 0.0) ? 1.0 : -1.0;
  double best_val = sinr(best, prob);
  Eigen::VectorXd p_smp =
      (1.0 - cfg.temper) * ((y.array() + 1.0) / 2.0).matrix() +
      Eigen::VectorXd::Constant(N, cfg.temper / 2.0);
  Eigen::VectorXd cand(N);
  for (int gidx = 0; gidx < cfg.G; ++gidx) {
    for (int i = 0; i < N; ++i)
      cand(i) = (rng.uniform() < p_smp(i)) ? 1.0 : -1.0;
    const double val = sinr(cand, prob);
    if (val > best_val) {
      best_val = val;
      best = cand;
    }
  }
  res.theta_best = best;
  res.sinr_best = best_val;
  return res;
}

}  // namespace prf

#include "prfopt/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace prf {

namespace {

// Backtracking sufficient-increase search without any feasible-set
// projection (used for the unconstrained phase ascent).
double line_search_free(const Eigen::VectorXd& y, const Eigen::VectorXd& grad,
                        const std::function<double(const Eigen::VectorXd&)>& J,
                        const EgdConfig& cfg) {
  const double base = J(y);
  const double slope = cfg.eps_armijo * grad.squaredNorm();
  double beta = cfg.beta_init;
  for (int k = 0; k <= 60 && beta >= 1e-18; ++k) {
    if (J(y + beta * grad) >= base + beta * slope) return beta;
    beta *= cfg.rho;
  }
  return 0.0;
}

}  // namespace

std::pair<Eigen::VectorXd, double> exhaustive(const Objective& J,
                                              const Alphabet& alphabet, int N,
                                              std::uint64_t cap) {
  alphabet.validate();
  if (N < 1) throw std::invalid_argument("exhaustive: N must be positive");
  const double total = std::pow(static_cast<double>(alphabet.size()),
                                static_cast<double>(N));
  if (total > static_cast<double>(cap)) {
    throw std::length_error(
        "exhaustive: alphabet size^N exceeds the enumeration cap " +
        std::to_string(cap));
  }

  const int b = alphabet.size();
  std::vector<int> digits(static_cast<std::size_t>(N), 0);
  Eigen::VectorXd x(N);
  for (int i = 0; i < N; ++i) x[i] = alphabet.values[0];

  Eigen::VectorXd best_x = x;
  double best_v = J(x);
  const auto count = static_cast<std::uint64_t>(total);
  for (std::uint64_t it = 1; it < count; ++it) {
    // Mixed-radix odometer, entry 0 fastest.
    for (int i = 0; i < N; ++i) {
      auto& d = digits[static_cast<std::size_t>(i)];
      if (++d < b) {
        x[i] = alphabet.values[static_cast<std::size_t>(d)];
        break;
      }
      d = 0;
      x[i] = alphabet.values[0];
    }
    const double v = J(x);
    if (v > best_v) {  // strict: keep the first optimum in enumeration order
      best_v = v;
      best_x = x;
    }
  }
  return {best_x, best_v};
}

Eigen::VectorXd cpp2(const SinrProblem& prob, const Eigen::VectorXd& init,
                     const EgdConfig& cfg) {
  const int N = prob.N();
  if (init.size() != N)
    throw std::invalid_argument("cpp2: init length does not match problem");

  const auto ratio = [&prob](const Eigen::VectorXd& y) {
    const double fs = y.dot(prob.R0 * y) + prob.c0.dot(y);
    const double fI = y.dot(prob.K * y) + prob.s.dot(y);
    return fs / fI;
  };
  const auto grad = [&prob](const Eigen::VectorXd& y) {
    const double fs = y.dot(prob.R0 * y) + prob.c0.dot(y);
    const double fI = y.dot(prob.K * y) + prob.s.dot(y);
    const Eigen::VectorXd gs = 2.0 * (prob.R0 * y) + prob.c0;
    const Eigen::VectorXd gI = 2.0 * (prob.K * y) + prob.s;
    return ((gs * fI - fs * gI) / (fI * fI)).eval();
  };

  Eigen::VectorXd y = project_box(init);
  for (int t = 0; t < cfg.max_iter; ++t) {
    const Eigen::VectorXd g = grad(y);
    const double beta = ag_line_search(y, g, ratio, cfg);
    if (beta == 0.0) break;
    const Eigen::VectorXd y_next = project_box(y + beta * g);
    const double delta2 = (y_next - y).squaredNorm();
    y = y_next;
    if (delta2 <= cfg.eps_th * N) break;
  }

  Eigen::VectorXd theta(N);
  for (int i = 0; i < N; ++i) theta[i] = (y[i] >= 0.0) ? 1.0 : -1.0;
  return theta;
}

Eigen::VectorXd cpp1(const ChannelSet& ch, const EgdConfig& cfg) {
  const int N = ch.N();
  const int n_tx = ch.N_I + 1;
  const std::complex<double> j_unit(0.0, 1.0);

  // SINR as a function of continuous per-element phases (theta_n = e^{j phi}).
  const auto sinr_of = [&](const Eigen::VectorXd& phi) {
    Eigen::VectorXcd theta(N);
    for (int i = 0; i < N; ++i)
      theta(i) = std::complex<double>(std::cos(phi(i)), std::sin(phi(i)));
    double num = 0.0, den = ch.sigma_w2;
    for (int k = 0; k < n_tx; ++k) {
      const auto& hck = ch.hc[static_cast<std::size_t>(k)];
      const std::complex<double> a =
          ch.h_d[static_cast<std::size_t>(k)] +
          (theta.array() * hck.array()).sum();
      if (k == 0)
        num = ch.beta(0) * std::norm(a);
      else
        den += ch.beta(k) * std::norm(a);
    }
    return num / den;
  };

  // d|A_k|^2 / d phi_n = 2 Re( conj(A_k) * j * hc_k(n) * e^{j phi_n} ).
  const auto grad_of = [&](const Eigen::VectorXd& phi) {
    Eigen::VectorXcd theta(N);
    for (int i = 0; i < N; ++i)
      theta(i) = std::complex<double>(std::cos(phi(i)), std::sin(phi(i)));
    Eigen::VectorXd g_num = Eigen::VectorXd::Zero(N);
    Eigen::VectorXd g_den = Eigen::VectorXd::Zero(N);
    double num = 0.0, den = ch.sigma_w2;
    for (int k = 0; k < n_tx; ++k) {
      const auto& hck = ch.hc[static_cast<std::size_t>(k)];
      const std::complex<double> a =
          ch.h_d[static_cast<std::size_t>(k)] +
          (theta.array() * hck.array()).sum();
      Eigen::VectorXd d_amp2(N);
      for (int n = 0; n < N; ++n)
        d_amp2(n) = 2.0 * std::real(std::conj(a) * j_unit * hck(n) * theta(n));
      if (k == 0) {
        num = ch.beta(0) * std::norm(a);
        g_num = ch.beta(0) * d_amp2;
      } else {
        den += ch.beta(k) * std::norm(a);
        g_den += ch.beta(k) * d_amp2;
      }
    }
    return ((g_num * den - num * g_den) / (den * den)).eval();
  };

  // Start at the continuous signal-aligned phases.
  const auto& hc0 = ch.hc[0];
  const double ref =
      (std::abs(ch.h_d[0]) > 0.0) ? std::arg(ch.h_d[0]) : 0.0;
  Eigen::VectorXd phi(N);
  for (int n = 0; n < N; ++n) phi(n) = ref - std::arg(hc0(n));

  for (int t = 0; t < cfg.max_iter; ++t) {
    const Eigen::VectorXd g = grad_of(phi);
    const double beta = line_search_free(phi, g, sinr_of, cfg);
    if (beta == 0.0) break;
    const Eigen::VectorXd phi_next = phi + beta * g;
    const double delta2 = (phi_next - phi).squaredNorm();
    phi = phi_next;
    if (delta2 <= cfg.eps_th * N) break;
  }

  // Project each phase to the nearer of the two available states {0, pi}.
  Eigen::VectorXd theta(N);
  for (int n = 0; n < N; ++n) theta(n) = (std::cos(phi(n)) >= 0.0) ? 1.0 : -1.0;
  return theta;
}

Eigen::VectorXd sa_project(const ChannelSet& ch) { return sa_init(ch); }

Eigen::VectorXd ua(const ChannelSet& ch, const OverheadModel& m,
                   UaMetric metric) {
  const int N = ch.N();
  const Eigen::VectorXd aligned = sa_init(ch);
  const auto score = [&](const Eigen::VectorXd& t) {
    return metric == UaMetric::EE ? ee(t, ch, m) : rate(t, ch, m);
  };

  // Rank elements by user-path magnitude, largest first (stable on ties).
  std::vector<int> order(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) order[static_cast<std::size_t>(i)] = i;
  Eigen::VectorXd mag(N);
  for (int i = 0; i < N; ++i) mag(i) = std::abs(ch.hc[0](i));
  std::stable_sort(order.begin(), order.end(),
                   [&mag](int a, int b) { return mag(a) > mag(b); });

  Eigen::VectorXd best = Eigen::VectorXd::Zero(N);
  double best_v = score(best);
  Eigen::VectorXd cur = Eigen::VectorXd::Zero(N);
  for (int n_on = 1; n_on <= N; ++n_on) {
    const int idx = order[static_cast<std::size_t>(n_on - 1)];
    cur(idx) = aligned(idx);
    const double v = score(cur);
    if (v > best_v) {  // strict: prefer the smallest element count on ties
      best_v = v;
      best = cur;
    }
  }
  return best;
}

}  // namespace prf

#include "prfopt/sinr_scenario.hpp"

#include <cmath>
#include <stdexcept>

namespace prf {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::complex<double> rician_draw(double kappa, bool los_only, Rng& rng) {
  const double phi = rng.uniform(0.0, kTwoPi);
  const std::complex<double> los(std::cos(phi), std::sin(phi));
  if (los_only) return los;
  const double re = rng.normal();
  const double im = rng.normal();
  const std::complex<double> nlos(re / std::sqrt(2.0), im / std::sqrt(2.0));
  return std::sqrt(kappa / (1.0 + kappa)) * los +
         std::sqrt(1.0 / (1.0 + kappa)) * nlos;
}

}  // namespace

ChannelSet gen_rician(const ScenarioConfig& cfg, Rng& rng) {
  if (cfg.N < 1) throw std::invalid_argument("need N >= 1 elements");
  if (cfg.N_I < 0) throw std::invalid_argument("need N_I >= 0");
  ChannelSet ch;
  const int nT = cfg.N_I + 1;
  ch.N_I = cfg.N_I;
  ch.beta = Eigen::VectorXd::Constant(
      nT, dbm2watt(cfg.p_dBm) * db2lin(cfg.delta_PL_dB));
  ch.sigma_w2 = cfg.B_Hz * dbm2watt(cfg.N0_dBm_per_Hz);
  ch.h_d.resize(static_cast<std::size_t>(nT));
  ch.h.resize(static_cast<std::size_t>(nT));
  ch.f.resize(static_cast<std::size_t>(nT));
  ch.hc.resize(static_cast<std::size_t>(nT));
  for (int i = 0; i < nT; ++i) {
    ch.h_d[static_cast<std::size_t>(i)] =
        cfg.blocked_direct ? std::complex<double>(0.0, 0.0)
                           : rician_draw(cfg.kappa, cfg.los_only, rng);
    Eigen::VectorXcd hv(cfg.N), fv(cfg.N);
    for (int k = 0; k < cfg.N; ++k) hv(k) = rician_draw(cfg.kappa, cfg.los_only, rng);
    for (int k = 0; k < cfg.N; ++k) fv(k) = rician_draw(cfg.kappa, cfg.los_only, rng);
    ch.h[static_cast<std::size_t>(i)] = hv;
    ch.f[static_cast<std::size_t>(i)] = fv;
    ch.hc[static_cast<std::size_t>(i)] = hv.conjugate().cwiseProduct(fv);
  }
  return ch;
}

SinrProblem build_problem(const ChannelSet& ch) {
  const int N = ch.N();
  const int nT = ch.N_I + 1;
  if (N == 0) throw std::invalid_argument("empty channel set");
  SinrProblem prob;
  prob.R0 = Eigen::MatrixXd::Zero(N, N);
  prob.K = Eigen::MatrixXd::Zero(N, N);
  prob.c0 = Eigen::VectorXd::Zero(N);
  prob.s = Eigen::VectorXd::Zero(N);
  for (int i = 0; i < nT; ++i) {
    const auto& hc = ch.hc[static_cast<std::size_t>(i)];
    const std::complex<double> hd = ch.h_d[static_cast<std::size_t>(i)];
    const double b = ch.beta(i);
    Eigen::MatrixXd R(N, N);
    // Upper triangle computed once and mirrored: exactly symmetric output.
    for (int r = 0; r < N; ++r) {
      for (int c = r; c < N; ++c) {
        double v = b * std::real(hc(r) * std::conj(hc(c)));
        if (r == c) v += b * std::norm(hd) / static_cast<double>(N);
        R(r, c) = v;
        R(c, r) = v;
      }
    }
    const Eigen::VectorXd cv = 2.0 * b * (std::conj(hd) * hc).real();
    if (i == 0) {
      prob.R0 = R;
      prob.c0 = cv;
    } else {
      prob.K += R;
      prob.s += cv;
    }
  }
  prob.K += (ch.sigma_w2 / static_cast<double>(N)) *
            Eigen::MatrixXd::Identity(N, N);
  return prob;
}

double sinr(const Eigen::VectorXd& theta, const SinrProblem& prob) {
  if (theta.size() != prob.N()) throw std::invalid_argument("dimension mismatch");
  for (int i = 0; i < theta.size(); ++i)
    if (theta(i) != 1.0 && theta(i) != -1.0)
      throw std::domain_error("theta entries must be +-1");
  const double fs = theta.dot(prob.R0 * theta) + prob.c0.dot(theta);
  const double fI = theta.dot(prob.K * theta) + prob.s.dot(theta);
  return fs / fI;
}

double capacity(const Eigen::VectorXd& theta, const SinrProblem& prob) {
  return std::log2(1.0 + sinr(theta, prob));
}

Eigen::VectorXd sinr_channels_batch(const Eigen::MatrixXd& thetas,
                                    const ChannelSet& ch) {
  const int M = static_cast<int>(thetas.rows());
  if (thetas.cols() != ch.N()) throw std::invalid_argument("dimension mismatch");
  const auto amp2 = [&](int i) {
    const auto& hc = ch.hc[static_cast<std::size_t>(i)];
    const std::complex<double> hd = ch.h_d[static_cast<std::size_t>(i)];
    Eigen::VectorXd ar = thetas * hc.real();
    Eigen::VectorXd ai = thetas * hc.imag();
    ar.array() += hd.real();
    ai.array() += hd.imag();
    return (ar.cwiseProduct(ar) + ai.cwiseProduct(ai)).eval();
  };
  Eigen::VectorXd num = ch.beta(0) * amp2(0);
  Eigen::VectorXd den = Eigen::VectorXd::Constant(M, ch.sigma_w2);
  for (int i = 1; i <= ch.N_I; ++i) den += ch.beta(i) * amp2(i);
  return num.cwiseQuotient(den);
}

double sinr_channels(const Eigen::VectorXd& theta, const ChannelSet& ch) {
  return sinr_channels_batch(theta.transpose(), ch)(0);
}

}  // namespace prf

// Rician-fading channel generation and the fractional-quadratic SINR
// objective for a reflecting surface with per-element phase states.
//
// Channel convention: the received amplitude from transmitter i is
//   A_i(theta) = h_d[i] + theta^T h_c[i],   h_c[i] = conj(h[i]) o f[i],
// where h is the transmitter-to-surface link, f the surface-to-receiver
// link, and theta the per-element phase vector (+-1, or 0 for an element
// switched off). SINR(theta) = beta_0 |A_0|^2 / (sum_i>0 beta_i |A_i|^2 +
// sigma_w^2), which for +-1 theta equals a ratio of quadratic-plus-linear
// forms (f_s/f_I) built here.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "prfopt/rng.hpp"

namespace prf {

inline double db2lin(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm2watt(double dbm) { return db2lin(dbm - 30.0); }

struct ScenarioConfig {
  int N = 16;                    // surface elements
  int N_I = 1;                   // interferer count
  double kappa = 4.0;            // Rician factor
  double p_dBm = 0.0;            // transmit power, all transmitters
  double delta_PL_dB = -110.0;   // end-to-end path loss
  double B_Hz = 5e6;             // bandwidth
  double N0_dBm_per_Hz = -174.0; // noise power spectral density
  bool blocked_direct = true;    // zero every direct path
  bool los_only = false;         // kappa -> infinity limit (unit modulus)
  std::uint64_t seed = 1;
};

struct ChannelSet {
  std::vector<std::complex<double>> h_d;  // direct gain per transmitter
  std::vector<Eigen::VectorXcd> h;        // Tx-to-surface per transmitter
  std::vector<Eigen::VectorXcd> f;        // surface-to-Rx per transmitter
  std::vector<Eigen::VectorXcd> hc;       // conj(h) o f, cached
  Eigen::VectorXd beta;                   // received power scale (W)
  double sigma_w2 = 0.0;                  // noise power (W)
  int N_I = 0;
  int N() const { return hc.empty() ? 0 : static_cast<int>(hc[0].size()); }
};

// R0, K symmetric; K positive definite (carries the sigma_w^2/N ridge).
// f_s(t) = t^T R0 t + c0^T t, f_I(t) = t^T K t + s^T t for t in {-1,+1}^N.
struct SinrProblem {
  Eigen::MatrixXd R0, K;
  Eigen::VectorXd c0, s;
  int N() const { return static_cast<int>(c0.size()); }
};

// Draw all channels: each entry sqrt(kappa/(1+kappa)) e^{j phi} +
// sqrt(1/(1+kappa)) CN(0,1), phi uniform in [0, 2pi). Transmitter 0 is the
// user; direct gains are zeroed when cfg.blocked_direct.
ChannelSet gen_rician(const ScenarioConfig& cfg, Rng& rng);

// Assemble the quadratic-form representation of the SINR from channels.
SinrProblem build_problem(const ChannelSet& ch);

// SINR of a +-1 phase vector through the quadratic forms.
double sinr(const Eigen::VectorXd& theta, const SinrProblem& prob);

// log2(1 + SINR).
double capacity(const Eigen::VectorXd& theta, const SinrProblem& prob);

// SINR evaluated directly from channels; accepts ternary theta (zeros
// switch elements off). One value per row of thetas.
Eigen::VectorXd sinr_channels_batch(const Eigen::MatrixXd& thetas,
                                    const ChannelSet& ch);
double sinr_channels(const Eigen::VectorXd& theta, const ChannelSet& ch);

}  // namespace prf

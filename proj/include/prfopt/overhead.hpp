// Overhead-aware rate, power, and energy-efficiency models for a slotted
// system where each active surface element costs pilot time (channel
// estimation) and feedback bits (configuration) out of the slot, plus
// static per-element power.
#pragma once

#include <Eigen/Dense>

#include "prfopt/sinr_scenario.hpp"

namespace prf {

struct OverheadModel {
  double T = 100e-3;    // slot duration (s)
  double T0 = 1e-3;     // per-pilot duration (s)
  double b_F = 2.0;     // feedback bits per element
  double B_F = 1e6;     // feedback bandwidth (Hz)
  double p_F = dbm2watt(30.0);   // feedback transmit power (W)
  double h_F2 = 1.0;             // feedback channel power gain |h_F|^2
  double B = 5e6;                // data bandwidth (Hz)
  double N0_psd = dbm2watt(-174.0);  // noise PSD (W/Hz)
  double P0 = dbm2watt(10.0);    // pilot power (W)
  double p = dbm2watt(30.0);     // data transmit power (W)
  double mu = 1.0, mu_F = 1.0;   // inverse amplifier efficiencies
  double P_cn = dbm2watt(10.0);  // per-active-element power (W)
  double P_c0 = dbm2watt(45.0);  // static power (W)
  int N_max = 300;               // hard element cap
};

// Channel estimation time: T0 * (n_on + 1) pilots.
double t_e(const OverheadModel& m, int n_on);

// Configuration feedback time: n_on * b_F bits at the feedback link's
// Shannon rate (natural-log capacity in nats matches the bit count b_F
// through the log ratio).
double t_f(const OverheadModel& m, int n_on);

// Largest usable element count: min(N_max, N_0) with N_0 the largest n
// whose total overhead stays below the slot. Returns 0 when not even the
// initial pilot fits.
int max_elements(const OverheadModel& m);

// Achievable rate (bit/s) of a ternary phase vector: the slot fraction left
// after overhead times B log2(1 + SINR). Throws when overhead fills the slot.
double rate(const Eigen::VectorXd& theta, const ChannelSet& ch,
            const OverheadModel& m);

// Total consumed power (W) as a function of the active-element count.
double p_tot(const OverheadModel& m, int n_on);

// Energy efficiency (bit/J): rate / p_tot.
double ee(const Eigen::VectorXd& theta, const ChannelSet& ch,
          const OverheadModel& m);

// Batch versions (one value per row); infeasible rows throw as above.
Eigen::VectorXd rate_batch(const Eigen::MatrixXd& thetas, const ChannelSet& ch,
                           const OverheadModel& m);
Eigen::VectorXd ee_batch(const Eigen::MatrixXd& thetas, const ChannelSet& ch,
                         const OverheadModel& m);

}  // namespace prf

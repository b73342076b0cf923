#include "prfopt/overhead.hpp"

#include <cmath>
#include <stdexcept>

namespace prf {

double t_e(const OverheadModel& m, int n_on) {
  return m.T0 * static_cast<double>(n_on + 1);
}

double t_f(const OverheadModel& m, int n_on) {
  const double cap = std::log(1.0 + m.p_F * m.h_F2 / (m.N0_psd * m.B_F));
  return static_cast<double>(n_on) * m.b_F / (m.B_F * cap);
}

int max_elements(const OverheadModel& m) {
  if (!(t_e(m, 0) + t_f(m, 0) < m.T)) return 0;
  int n = 0;
  while (n < m.N_max && t_e(m, n + 1) + t_f(m, n + 1) < m.T) ++n;
  return n;
}

namespace {

int active_count(const Eigen::VectorXd& theta) {
  int n = 0;
  for (int i = 0; i < theta.size(); ++i)
    if (theta(i) != 0.0) ++n;
  return n;
}

double prefactor(const OverheadModel& m, int n_on) {
  const double used = t_e(m, n_on) + t_f(m, n_on);
  if (!(used < m.T))
    throw std::domain_error("estimation and feedback overhead fills the slot");
  return 1.0 - used / m.T;
}

}  // namespace

double rate(const Eigen::VectorXd& theta, const ChannelSet& ch,
            const OverheadModel& m) {
  const int n_on = active_count(theta);
  return prefactor(m, n_on) * m.B *
         std::log2(1.0 + sinr_channels(theta, ch));
}

double p_tot(const OverheadModel& m, int n_on) {
  const double te = t_e(m, n_on), tf = t_f(m, n_on);
  return m.P0 * te / m.T + (1.0 - te / m.T) * m.mu * m.p +
         tf / m.T * (m.mu_F * m.p_F - m.mu * m.p) +
         static_cast<double>(n_on) * m.P_cn + m.P_c0;
}

double ee(const Eigen::VectorXd& theta, const ChannelSet& ch,
          const OverheadModel& m) {
  return rate(theta, ch, m) / p_tot(m, active_count(theta));
}

Eigen::VectorXd rate_batch(const Eigen::MatrixXd& thetas, const ChannelSet& ch,
                           const OverheadModel& m) {
  const Eigen::VectorXd s = sinr_channels_batch(thetas, ch);
  Eigen::VectorXd out(thetas.rows());
  for (int k = 0; k < thetas.rows(); ++k) {
    int n_on = 0;
    for (int i = 0; i < thetas.cols(); ++i)
      if (thetas(k, i) != 0.0) ++n_on;
    out(k) = prefactor(m, n_on) * m.B * std::log2(1.0 + s(k));
  }
  return out;
}

Eigen::VectorXd ee_batch(const Eigen::MatrixXd& thetas, const ChannelSet& ch,
                         const OverheadModel& m) {
  const Eigen::VectorXd s = sinr_channels_batch(thetas, ch);
  Eigen::VectorXd out(thetas.rows());
  for (int k = 0; k < thetas.rows(); ++k) {
    int n_on = 0;
    for (int i = 0; i < thetas.cols(); ++i)
      if (thetas(k, i) != 0.0) ++n_on;
    out(k) = prefactor(m, n_on) * m.B * std::log2(1.0 + s(k)) /
             p_tot(m, n_on);
  }
  return out;
}

}  // namespace prf

// Comparison methods and ground-truth oracles: exhaustive enumeration,
// continuous-relaxation-then-round solvers over the box and over phase
// angles, plain signal alignment, and the interference-free element-count
// scan.
#pragma once

#include <Eigen/Dense>

#include "prfopt/categorical.hpp"
#include "prfopt/egd.hpp"
#include "prfopt/overhead.hpp"
#include "prfopt/sinr_scenario.hpp"

namespace prf {

// Global maximum of J over alphabet^N by full enumeration. Ties break to
// the first optimum in mixed-radix order (entry 0 fastest). Throws when
// b^N exceeds the cap.
std::pair<Eigen::VectorXd, double> exhaustive(const Objective& J,
                                              const Alphabet& alphabet, int N,
                                              std::uint64_t cap = (1ULL << 22));

// Projected gradient ascent of the raw ratio f_s(y)/f_I(y) over the box
// [-1,1]^N (quotient-rule gradient) from init, then per-element sign
// rounding (0 rounds up).
Eigen::VectorXd cpp2(const SinrProblem& prob, const Eigen::VectorXd& init,
                     const EgdConfig& cfg);

// Gradient ascent of the SINR over continuous per-element phase angles
// (unit-modulus relaxation), initialized at the signal-aligned phases, then
// per-element projection to the nearer of the two binary states.
Eigen::VectorXd cpp1(const ChannelSet& ch, const EgdConfig& cfg);

// Signal alignment projected to +-1 (identical to the solver init;
// re-exported as a standalone baseline).
Eigen::VectorXd sa_project(const ChannelSet& ch);

enum class UaMetric { EE, Rate };

// Interference-free element-count scan: rank elements by the user-path
// magnitude |h_c0|, activate the top n_on with sign-projected aligned
// phases, score by the chosen metric, and return the best configuration
// over n_on = 0..N.
Eigen::VectorXd ua(const ChannelSet& ch, const OverheadModel& m,
                   UaMetric metric = UaMetric::EE);

}  // namespace prf

// Categorical relaxation of discrete vectors: one-hot (degenerate) parameter
// maps, exact expectation by enumeration, seeded sampling, and the
// zero-diagonal rewrite that turns a +-1 quadratic program into a box-
// constrained one.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "prfopt/rng.hpp"

namespace prf {

using Objective = std::function<double(const Eigen::VectorXd&)>;

// Ordered set of b >= 2 distinct scalar levels a discrete entry may take.
struct Alphabet {
  std::vector<double> values;
  int size() const { return static_cast<int>(values.size()); }
  void validate() const;                 // throws std::invalid_argument
  int index_of(double v) const;          // -1 when absent
};

// Row-stochastic n x b matrix: row i holds the outcome probabilities of
// entry i over the alphabet. Rows must sum to 1 within 1e-12; off-tolerance
// rows are an error, never silently renormalized.
struct CategoricalParams {
  Eigen::MatrixXd probs;
  Alphabet alphabet;
  int n() const { return static_cast<int>(probs.rows()); }
  void validate() const;                 // throws std::invalid_argument
};

// One-hot parameter matrix of a discrete vector: P(i, j) = 1 exactly when
// x(i) equals alphabet value j.
CategoricalParams degen(const Eigen::VectorXd& x, const Alphabet& alphabet);

// Inverse of degen; requires every row to be one-hot within 1e-12.
Eigen::VectorXd degen_inverse(const CategoricalParams& P);

// Exact E[f(x)] by enumerating all b^n outcomes (mixed-radix counting,
// entry 0 fastest). Zero-probability branches are pruned, so a degenerate P
// returns bit-exactly f(degen_inverse(P)). Throws std::length_error when
// b^n exceeds the cap.
double expectation_exact(const Objective& f, const CategoricalParams& P,
                         std::uint64_t cap = (1ULL << 24));

// G i.i.d. draws from P (inverse-CDF per entry); row k of the result is the
// k-th sampled vector. Deterministic given the generator state.
Eigen::MatrixXd sample(const CategoricalParams& P, Rng& rng, int G);

// Zero-diagonal rewrite of a symmetric W: for any x in {-1,+1}^n,
// x^T W x = x^T W_wd x + trace(W); the first term extends to a box-
// constrained program in the mean vector y. Returns (W_wd, trace).
std::pair<Eigen::MatrixXd, double> boxqp_transform(const Eigen::MatrixXd& W);

// Enumerate all b^n outcomes in the library's canonical mixed-radix order
// (entry 0 fastest); visit(x, k) is called for outcome index k.
void enumerate_outcomes(
    const Alphabet& alphabet, int n,
    const std::function<void(const Eigen::VectorXd&, std::uint64_t)>& visit);

}  // namespace prf

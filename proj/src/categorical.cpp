#include "prfopt/categorical.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace prf {

namespace {
constexpr double kRowSumTol = 1e-12;
constexpr double kSymTol = 1e-10;
}  // namespace

void Alphabet::validate() const {
  if (values.size() < 2) throw std::invalid_argument("alphabet needs b >= 2 values");
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = i + 1; j < values.size(); ++j)
      if (values[i] == values[j])
        throw std::invalid_argument("alphabet values must be pairwise distinct");
}

int Alphabet::index_of(double v) const {
  for (std::size_t j = 0; j < values.size(); ++j)
    if (values[j] == v) return static_cast<int>(j);
  return -1;
}

void CategoricalParams::validate() const {
  alphabet.validate();
  if (probs.rows() < 1) throw std::invalid_argument("need n >= 1 rows");
  if (probs.cols() != alphabet.size())
    throw std::invalid_argument("probability columns must match alphabet size");
  for (int i = 0; i < probs.rows(); ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < probs.cols(); ++j) {
      const double p = probs(i, j);
      if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("probability out of [0,1] at row " +
                                    std::to_string(i));
      row_sum += p;
    }
    if (std::abs(row_sum - 1.0) > kRowSumTol)
      throw std::invalid_argument("row " + std::to_string(i) +
                                  " does not sum to 1 within 1e-12");
  }
}

CategoricalParams degen(const Eigen::VectorXd& x, const Alphabet& alphabet) {
  alphabet.validate();
  CategoricalParams P;
  P.alphabet = alphabet;
  P.probs = Eigen::MatrixXd::Zero(x.size(), alphabet.size());
  for (int i = 0; i < x.size(); ++i) {
    const int j = alphabet.index_of(x(i));
    if (j < 0)
      throw std::domain_error("entry " + std::to_string(i) +
                              " is not an alphabet value");
    P.probs(i, j) = 1.0;
  }
  return P;
}

Eigen::VectorXd degen_inverse(const CategoricalParams& P) {
  P.validate();
  Eigen::VectorXd x(P.n());
  for (int i = 0; i < P.n(); ++i) {
    int hit = -1;
    for (int j = 0; j < P.probs.cols(); ++j) {
      if (std::abs(P.probs(i, j) - 1.0) <= kRowSumTol) {
        hit = j;
        break;
      }
    }
    if (hit < 0)
      throw std::invalid_argument("row " + std::to_string(i) +
                                  " is not degenerate");
    x(i) = P.alphabet.values[static_cast<std::size_t>(hit)];
  }
  return x;
}

void enumerate_outcomes(
    const Alphabet& alphabet, int n,
    const std::function<void(const Eigen::VectorXd&, std::uint64_t)>& visit) {
  const int b = alphabet.size();
  Eigen::VectorXd x(n);
  std::vector<int> digit(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) x(i) = alphabet.values[0];
  std::uint64_t k = 0;
  while (true) {
    visit(x, k);
    ++k;
    int i = 0;  // mixed-radix increment, entry 0 fastest
    while (i < n) {
      if (++digit[static_cast<std::size_t>(i)] < b) {
        x(i) = alphabet.values[static_cast<std::size_t>(digit[static_cast<std::size_t>(i)])];
        break;
      }
      digit[static_cast<std::size_t>(i)] = 0;
      x(i) = alphabet.values[0];
      ++i;
    }
    if (i == n) return;
  }
}

namespace {

// Depth-first accumulation in mixed-radix order (entry 0 innermost) with
// exact-zero branch pruning, so degenerate parameters reduce to a single
// f(x) * 1.0 term.
double expectation_rec(const Objective& f, const CategoricalParams& P,
                       Eigen::VectorXd& x, int level, double weight) {
  if (level < 0) return weight == 1.0 ? f(x) : f(x) * weight;
  double acc = 0.0;
  for (int j = 0; j < P.probs.cols(); ++j) {
    const double p = P.probs(level, j);
    if (p == 0.0) continue;
    x(level) = P.alphabet.values[static_cast<std::size_t>(j)];
    acc += expectation_rec(f, P, x, level - 1, weight * p);
  }
  return acc;
}

}  // namespace

double expectation_exact(const Objective& f, const CategoricalParams& P,
                         std::uint64_t cap) {
  P.validate();
  const int n = P.n();
  const int b = P.alphabet.size();
  double outcomes = std::pow(static_cast<double>(b), n);
  if (outcomes > static_cast<double>(cap))
    throw std::length_error(
        "outcome count exceeds enumeration cap; use a Monte Carlo estimate");
  Eigen::VectorXd x(n);
  return expectation_rec(f, P, x, n - 1, 1.0);
}

Eigen::MatrixXd sample(const CategoricalParams& P, Rng& rng, int G) {
  P.validate();
  if (G < 1) throw std::invalid_argument("need G >= 1 samples");
  const int n = P.n();
  const int b = P.alphabet.size();
  Eigen::MatrixXd out(G, n);
  for (int g = 0; g < G; ++g) {
    for (int i = 0; i < n; ++i) {
      const double u = rng.uniform();
      double cum = 0.0;
      int pick = b - 1;
      for (int j = 0; j < b; ++j) {
        cum += P.probs(i, j);
        if (u < cum) {
          pick = j;
          break;
        }
      }
      out(g, i) = P.alphabet.values[static_cast<std::size_t>(pick)];
    }
  }
  return out;
}

std::pair<Eigen::MatrixXd, double> boxqp_transform(const Eigen::MatrixXd& W) {
  if (W.rows() != W.cols()) throw std::domain_error("W must be square");
  const double asym = (W - W.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymTol)
    throw std::domain_error("W must be symmetric within 1e-10");
  Eigen::MatrixXd wd = W;
  wd.diagonal().setZero();
  return {wd, W.trace()};
}

}  // namespace prf

// Closed-form moments and gradients of quadratic and linear forms in
// independent (not identically distributed) +-1 random vectors with mean
// vector y:
//   mean_qf : E[x^T G x + z^T x]
//   mean_ql : E[(x^T G x)(z^T x)]
//   mean_qs : E[(x^T G x)^2]
// together with their exact gradients in y. These are the building blocks
// of the analytical surrogate objectives used by the expectation-based
// solvers.
#pragma once

#include <Eigen/Dense>

namespace prf {

// Evaluation strategy for the quartic moment's inner product
// U(k,j) = sum_i y_i^2 G_wd(i,j) G_wd(k,i):
//  - Direct: algebraic shortcut U = G_wd diag(y o y) G_wd, cubic work.
//  - LiteralKron: evaluates the blocked selector product that defines U,
//    tile by tile, without exploiting the selector's sparsity — quartic
//    work with constant extra memory. Exists so runtime experiments can
//    measure the construction's native scaling; values are identical.
enum class SecondMomentImpl { Direct, LiteralKron };

// G with its diagonal zeroed; off-diagonal entries preserved.
Eigen::MatrixXd strip_diag(const Eigen::MatrixXd& G);

// E[x x^T] for independent +-1 entries with mean y: off-diagonal y_i y_j,
// unit diagonal.
Eigen::MatrixXd covariance(const Eigen::VectorXd& y);

// E[x^T G x + z^T x] = y^T G_wd y + tr(G) + z^T y.
double mean_qf(const Eigen::MatrixXd& G, const Eigen::VectorXd& z,
               const Eigen::VectorXd& y);

// Gradient of mean_qf in y: (G_wd + G_wd^T) y + z.
Eigen::VectorXd grad_qf(const Eigen::MatrixXd& G, const Eigen::VectorXd& z,
                        const Eigen::VectorXd& y);

// E[(x^T G x)(z^T x)].
double mean_ql(const Eigen::MatrixXd& G, const Eigen::VectorXd& z,
               const Eigen::VectorXd& y);

// Gradient of mean_ql in y.
Eigen::VectorXd grad_ql(const Eigen::MatrixXd& G, const Eigen::VectorXd& z,
                        const Eigen::VectorXd& y);

// E[(x^T G x)^2].
double mean_qs(const Eigen::MatrixXd& G, const Eigen::VectorXd& y,
               SecondMomentImpl impl = SecondMomentImpl::Direct);

// Gradient of mean_qs in y.
Eigen::VectorXd grad_qs(const Eigen::MatrixXd& G, const Eigen::VectorXd& y,
                        SecondMomentImpl impl = SecondMomentImpl::Direct);

// The inner product U under the chosen strategy (exposed for tests and
// benchmarks).
Eigen::MatrixXd second_moment_u(const Eigen::MatrixXd& G_wd,
                                const Eigen::VectorXd& y,
                                SecondMomentImpl impl);

// Throws std::domain_error unless G is square and symmetric within 1e-10.
void require_symmetric(const Eigen::MatrixXd& G);

}  // namespace prf

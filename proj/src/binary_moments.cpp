#include "prfopt/binary_moments.hpp"

#include <stdexcept>

namespace prf {

namespace {
constexpr double kSymTol = 1e-10;

void require_dims(const Eigen::MatrixXd& G, const Eigen::VectorXd& z,
                  const Eigen::VectorXd& y) {
  if (G.rows() != y.size() || z.size() != y.size())
    throw std::invalid_argument("dimension mismatch between G, z, y");
}
}  // namespace

void require_symmetric(const Eigen::MatrixXd& G) {
  if (G.rows() != G.cols()) throw std::domain_error("matrix must be square");
  if ((G - G.transpose()).cwiseAbs().maxCoeff() > kSymTol)
    throw std::domain_error("matrix must be symmetric within 1e-10");
}

Eigen::MatrixXd strip_diag(const Eigen::MatrixXd& G) {
  if (G.rows() != G.cols()) throw std::domain_error("matrix must be square");
  Eigen::MatrixXd out = G;
  out.diagonal().setZero();
  return out;
}

Eigen::MatrixXd covariance(const Eigen::VectorXd& y) {
  Eigen::MatrixXd c = y * y.transpose();
  c.diagonal().setOnes();
  return c;
}

double mean_qf(const Eigen::MatrixXd& G, const Eigen::VectorXd& z,
               const Eigen::VectorXd& y) {
  require_symmetric(G);
  require_dims(G, z, y);
  const Eigen::MatrixXd wd = strip_diag(G);
  return y.dot(wd * y) + G.trace() + z.dot(y);
}

Eigen::VectorXd grad_qf(const Eigen::MatrixXd& G, const Eigen::VectorXd& z,
                        const Eigen::VectorXd& y) {
  require_symmetric(G);
  require_dims(G, z, y);
  const Eigen::MatrixXd wd = strip_diag(G);
  return (wd + wd.transpose()) * y + z;
}

double mean_ql(const Eigen::MatrixXd& G, const Eigen::VectorXd& z,
               const Eigen::VectorXd& y) {
  require_symmetric(G);
  require_dims(G, z, y);
  const int n = static_cast<int>(y.size());
  const Eigen::MatrixXd wd = strip_diag(G);
  // Third term: 1^T {(G_wd Y_wd) o Y_wd} (y o z) with Y = y 1^T.
  // Entrywise, (G_wd Y_wd)(i,j) = (G_wd y)_i - G_wd(i,j) y_j and
  // Y_wd(i,j) = y_i off the diagonal, so the (i,j != i) summand is
  // y_i ((g y)_i - G_wd(i,j) y_j) y_j z_j.
  const Eigen::VectorXd gy = wd * y;
  const Eigen::VectorXd w = y.cwiseProduct(z);
  double t3 = 0.0;
  for (int j = 0; j < n; ++j) {
    double col = 0.0;  // sum_i!=j y_i ((gy)_i - G_wd(i,j) y_j)
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      col += y(i) * (gy(i) - wd(i, j) * y(j));
    }
    t3 += col * w(j);
  }
  return 2.0 * y.dot(wd * z) + z.dot(y) * G.trace() + t3;
}

Eigen::VectorXd grad_ql(const Eigen::MatrixXd& G, const Eigen::VectorXd& z,
                        const Eigen::VectorXd& y) {
  require_symmetric(G);
  require_dims(G, z, y);
  const Eigen::MatrixXd wd = strip_diag(G);
  const Eigen::VectorXd gy = wd * y;
  const Eigen::VectorXd w = y.cwiseProduct(z);
  // GT(i,j) = (G_wd y)_i - G_wd(i,j) y_j; GT's diagonal equals gy.
  // Hollow row/column sums of GT reduce to closed forms:
  //   (GT w)_i - GT(i,i) w_i   = gy_i (1^T w - w_i) - (G_wd (y o w))_i
  //   (GT^T y)_i - GT(i,i) y_i = y^T gy - y_i (G_wd^T y)_i - gy_i y_i
  const double wsum = w.sum();
  const double ygy = y.dot(gy);
  const Eigen::VectorXd gyw = wd * y.cwiseProduct(w);
  const Eigen::VectorXd gty = wd.transpose() * y;
  Eigen::VectorXd t3(y.size()), t45(y.size());
  for (int i = 0; i < y.size(); ++i) {
    t3(i) = z(i) * (ygy - y(i) * gty(i) - gy(i) * y(i));
    t45(i) = 2.0 * (gy(i) * (wsum - w(i)) - gyw(i));
  }
  return 2.0 * wd * z + z * G.trace() + t3 + t45;
}

Eigen::MatrixXd second_moment_u(const Eigen::MatrixXd& G_wd,
                                const Eigen::VectorXd& y,
                                SecondMomentImpl impl) {
  const int n = static_cast<int>(y.size());
  const Eigen::VectorXd d = y.cwiseProduct(y);
  if (impl == SecondMomentImpl::Direct)
    return G_wd * d.asDiagonal() * G_wd;
  // Literal blocked product: B stacks n tiles, tile k holding
  // B_k(i,j) = G_wd(i,j) G_wd(k,i), and U = [I_n (x) (y o y)^T] B. The
  // selector product is evaluated densely row by row, tile by tile.
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd tile(n, n);
  Eigen::VectorXd coef(n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) tile(i, j) = G_wd(i, j) * G_wd(k, i);
    for (int r = 0; r < n; ++r) {
      coef = (r == k) ? d : Eigen::VectorXd::Zero(n);
      U.row(r).noalias() += coef.transpose() * tile;
    }
  }
  return U;
}

namespace {

// Shared assembly pieces for the quartic moment.
struct QsParts {
  Eigen::MatrixXd wd, Gs, Gg, Uwd;
  Eigen::VectorXd d;
  double trG, trZ;
};

QsParts qs_parts(const Eigen::MatrixXd& G, const Eigen::VectorXd& y,
                 SecondMomentImpl impl) {
  QsParts p;
  p.wd = strip_diag(G);
  p.d = y.cwiseProduct(y);
  const Eigen::MatrixXd Z = p.wd * p.wd.transpose();
  p.Gs = 2.0 * G.trace() * p.wd + 4.0 * strip_diag(Z);
  p.Gg = 2.0 * p.wd.cwiseProduct(p.wd);
  p.Uwd = strip_diag(second_moment_u(p.wd, y, impl));
  p.trG = G.trace();
  p.trZ = Z.trace();
  return p;
}

}  // namespace

double mean_qs(const Eigen::MatrixXd& G, const Eigen::VectorXd& y,
               SecondMomentImpl impl) {
  require_symmetric(G);
  if (G.rows() != y.size()) throw std::invalid_argument("dimension mismatch");
  const QsParts p = qs_parts(G, y, impl);
  const Eigen::MatrixXd F =
      p.d.dot(G.diagonal()) * (G + p.wd) + 4.0 * p.Uwd;
  const double ygy = y.dot(G * y);
  return y.dot((p.Gs - F) * y) + p.trG * p.trG + 2.0 * p.trZ + ygy * ygy -
         p.d.dot(p.Gg * p.d);
}

Eigen::VectorXd grad_qs(const Eigen::MatrixXd& G, const Eigen::VectorXd& y,
                        SecondMomentImpl impl) {
  require_symmetric(G);
  if (G.rows() != y.size()) throw std::invalid_argument("dimension mismatch");
  const QsParts p = qs_parts(G, y, impl);
  const Eigen::VectorXd g = G.diagonal();
  const Eigen::VectorXd gy = p.wd * y;
  // b_s(i) = (G_wd y)_i^2 - sum_j G_wd(i,j)^2 y_j^2, the variance-style
  // residual of row i's response.
  const Eigen::VectorXd bs =
      gy.cwiseProduct(gy) - p.wd.cwiseProduct(p.wd) * p.d;
  return (p.Gs + p.Gs.transpose()) * y +
         2.0 * y.dot(G * y) * (G + G.transpose()) * y -
         2.0 * y.dot((G + p.wd) * y) * g.cwiseProduct(y) -
         2.0 * p.d.dot(g) * (G + p.wd) * y -
         2.0 * ((p.Gg + p.Gg.transpose()) * p.d).cwiseProduct(y) -
         8.0 * y.cwiseProduct(bs) - 4.0 * (p.Uwd + p.Uwd.transpose()) * y;
}

}  // namespace prf

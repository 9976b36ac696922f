#include "ratesyn/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace ratesyn {

Matrix kernel_basis(const Matrix& m, const Config& cfg, double abs_tol) {
  if (m.cols() == 0) return Matrix::Zero(0, 0);
  if (m.rows() == 0) return Matrix::Identity(m.cols(), m.cols());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol =
      abs_tol > 0.0 ? abs_tol : std::max(sv(0) * cfg.rank_rtol, 1e-300);
  int rank = 0;
  for (int k = 0; k < sv.size(); ++k)
    if (sv(k) > tol) ++rank;
  return svd.matrixV().rightCols(m.cols() - rank);
}

Matrix sylvester_solve(const Matrix& a1, const Matrix& a2, const Matrix& q) {
  const int n1 = static_cast<int>(a1.rows());
  const int n2 = static_cast<int>(a2.rows());
  if (a1.cols() != n1 || a2.cols() != n2 || q.rows() != n1 || q.cols() != n2)
    throw std::invalid_argument("sylvester_solve: dimension mismatch");
  if (n1 == 0 || n2 == 0) return Matrix::Zero(n1, n2);

  // vec(a1 X - X a2) = (I (x) a1 - a2^T (x) I) vec(X)
  Matrix k = kron(Matrix::Identity(n2, n2), a1) -
             kron(a2.transpose(), Matrix::Identity(n1, n1));
  Eigen::VectorXd rhs(Eigen::Map<const Eigen::VectorXd>(q.data(), q.size()));
  Eigen::FullPivLU<Matrix> lu(k);
  if (!lu.isInvertible())
    throw std::invalid_argument("sylvester_solve: spectra of a1 and a2 intersect");
  Eigen::VectorXd xv = lu.solve(-rhs);
  Matrix x = Eigen::Map<Matrix>(xv.data(), n1, n2);
  const double resid = (a1 * x - x * a2 + q).norm();
  if (resid > 1e-10 * std::max(1.0, q.norm()))
    throw std::runtime_error("sylvester_solve: residual too large (near-common eigenvalues)");
  return x;
}

Matrix dlyap(const Matrix& a, const Matrix& q) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n || q.rows() != n || q.cols() != n)
    throw std::invalid_argument("dlyap: dimension mismatch");
  if (n == 0) return Matrix::Zero(0, 0);
  // vec(A X A^T - X) = (A (x) A - I) vec(X)
  Matrix k = kron(a, a) - Matrix::Identity(n * n, n * n);
  Eigen::VectorXd rhs(Eigen::Map<const Eigen::VectorXd>(q.data(), q.size()));
  Eigen::PartialPivLU<Matrix> lu(k);
  Eigen::VectorXd xv = lu.solve(-rhs);
  Matrix x = Eigen::Map<Matrix>(xv.data(), n, n);
  x = 0.5 * (x + x.transpose()).eval();
  const double resid = (a * x * a.transpose() - x + q).norm();
  if (resid > 1e-8 * std::max(1.0, q.norm()))
    throw std::runtime_error("dlyap: residual too large (is A Schur?)");
  return x;
}

namespace {

double dare_residual(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r,
                     const Matrix& x) {
  Matrix gain = (r + b.transpose() * x * b).ldlt().solve(b.transpose() * x * a);
  return (a.transpose() * x * a - x - a.transpose() * x * b * gain + q).norm() /
         std::max(1.0, x.norm());
}

}  // namespace

Matrix dare(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r) {
  const int n = static_cast<int>(a.rows());
  if (n == 0) return Matrix::Zero(0, 0);

  // Structure-preserving doubling, quadratically convergent on most data.
  Matrix ak = a;
  Matrix gk = b * r.ldlt().solve(b.transpose());
  Matrix hk = q;
  bool sda_ok = true;
  for (int it = 0; it < 60; ++it) {
    Matrix w = Matrix::Identity(n, n) + gk * hk;
    Eigen::PartialPivLU<Matrix> lu(w);
    Matrix wia = lu.solve(ak);
    Matrix wig = lu.solve(gk);
    Matrix an = ak * wia;
    Matrix gn = gk + ak * wig * ak.transpose();
    Matrix hn = hk + ak.transpose() * hk * wia;
    if (!hn.allFinite() || !an.allFinite()) {
      sda_ok = false;
      break;
    }
    const double step = (hn - hk).norm();
    ak = an;
    gk = gn;
    hk = 0.5 * (hn + hn.transpose()).eval();
    if (step <= 1e-14 * std::max(1.0, hk.norm())) break;
  }
  if (sda_ok && dare_residual(a, b, q, r, hk) <= 1e-8) return hk;

  // Riccati difference iteration fallback: slower but dependable for the
  // small strongly-weighted plants met during rate bisection.
  Matrix x = q;
  for (long it = 0; it < 200000; ++it) {
    Matrix gain = (r + b.transpose() * x * b).ldlt().solve(b.transpose() * x * a);
    Matrix xn = a.transpose() * x * a - a.transpose() * x * b * gain + q;
    xn = 0.5 * (xn + xn.transpose()).eval();
    const double step = (xn - x).norm();
    x = xn;
    if (!x.allFinite()) break;
    if (step <= 1e-13 * std::max(1.0, x.norm())) break;
  }
  if (x.allFinite() && dare_residual(a, b, q, r, x) <= 1e-8) return x;
  throw std::runtime_error("dare: iterations did not converge");
}

Matrix stabilizing_feedback(const Matrix& a, const Matrix& b) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(b.cols());
  Matrix x = dare(a, b, Matrix::Identity(n, n), Matrix::Identity(m, m));
  Matrix gain = (Matrix::Identity(m, m) + b.transpose() * x * b)
                    .ldlt()
                    .solve(b.transpose() * x * a);
  Matrix feedback = -gain;
  if (!is_schur(a + b * feedback).schur)
    throw std::runtime_error("stabilizing_feedback: closed loop is not Schur");
  return feedback;
}

Matrix stabilizing_injection(const Matrix& a, const Matrix& c) {
  Matrix m = stabilizing_feedback(a.transpose(), c.transpose());
  return m.transpose();
}

Matrix psd_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
  Vector d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

Matrix spd_inv_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("spd_inv_sqrt: matrix is not positive definite");
  Vector d = es.eigenvalues().cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

Matrix reachable_subspace(const Matrix& a, const Matrix& b, double tol) {
  const int n = static_cast<int>(a.rows());
  if (n == 0) return Matrix::Zero(0, 0);
  Matrix r(n, n * b.cols());
  r.leftCols(b.cols()) = b;
  for (int i = 1; i < n; ++i)
    r.middleCols(i * b.cols(), b.cols()) = a * r.middleCols((i - 1) * b.cols(), b.cols());
  Eigen::JacobiSVD<Matrix> svd(r, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  const double cut = sv.size() ? std::max(sv(0) * tol, 1e-300) : 1e-300;
  int rank = 0;
  for (int k = 0; k < sv.size(); ++k)
    if (sv(k) > cut) ++rank;
  return svd.matrixU().leftCols(rank);
}

StateSpace observable_part(const StateSpace& g, double tol) {
  // Dual of the reachable-part restriction.
  Matrix v = reachable_subspace(g.a.transpose(), g.c.transpose(), tol);
  StateSpace out;
  out.a = v.transpose() * g.a * v;
  out.b = v.transpose() * g.b;
  out.c = g.c * v;
  out.d = g.d;
  return out;
}

StateSpace minimal_realization(const StateSpace& g, double tol) {
  Matrix u = reachable_subspace(g.a, g.b, tol);
  StateSpace reach{u.transpose() * g.a * u, u.transpose() * g.b, g.c * u, g.d};
  return observable_part(reach, tol);
}

Matrix kron(const Matrix& m1, const Matrix& m2) {
  Matrix out(m1.rows() * m2.rows(), m1.cols() * m2.cols());
  for (int i = 0; i < m1.rows(); ++i)
    for (int j = 0; j < m1.cols(); ++j)
      out.block(i * m2.rows(), j * m2.cols(), m2.rows(), m2.cols()) = m1(i, j) * m2;
  return out;
}

bool kron_identity_factor(const Matrix& m, int d, Matrix& factor, double atol) {
  if (d <= 0 || m.rows() % d != 0 || m.cols() % d != 0) return false;
  const int r = static_cast<int>(m.rows()) / d;
  const int c = static_cast<int>(m.cols()) / d;
  factor.resize(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) factor(i, j) = m(i * d, j * d);
  return (m - kron(factor, Matrix::Identity(d, d))).cwiseAbs().maxCoeff() <= atol;
}

}  // namespace ratesyn

#include "ratesyn/statespace.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace ratesyn {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

StateSpace::StateSpace(Matrix a_, Matrix b_, Matrix c_, Matrix d_)
    : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)) {
  require(a.rows() == a.cols(), "StateSpace: A must be square");
  require(b.rows() == a.rows(), "StateSpace: rows(B) != rows(A)");
  require(c.cols() == a.cols(), "StateSpace: cols(C) != cols(A)");
  require(d.rows() == c.rows(), "StateSpace: rows(D) != rows(C)");
  require(d.cols() == b.cols(), "StateSpace: cols(D) != cols(B)");
}

StateSpace StateSpace::gain(const Matrix& d) {
  StateSpace g;
  g.a = Matrix::Zero(0, 0);
  g.b = Matrix::Zero(0, d.cols());
  g.c = Matrix::Zero(d.rows(), 0);
  g.d = d;
  return g;
}

StateSpace StateSpace::scaled_identity(int size, double value) {
  return gain(value * Matrix::Identity(size, size));
}

StateSpace StateSpace::integrator(int dim) {
  return StateSpace(Matrix::Identity(dim, dim), Matrix::Identity(dim, dim),
                    Matrix::Identity(dim, dim), Matrix::Zero(dim, dim));
}

ComplexMatrix StateSpace::frequency_response(std::complex<double> z) const {
  const int n = states();
  if (n == 0) return d.cast<std::complex<double>>();
  ComplexMatrix zi = z * ComplexMatrix::Identity(n, n) - a.cast<std::complex<double>>();
  Eigen::FullPivLU<ComplexMatrix> lu(zi);
  if (!lu.isInvertible())
    throw std::invalid_argument("frequency_response: z is a pole of the system");
  return c.cast<std::complex<double>>() * lu.solve(b.cast<std::complex<double>>()) +
         d.cast<std::complex<double>>();
}

StateSpace series(const StateSpace& g1, const StateSpace& g2) {
  require(g1.inputs() == g2.outputs(),
          "series: input count of g1 must equal output count of g2");
  const int n1 = g1.states(), n2 = g2.states();
  StateSpace out;
  out.a = Matrix::Zero(n1 + n2, n1 + n2);
  out.a.topLeftCorner(n1, n1) = g1.a;
  out.a.topRightCorner(n1, n2) = g1.b * g2.c;
  out.a.bottomRightCorner(n2, n2) = g2.a;
  out.b = Matrix::Zero(n1 + n2, g2.inputs());
  out.b.topRows(n1) = g1.b * g2.d;
  out.b.bottomRows(n2) = g2.b;
  out.c = Matrix::Zero(g1.outputs(), n1 + n2);
  out.c.leftCols(n1) = g1.c;
  out.c.rightCols(n2) = g1.d * g2.c;
  out.d = g1.d * g2.d;
  return out;
}

StateSpace parallel(const StateSpace& g1, const StateSpace& g2) {
  require(g1.inputs() == g2.inputs() && g1.outputs() == g2.outputs(),
          "parallel: input and output counts must match");
  const int n1 = g1.states(), n2 = g2.states();
  StateSpace out;
  out.a = Matrix::Zero(n1 + n2, n1 + n2);
  out.a.topLeftCorner(n1, n1) = g1.a;
  out.a.bottomRightCorner(n2, n2) = g2.a;
  out.b = Matrix::Zero(n1 + n2, g1.inputs());
  out.b.topRows(n1) = g1.b;
  out.b.bottomRows(n2) = g2.b;
  out.c = Matrix::Zero(g1.outputs(), n1 + n2);
  out.c.leftCols(n1) = g1.c;
  out.c.rightCols(n2) = g2.c;
  out.d = g1.d + g2.d;
  return out;
}

StateSpace inverse(const StateSpace& g, const Config& cfg) {
  require(g.inputs() == g.outputs(), "inverse: D must be square");
  Eigen::JacobiSVD<Matrix> svd(g.d);
  const double smin = svd.singularValues().size()
                          ? svd.singularValues()(svd.singularValues().size() - 1)
                          : 0.0;
  const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  if (smin <= 0.0 || smax / smin > cfg.cond_limit)
    throw std::invalid_argument("inverse: feedthrough D is singular or ill-conditioned");
  Matrix dinv = g.d.inverse();
  StateSpace out;
  out.a = g.a - g.b * dinv * g.c;
  out.b = g.b * dinv;
  out.c = -dinv * g.c;
  out.d = dinv;
  return out;
}

StateSpace coordinate_change(const StateSpace& g, const Matrix& t) {
  require(t.rows() == t.cols() && t.rows() == g.states(),
          "coordinate_change: T must be n x n");
  Eigen::FullPivLU<Matrix> lu(t);
  if (!lu.isInvertible())
    throw std::invalid_argument("coordinate_change: T is singular");
  StateSpace out;
  out.a = lu.solve(g.a * t);
  out.b = lu.solve(g.b);
  out.c = g.c * t;
  out.d = g.d;
  return out;
}

StateSpace stack_outputs(const StateSpace& g1, const StateSpace& g2) {
  require(g1.inputs() == g2.inputs(), "stack_outputs: input counts must match");
  const int n1 = g1.states(), n2 = g2.states();
  StateSpace out;
  out.a = Matrix::Zero(n1 + n2, n1 + n2);
  out.a.topLeftCorner(n1, n1) = g1.a;
  out.a.bottomRightCorner(n2, n2) = g2.a;
  out.b = Matrix::Zero(n1 + n2, g1.inputs());
  out.b.topRows(n1) = g1.b;
  out.b.bottomRows(n2) = g2.b;
  out.c = Matrix::Zero(g1.outputs() + g2.outputs(), n1 + n2);
  out.c.topLeftCorner(g1.outputs(), n1) = g1.c;
  out.c.bottomRightCorner(g2.outputs(), n2) = g2.c;
  out.d = Matrix::Zero(g1.outputs() + g2.outputs(), g1.inputs());
  out.d.topRows(g1.outputs()) = g1.d;
  out.d.bottomRows(g2.outputs()) = g2.d;
  return out;
}

SchurResult is_schur(const Matrix& a, const Config& cfg) {
  require(a.rows() == a.cols(), "is_schur: matrix must be square");
  SchurResult r;
  if (a.rows() == 0) {
    r.schur = true;
    return r;
  }
  Eigen::EigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("is_schur: eigensolver failed");
  r.spectral_radius = es.eigenvalues().cwiseAbs().maxCoeff();
  r.schur = r.spectral_radius < 1.0 - cfg.tol_schur;
  return r;
}

bool hautus(const Matrix& a, const Matrix& bc, HautusMode mode,
            double disc_radius, const Config& cfg) {
  const int n = static_cast<int>(a.rows());
  require(a.rows() == a.cols(), "hautus: A must be square");
  if (mode == HautusMode::Stabilizable)
    require(bc.rows() == n, "hautus: rows(B) != n");
  else
    require(bc.cols() == n, "hautus: cols(C) != n");
  if (n == 0) return true;

  Eigen::EigenSolver<Matrix> es(a, false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("hautus: eigensolver failed");
  for (int i = 0; i < n; ++i) {
    const std::complex<double> lam = es.eigenvalues()(i);
    if (std::abs(lam) < disc_radius) continue;
    ComplexMatrix test;
    if (mode == HautusMode::Stabilizable) {
      test.resize(n, n + bc.cols());
      test.leftCols(n) = lam * ComplexMatrix::Identity(n, n) - a.cast<std::complex<double>>();
      test.rightCols(bc.cols()) = bc.cast<std::complex<double>>();
    } else {
      test.resize(n + bc.rows(), n);
      test.topRows(n) = lam * ComplexMatrix::Identity(n, n) - a.cast<std::complex<double>>();
      test.bottomRows(bc.rows()) = bc.cast<std::complex<double>>();
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(test);
    const auto& sv = svd.singularValues();
    const double tol = std::max(sv(0) * cfg.rank_rtol, 1e-300);
    int rank = 0;
    for (int k = 0; k < sv.size(); ++k)
      if (sv(k) > tol) ++rank;
    if (rank < n) return false;
  }
  return true;
}

}  // namespace ratesyn

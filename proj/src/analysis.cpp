#include "ratesyn/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "ratesyn/linalg.hpp"

namespace ratesyn {

Matrix FunctionClass::lower_matrix() const {
  return structured ? structured->first : m * Matrix::Identity(d, d);
}

Matrix FunctionClass::upper_matrix() const {
  return structured ? structured->second : L * Matrix::Identity(d, d);
}

void FunctionClass::validate() const {
  if (!(m > 0.0) || !(L > m))
    throw std::invalid_argument("FunctionClass: need L > m > 0");
  if (structured) {
    const auto& [mf, lf] = *structured;
    if (mf.rows() != d || lf.rows() != d)
      throw std::invalid_argument("FunctionClass: structured pair must be d x d");
    Eigen::SelfAdjointEigenSolver<Matrix> low(0.5 * (mf + mf.transpose()));
    Eigen::SelfAdjointEigenSolver<Matrix> gapm(0.5 * ((lf - mf) + (lf - mf).transpose()));
    if (low.eigenvalues().minCoeff() <= 0.0 || gapm.eigenvalues().minCoeff() <= 0.0)
      throw std::invalid_argument("FunctionClass: need 0 < M_f < L_f");
  }
}

AlgorithmRealization AlgorithmRealization::from_factor(const Matrix& ac, const Matrix& bc,
                                                       const Matrix& cc, const Matrix& dc,
                                                       int d) {
  const int nc = static_cast<int>(ac.rows());
  AlgorithmRealization alg;
  alg.ac = ac;
  alg.bc = bc;
  alg.cc = cc;
  alg.dc = dc;
  alg.d = d;
  alg.a = Matrix::Zero(d + nc, d + nc);
  alg.a.topLeftCorner(d, d) = Matrix::Identity(d, d);
  alg.a.bottomLeftCorner(nc, d) = bc;
  alg.a.bottomRightCorner(nc, nc) = ac;
  alg.b = Matrix::Zero(d + nc, d);
  alg.b.topRows(d) = Matrix::Identity(d, d);
  alg.c = Matrix::Zero(d, d + nc);
  alg.c.leftCols(d) = dc;
  alg.c.rightCols(nc) = cc;
  return alg;
}

namespace analysis {

namespace {

AlgorithmRealization finish_catalog(const StateSpace& loop, int d) {
  StructureReport rep = structure_check(loop);
  if (!rep.ok)
    throw std::runtime_error("catalog: structure construction failed: " + rep.reason);
  AlgorithmRealization alg = rep.value;
  // Keep the loop in its naturally given coordinates.
  alg.a = loop.a;
  alg.b = loop.b;
  alg.c = loop.c;
  alg.d = d;
  return alg;
}

}  // namespace

AlgorithmRealization gradient_descent(double alpha, double L, int d) {
  if (!(alpha > 0.0) || !(alpha < 2.0 / L))
    throw std::invalid_argument("gradient_descent: need alpha in (0, 2/L)");
  Matrix id = Matrix::Identity(d, d);
  return finish_catalog(StateSpace(id, -alpha * id, id, Matrix::Zero(d, d)), d);
}

namespace {

AlgorithmRealization momentum_template(double alpha, double beta, double gamma, double L,
                                       int d) {
  if (!(beta >= 0.0) || !(beta < 1.0))
    throw std::invalid_argument("momentum: need beta in [0, 1)");
  if (!(alpha > 0.0) || !(alpha < 2.0 * (1.0 + beta) / L))
    throw std::invalid_argument("momentum: need alpha in (0, 2(1+beta)/L)");
  Matrix id = Matrix::Identity(d, d);
  Matrix a(2 * d, 2 * d), b(2 * d, d), c(d, 2 * d);
  a << (1.0 + beta) * id, -beta * id, id, Matrix::Zero(d, d);
  b << -alpha * id, Matrix::Zero(d, d);
  c << (1.0 + gamma) * id, -gamma * id;
  return finish_catalog(StateSpace(a, b, c, Matrix::Zero(d, d)), d);
}

}  // namespace

AlgorithmRealization heavy_ball(double alpha, double beta, double L, int d) {
  return momentum_template(alpha, beta, 0.0, L, d);
}

AlgorithmRealization nesterov(double alpha, double beta, double L, int d) {
  return momentum_template(alpha, beta, beta, L, d);
}

AlgorithmRealization triple_momentum(double m, double L, int d) {
  const double kappa = L / m;
  const double rho = 1.0 - 1.0 / std::sqrt(kappa);
  const double alpha = (1.0 + rho) / L;
  const double beta = rho * rho / (2.0 - rho);
  const double gamma = rho * rho / ((1.0 + rho) * (2.0 - rho));
  return momentum_template(alpha, beta, gamma, L, d);
}

StructureReport structure_check(const StateSpace& g, const Config& cfg) {
  StructureReport rep;
  if (g.inputs() != g.outputs()) {
    rep.reason = "loop system must be square";
    return rep;
  }
  if (g.d.size() > 0 && g.d.cwiseAbs().maxCoeff() > 1e-12) {
    rep.reason = "loop system must have zero feedthrough";
    return rep;
  }
  const int d = g.inputs();

  StateSpace sys = g;
  if (!hautus(sys.a, sys.c, HautusMode::Detectable, 1.0, cfg)) {
    sys = observable_part(sys, cfg.rank_rtol);
    rep.reduced = true;
  }
  const int n = sys.states();

  // rank(A - I) must be n - d; tolerance scaled by the loop matrix, not by
  // the difference itself (which is near zero for pure integrators).
  const double scale = std::max(1.0, sys.a.norm());
  const double rank_tol = std::max(cfg.rank_rtol * scale, n * 1e-14 * scale);
  Eigen::JacobiSVD<Matrix> svd(sys.a - Matrix::Identity(n, n));
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int k = 0; k < sv.size(); ++k)
    if (sv(k) > rank_tol) ++rank;
  if (rank != n - d) {
    rep.reason = "rank(A - I) = " + std::to_string(rank) + ", expected n - d = " +
                 std::to_string(n - d);
    return rep;
  }

  Matrix kb =
      kernel_basis((sys.a - Matrix::Identity(n, n)).transpose(), cfg, rank_tol);
  if (kb.cols() != d) {
    rep.reason = "left kernel of A - I has wrong dimension";
    return rep;
  }
  Matrix kb_b = kb.transpose() * sys.b;  // d x d
  Eigen::FullPivLU<Matrix> lu(kb_b);
  if (!lu.isInvertible()) {
    rep.reason = "T1' B is singular (1 would be an eigenvalue of A + B m C)";
    return rep;
  }
  Matrix t1 = kb * lu.inverse().transpose();
  Matrix t2 = kernel_basis(sys.b.transpose(), cfg);
  if (t2.cols() != n - d) {
    rep.reason = "B does not have full column rank";
    return rep;
  }
  Matrix t(n, n);
  t << t1, t2;
  Eigen::FullPivLU<Matrix> tlu(t);
  if (!tlu.isInvertible()) {
    rep.reason = "combined coordinate transform is singular";
    return rep;
  }
  Matrix tinv_t = tlu.inverse().transpose();  // T^{-T}

  Matrix s = t.transpose() * sys.a * tinv_t;
  Matrix tb = t.transpose() * sys.b;
  // Deviation from the expected block pattern; the off blocks are empty for
  // memoryless factors (n = d).
  double pat_err = (s.topLeftCorner(d, d) - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() +
                   (tb.topRows(d) - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (n > d) {
    pat_err += s.topRightCorner(d, n - d).cwiseAbs().maxCoeff();
    pat_err += tb.bottomRows(n - d).cwiseAbs().maxCoeff();
  }
  if (pat_err > 1e-8) {
    rep.reason = "transformed matrices violate the integrator block pattern";
    return rep;
  }

  Matrix ct = sys.c * tinv_t;
  AlgorithmRealization alg;
  alg.d = d;
  alg.ac = s.bottomRightCorner(n - d, n - d);
  alg.bc = s.bottomLeftCorner(n - d, d);
  alg.dc = ct.leftCols(d);
  alg.cc = ct.rightCols(n - d);
  alg.a = sys.a;
  alg.b = sys.b;
  alg.c = sys.c;
  rep.value = alg;
  rep.ok = true;
  return rep;
}

Vector fixed_point(const AlgorithmRealization& alg, const Vector& z_star) {
  const int n = alg.states();
  const int d = alg.d;
  if (z_star.size() != d) throw std::invalid_argument("fixed_point: z* must have size d");
  Matrix lhs(n + d, n);
  lhs.topRows(n) = alg.a - Matrix::Identity(n, n);
  lhs.bottomRows(d) = alg.c;
  Vector rhs = Vector::Zero(n + d);
  rhs.tail(d) = z_star;
  Eigen::ColPivHouseholderQR<Matrix> qr(lhs);
  if (qr.rank() < n)
    throw std::runtime_error("fixed_point: singular system (structure violated)");
  Vector x = qr.solve(rhs);
  if ((lhs * x - rhs).norm() > 1e-10 * std::max(1.0, z_star.norm()))
    throw std::runtime_error("fixed_point: residual too large");
  return x;
}

StateSpace weighted_system(const AlgorithmRealization& alg, const FunctionClass& fc,
                           double rho) {
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("weighted_system: rho must lie in (0,1)");
  const Matrix mf = fc.lower_matrix();
  const Matrix lf = fc.upper_matrix();
  StateSpace g;
  g.a = (alg.a + alg.b * mf * alg.c) / rho;
  g.b = alg.b / rho;
  g.c = (lf - mf) * alg.c;
  g.d = -Matrix::Identity(alg.d, alg.d);
  return g;
}

lmi::LmiProblem assemble_certify_problem(const AlgorithmRealization& alg,
                                         const FunctionClass& fc, double rho, int ell,
                                         MultiplierClass class_tag, const Config& cfg) {
  (void)cfg;
  fc.validate();
  const int d = alg.d;
  StateSpace gw = weighted_system(alg, fc, rho);
  MultiplierFilter skel = fir_skeleton(ell, d);

  const int nf = ell * d;
  const int n = alg.states();

  // Series interconnection multiplier * weighted system.
  Matrix a(nf + n, nf + n), b(nf + n, d);
  a << skel.a_f, skel.b_f * gw.c, Matrix::Zero(n, nf), gw.a;
  b << skel.b_f * gw.d, gw.b;

  lmi::LmiProblem problem;
  AffineExpr x = problem.add_symmetric("X", nf + n);

  lmi::ZfVarDesc zf;
  zf.class_tag = class_tag;
  zf.ell = ell;
  zf.d = d;
  zf.rho = rho;
  if (fc.structured)
    zf.transform = spd_inv_sqrt(fc.upper_matrix() - fc.lower_matrix());
  auto handles = problem.add_zames_falb("Lambda", zf);

  AffineExpr c_expr = AffineExpr::block({{handles.c_f, handles.d_f.right_mul(gw.c)}});
  AffineExpr d_expr = handles.d_f.right_mul(gw.d);

  problem.add_constraint(x, lmi::Sense::PositiveDefinite, "X > 0");
  problem.add_constraint(lmi::kyp_constraint(a, b, c_expr, d_expr, lmi::PBlocks::snr(d), x),
                         lmi::Sense::NegativeDefinite, "analysis KYP");
  return problem;
}

CertifyResult certify(const AlgorithmRealization& alg, const FunctionClass& fc, double rho,
                      int ell, MultiplierClass class_tag, const Config& cfg) {
  CertifyResult res;
  if (!(rho > 0.0 && rho < 1.0)) {
    res.status = lmi::SdpSolution::Status::Infeasible;
    res.reason = "rho outside (0,1)";
    return res;
  }
  // Standing assumption: the weighted loop matrix must be Schur.
  StateSpace gw = weighted_system(alg, fc, rho);
  SchurResult schur = is_schur(gw.a, cfg);
  if (!schur.schur) {
    res.status = lmi::SdpSolution::Status::Infeasible;
    res.reason = "rho^-1 (A + B m C) is not Schur (radius " +
                 std::to_string(schur.spectral_radius) + ")";
    return res;
  }

  lmi::LmiProblem problem = assemble_certify_problem(alg, fc, rho, ell, class_tag, cfg);
  lmi::SdpSolution sol = lmi::solve(problem, cfg);
  res.status = sol.status;
  res.margin = sol.margin;
  if (sol.status == lmi::SdpSolution::Status::Feasible) {
    RateCertificate cert;
    cert.rho = rho;
    cert.ell = ell;
    cert.class_tag = class_tag;
    cert.lambda = sol.zf_value("Lambda", problem);
    // The certificate is a cone direction; normalize the homogeneous scale.
    Eigen::JacobiSVD<Matrix> svd(cert.lambda.blocks[0]);
    const double lead = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    if (lead > 1e-12)
      for (auto& blk : cert.lambda.blocks) blk /= lead;
    cert.margin = sol.verified_margin;
    cert.method = CertifyMethod::AnalysisLmi;
    res.certificate = cert;
  } else if (!sol.diagnostics.empty()) {
    res.reason = sol.diagnostics;
  }
  return res;
}

bool verify_certificate(const AlgorithmRealization& alg, const FunctionClass& fc,
                        const RateCertificate& cert, const Config& cfg) {
  StateSpace gw = weighted_system(alg, fc, cert.rho);
  if (!is_schur(gw.a, cfg).schur) return false;
  MultiplierFilter filt = build_fir(cert.lambda);
  StateSpace pig = series(filt.to_statespace(), gw);

  lmi::LmiProblem problem;
  AffineExpr x = problem.add_symmetric("X", pig.states());
  problem.add_constraint(x, lmi::Sense::PositiveDefinite, "X > 0");
  problem.add_constraint(lmi::kyp_constraint(pig, lmi::PBlocks::snr(alg.d), x),
                         lmi::Sense::NegativeDefinite, "analysis KYP at Lambda*");
  lmi::SdpSolution sol = lmi::solve(problem, cfg);
  return sol.status == lmi::SdpSolution::Status::Feasible && sol.verified_margin > 0.0;
}

BisectResult bisect_rate(const AlgorithmRealization& alg, const FunctionClass& fc, int ell,
                         MultiplierClass class_tag, const Config& cfg,
                         const BisectOptions& opts) {
  BisectResult out;
  const double tol = opts.tol > 0.0 ? opts.tol : cfg.tol_bisect;
  double hi = opts.upper;
  double lo = opts.lower;
  if (lo < 0.0) lo = std::max(1.0 - 1.0 / std::sqrt(fc.kappa()) - 0.05, 1e-3);

  CertifyResult at_hi = certify(alg, fc, hi, ell, class_tag, cfg);
  if (!at_hi.feasible()) {
    out.reason = "not certifiable at the bracket ceiling rho = " + std::to_string(hi);
    return out;
  }
  out.certificate = at_hi.certificate;
  out.rho_star = hi;

  CertifyResult at_lo = certify(alg, fc, lo, ell, class_tag, cfg);
  if (at_lo.feasible()) {
    out.ok = true;
    out.rho_star = lo;
    out.certificate = at_lo.certificate;
    out.reason = "feasible at the bracket floor";
    return out;
  }

  while (hi - lo > tol) {
    const double mid = 0.5 * (hi + lo);
    CertifyResult at_mid = certify(alg, fc, mid, ell, class_tag, cfg);
    if (at_mid.feasible()) {
      hi = mid;
      out.certificate = at_mid.certificate;
    } else {
      if (at_mid.status == lmi::SdpSolution::Status::Inconclusive) ++out.inconclusive_count;
      lo = mid;
    }
  }
  out.ok = true;
  out.rho_star = hi;
  return out;
}

}  // namespace analysis
}  // namespace ratesyn

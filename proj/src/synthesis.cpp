#include "ratesyn/synthesis.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "ratesyn/linalg.hpp"
#include "ratesyn/simulate.hpp"

namespace ratesyn {

StateSpace GeneralizedPlant::close(const StateSpace& k) const {
  if (k.inputs() != ny() || k.outputs() != nu())
    throw std::invalid_argument("GeneralizedPlant::close: controller dimensions mismatch");
  const int n = nx(), nk = k.states();
  StateSpace cl;
  cl.a = Matrix::Zero(n + nk, n + nk);
  cl.a.topLeftCorner(n, n) = a + b * k.d * c;
  cl.a.topRightCorner(n, nk) = b * k.c;
  cl.a.bottomLeftCorner(nk, n) = k.b * c;
  cl.a.bottomRightCorner(nk, nk) = k.a;
  cl.b = Matrix::Zero(n + nk, nw());
  cl.b.topRows(n) = b1 + b * k.d * f;
  cl.b.bottomRows(nk) = k.b * f;
  cl.c = Matrix::Zero(nz(), n + nk);
  cl.c.leftCols(n) = c1 + e * k.d * c;
  cl.c.rightCols(nk) = e * k.c;
  cl.d = d1 + e * k.d * f;
  return cl;
}

namespace synthesis {

YoulaData youla_data(const FunctionClass& fc, double rho, int d) {
  fc.validate();
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("youla_data: rho in (0,1)");
  const Matrix mf = fc.structured ? fc.lower_matrix() : fc.m * Matrix::Identity(d, d);
  const Matrix lf = fc.structured ? fc.upper_matrix() : fc.L * Matrix::Identity(d, d);
  const Matrix id = Matrix::Identity(d, d);
  const Matrix sigma_mat = lf * mf.inverse() - id;

  YoulaData y;
  y.sigma = fc.sigma();
  y.rho = rho;
  y.d = d;
  y.t1 = StateSpace(Matrix::Zero(d, d), -id / rho, sigma_mat, -id);
  y.t2 = StateSpace::gain(lf - mf);
  Matrix a3(2 * d, 2 * d), b3(2 * d, d), c3(d, 2 * d);
  a3 << Matrix::Zero(d, d), Matrix::Zero(d, d), id / rho, Matrix::Zero(d, d);
  b3 << -id / rho, id / rho;
  c3 << Matrix::Zero(d, d), id;
  y.t3 = StateSpace(a3, b3, c3, Matrix::Zero(d, d));
  return y;
}

SynthesisPlant build_synthesis_plant(const FunctionClass& fc, double rho, int ell) {
  fc.validate();
  if (ell < 0) throw std::invalid_argument("build_synthesis_plant: ell >= 0");
  const int d = fc.d;
  const Matrix id = Matrix::Identity(d, d);
  const Matrix mf = fc.lower_matrix();
  const Matrix lf = fc.upper_matrix();

  SynthesisPlant p;
  p.ell = ell;
  p.d = d;
  p.rho = rho;
  p.sigma_mat = lf * mf.inverse() - id;
  p.gap = lf - mf;

  MultiplierFilter skel = fir_skeleton(ell, d);
  const int nf = ell * d;
  const int n = nf + 2 * d;

  p.a = Matrix::Zero(n, n);
  p.a.topLeftCorner(nf, nf) = skel.a_f;
  p.a.block(0, nf, nf, d) = skel.b_f * p.sigma_mat;
  p.a.block(nf + d, nf, d, d) = id / rho;

  p.b1 = Matrix::Zero(n, d);
  p.b1.topRows(nf) = -skel.b_f;
  p.b1.middleRows(nf, d) = -id / rho;
  p.b1.bottomRows(d) = id / rho;

  p.b = Matrix::Zero(n, d);

  p.e = p.gap;
  p.c = Matrix::Zero(d, n);
  p.c.rightCols(d) = id;
  p.f = Matrix::Zero(d, d);

  p.j = Matrix::Zero(n, nf + d);
  p.j.topLeftCorner(nf, nf) = Matrix::Identity(nf, nf);
  p.j.block(nf, nf, d, d) = id;
  return p;
}

AffineExpr SynthesisPlant::c1_expr(const lmi::LmiProblem::ZfHandles& h) const {
  return AffineExpr::block(
      {{h.c_f, h.d_f.right_mul(sigma_mat), AffineExpr::zero(d, d)}});
}

AffineExpr SynthesisPlant::d1_expr(const lmi::LmiProblem::ZfHandles& h) const {
  return h.d_f.scaled(-1.0);
}

GeneralizedPlant SynthesisPlant::at_multiplier(const ZamesFalbParams& params) const {
  MultiplierFilter filt = build_fir(params);
  const int nf = ell * d;
  GeneralizedPlant gp;
  gp.a = a;
  gp.b1 = b1;
  gp.b = b;
  gp.c1 = Matrix::Zero(d, nf + 2 * d);
  gp.c1.leftCols(nf) = filt.c_f;
  gp.c1.middleCols(nf, d) = filt.d_f * sigma_mat;
  gp.d1 = -filt.d_f;
  gp.e = e;
  gp.c = c;
  gp.f = f;
  return gp;
}

namespace {

lmi::ZfVarDesc zf_desc_for(const FunctionClass& fc, double rho, int ell,
                           MultiplierClass class_tag) {
  lmi::ZfVarDesc desc;
  desc.class_tag = class_tag;
  desc.ell = ell;
  desc.d = fc.d;
  desc.rho = rho;
  if (fc.structured) desc.transform = spd_inv_sqrt(fc.upper_matrix() - fc.lower_matrix());
  return desc;
}

// The design LMI: bullet^T blkdiag(X, -X, [0 I; I 0]) [AJ B1; J 0; C1 J D1; 0 I] < 0.
AffineExpr design_lmi(const SynthesisPlant& plant, const AffineExpr& x,
                      const AffineExpr& c1, const AffineExpr& d1) {
  const int d = plant.d;
  const int cols = static_cast<int>(plant.j.cols()) + d;
  Matrix top(plant.a.rows(), cols);
  top << plant.a * plant.j, plant.b1;
  Matrix mid(plant.j.rows(), cols);
  mid << plant.j, Matrix::Zero(plant.j.rows(), d);

  AffineExpr cd = AffineExpr::block({{c1.right_mul(plant.j), d1}});
  Matrix zi(d, cols);
  zi << Matrix::Zero(d, cols - d), Matrix::Identity(d, d);

  return x.congruence(top) - x.congruence(mid) + cd.transpose().right_mul(zi).sym();
}

}  // namespace

FeasibilityResult synthesis_feasible(const FunctionClass& fc, double rho, int ell,
                                     MultiplierClass class_tag, const Config& cfg) {
  FeasibilityResult res;
  if (!(rho > 0.0 && rho < 1.0)) {
    res.status = lmi::SdpSolution::Status::Infeasible;
    res.reason = "rho outside (0,1)";
    return res;
  }
  // Unstructured data are Kronecker-structured, so solve at block size one.
  FunctionClass fcs = fc;
  if (!fc.structured) fcs.d = 1;

  SynthesisPlant plant = build_synthesis_plant(fcs, rho, ell);
  lmi::LmiProblem problem;
  AffineExpr x = problem.add_symmetric("X", plant.a.rows());
  auto handles = problem.add_zames_falb("Lambda", zf_desc_for(fcs, rho, ell, class_tag));

  problem.add_constraint(x, lmi::Sense::PositiveDefinite, "X > 0");
  problem.add_constraint(design_lmi(plant, x, plant.c1_expr(handles), plant.d1_expr(handles)),
                         lmi::Sense::NegativeDefinite, "design KYP");

  lmi::SdpSolution sol = lmi::solve(problem, cfg);
  res.status = sol.status;
  res.margin = sol.margin;
  res.reason = sol.diagnostics;
  if (sol.status == lmi::SdpSolution::Status::Feasible) {
    res.lambda = sol.zf_value("Lambda", problem);
    res.x = sol.matrix_value("X", problem);
  }
  return res;
}

Matrix pick_matrix(const FunctionClass& fc, double rho, const std::vector<double>& lambda) {
  const double kappa = fc.kappa();
  double r = 0.0;
  for (size_t k = 0; k < lambda.size(); ++k) r += std::pow(rho, k) * lambda[k] * kappa;
  Matrix m(2, 2);
  m << 2.0 * r / (1.0 - rho * rho), r + lambda[0], r + lambda[0], 2.0 * lambda[0];
  return m;
}

FeasibilityResult pick_feasible(const FunctionClass& fc, double rho, int ell,
                                const Config& cfg) {
  FeasibilityResult res;
  if (!(rho > 0.0 && rho < 1.0)) {
    res.status = lmi::SdpSolution::Status::Infeasible;
    res.reason = "rho outside (0,1)";
    return res;
  }
  const double kappa = fc.kappa();

  // Homogeneity permits normalizing the feedthrough coefficient to one.
  lmi::LmiProblem problem;
  AffineExpr tail = ell > 0 ? problem.add_general("lambda_tail", ell, 1)
                            : AffineExpr::zero(0, 1);

  // R = kappa (1 + sum_k rho^k lambda_k); coefficients on the 2x2 blocks.
  Matrix base(2, 2);
  base << 2.0 * kappa / (1.0 - rho * rho), 1.0 + kappa, 1.0 + kappa, 2.0;
  AffineExpr block(base);
  if (ell > 0) {
    std::vector<Matrix> images(ell);
    for (int k = 1; k <= ell; ++k) {
      const double rk = std::pow(rho, k) * kappa;
      Matrix img(2, 2);
      img << 2.0 * rk / (1.0 - rho * rho), rk, rk, 0.0;
      images[k - 1] = img;
    }
    block = block + AffineExpr::from_var("lambda_tail", Matrix::Zero(2, 2), std::move(images));
  }
  problem.add_constraint(block, lmi::Sense::PositiveDefinite, "eliminated design test");

  if (ell > 0) {
    // lambda_k <= 0 and the two weighted sum conditions with lambda_0 = 1.
    for (int k = 1; k <= ell; ++k) {
      Matrix sel = Matrix::Zero(1, ell);
      sel(0, k - 1) = -1.0;
      problem.add_elementwise(tail.left_mul(sel), "lambda <= 0");
    }
    Matrix wp(1, ell), wn(1, ell);
    for (int k = 1; k <= ell; ++k) {
      wp(0, k - 1) = std::pow(rho, k);
      wn(0, k - 1) = std::pow(rho, -k);
    }
    problem.add_elementwise(tail.left_mul(wp) + AffineExpr(Matrix::Ones(1, 1)),
                            "sum lambda rho^k >= 0");
    problem.add_elementwise(tail.left_mul(wn) + AffineExpr(Matrix::Ones(1, 1)),
                            "sum lambda rho^-k >= 0");
  }

  lmi::SdpSolution sol = lmi::solve(problem, cfg);
  res.status = sol.status;
  res.margin = sol.margin;
  res.reason = sol.diagnostics;
  if (sol.status == lmi::SdpSolution::Status::Feasible) {
    std::vector<double> lam(ell + 1, 0.0);
    lam[0] = 1.0;
    if (ell > 0) {
      const Vector& t = sol.assignment.at("lambda_tail");
      for (int k = 1; k <= ell; ++k) lam[k] = t(k - 1);
    }
    res.lambda = ZamesFalbParams::repeated(lam, rho, fc.d);
  }
  return res;
}

double optimal_rate(const FunctionClass& fc, int ell) {
  const double kappa = fc.kappa();
  if (kappa <= 1.0) throw std::invalid_argument("optimal_rate: kappa must exceed 1");
  if (ell >= 1) return 1.0 - 1.0 / std::sqrt(kappa);
  return (kappa - 1.0) / (kappa + 1.0);
}

StateSpace reconstruct_controller(const GeneralizedPlant& plant, const Matrix& x,
                                  const Matrix& y, const Config& cfg) {
  const int n = plant.nx();
  const int nu = plant.nu(), ny = plant.ny();
  if (x.rows() != n || y.rows() != n)
    throw std::invalid_argument("reconstruct_controller: X, Y must match the plant order");

  // Close (X, Y) to a Lyapunov matrix with block structure [X M; M^T I].
  Matrix yinv = y.llt().solve(Matrix::Identity(n, n));
  Matrix gap = x - yinv;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (gap + gap.transpose()));
  if (es.eigenvalues().minCoeff() < -1e-8)
    throw std::runtime_error("reconstruct_controller: X - Y^-1 is indefinite");
  Matrix mfac = psd_sqrt(gap);
  Matrix lyap(2 * n, 2 * n);
  lyap << x, mfac, mfac.transpose(), Matrix::Identity(n, n);
  Matrix lyap_inv = lyap.llt().solve(Matrix::Identity(2 * n, 2 * n));

  // Closed-loop matrices are affine in the controller; for a fixed Lyapunov
  // matrix the sign condition becomes one more LMI via a Schur complement.
  lmi::LmiProblem problem;
  AffineExpr ak = problem.add_general("Ak", n, n);
  AffineExpr bk = problem.add_general("Bk", n, ny);
  AffineExpr ck = problem.add_general("Ck", nu, n);
  AffineExpr dk = problem.add_general("Dk", nu, ny);

  AffineExpr acl = AffineExpr::block(
      {{AffineExpr(plant.a) + dk.left_mul(plant.b).right_mul(plant.c), ck.left_mul(plant.b)},
       {bk.right_mul(plant.c), ak}});
  AffineExpr bcl = AffineExpr::block(
      {{AffineExpr(plant.b1) + dk.left_mul(plant.b).right_mul(plant.f)}, {bk.right_mul(plant.f)}});
  AffineExpr ccl = AffineExpr::block(
      {{AffineExpr(plant.c1) + dk.left_mul(plant.e).right_mul(plant.c), ck.left_mul(plant.e)}});
  AffineExpr dcl = AffineExpr(plant.d1) + dk.left_mul(plant.e).right_mul(plant.f);

  AffineExpr big = AffineExpr::block(
      {{AffineExpr(-lyap_inv), acl, bcl},
       {acl.transpose(), AffineExpr(-lyap), ccl.transpose()},
       {bcl.transpose(), ccl, dcl.sym()}});
  problem.add_constraint(big, lmi::Sense::NegativeDefinite, "controller LMI");

  lmi::SdpSolution sol = lmi::solve(problem, cfg);
  // A strictly feasible eigenvalue-verified witness counts even when its
  // margin sits below the nominal threshold (the scale of this inequality is
  // set by the completed Lyapunov matrix).
  if (sol.status != lmi::SdpSolution::Status::Feasible && !(sol.verified_margin > 0.0))
    throw std::runtime_error("reconstruct_controller: controller LMI infeasible (margin " +
                             std::to_string(sol.margin) + ")");

  StateSpace k(sol.matrix_value("Ak", problem), sol.matrix_value("Bk", problem),
               sol.matrix_value("Ck", problem), sol.matrix_value("Dk", problem));

  // Post-verification oracle: the closed loop must satisfy the KYP test with
  // the completed Lyapunov matrix as an explicit witness (deterministic
  // eigenvalue check, no further solve).
  StateSpace cl = plant.close(k);
  AffineExpr witness_kyp = lmi::kyp_constraint(cl, lmi::PBlocks::snr(cl.inputs()),
                                               AffineExpr(lyap));
  Eigen::SelfAdjointEigenSolver<Matrix> verify(witness_kyp.eval({}));
  if (verify.eigenvalues().maxCoeff() >= 0.0)
    throw std::runtime_error("reconstruct_controller: closed-loop verification failed");
  return k;
}

GeneralizedPlant algorithm_plant(const FunctionClass& fc, double rho, int d) {
  const Matrix id = Matrix::Identity(d, d);
  const Matrix mf = fc.structured ? fc.lower_matrix() : fc.m * Matrix::Identity(d, d);
  const Matrix lf = fc.structured ? fc.upper_matrix() : fc.L * Matrix::Identity(d, d);
  GeneralizedPlant p;
  p.a = id / rho;
  p.b1 = id / rho;
  p.b = mf / rho;
  p.c1 = Matrix::Zero(d, d);
  p.d1 = -id;
  p.e = lf - mf;
  p.c = id;
  p.f = Matrix::Zero(d, d);
  return p;
}

AlgorithmRealization youla_to_algorithm(const StateSpace& q, const FunctionClass& fc,
                                        double rho, const Config& cfg) {
  const int d = q.inputs();
  if (q.outputs() != d) throw std::invalid_argument("youla_to_algorithm: Q must be square");
  if (!is_schur(q.a, cfg).schur)
    throw std::invalid_argument("youla_to_algorithm: Q must be stable");
  const Matrix mf = fc.structured ? fc.lower_matrix() : fc.m * Matrix::Identity(d, d);
  const Matrix mf_inv = mf.inverse();
  const int nq = q.states();

  Matrix ac(d + nq, d + nq), bc(d + nq, d), cc(d, d + nq), dc(d, d);
  ac << -mf * q.d, -mf * q.c, rho * q.b, rho * q.a;
  bc << -mf * q.d, rho * q.b;
  cc << q.d, q.c;
  dc = q.d - mf_inv;

  AlgorithmRealization alg = AlgorithmRealization::from_factor(ac, bc, cc, dc, d);

  // The de-weighted controller closing the design plant must reproduce
  // T1 + T2 Q T3 in frequency response.
  StateSpace con(ac / rho, bc / rho, cc, dc);
  GeneralizedPlant plant = algorithm_plant(fc, rho, d);
  StateSpace closed = plant.close(con);
  YoulaData yd = youla_data(fc, rho, d);
  StateSpace reference = parallel(yd.t1, series(yd.t2, series(q, yd.t3)));
  for (int i = 0; i < 10; ++i) {
    const double theta = 2.0 * M_PI * (i + 0.3) / 10.0;
    const std::complex<double> z = 1.25 * std::exp(std::complex<double>(0.0, theta));
    ComplexMatrix diff = closed.frequency_response(z) - reference.frequency_response(z);
    const double scale = std::max(1.0, reference.frequency_response(z).norm());
    if (diff.norm() > 1e-8 * scale)
      throw std::runtime_error("youla_to_algorithm: closed loop deviates from T1 + T2 Q T3");
  }
  return alg;
}

namespace {

AlgorithmRealization kron_expand(const AlgorithmRealization& alg, int d) {
  if (d == 1) return alg;
  Matrix id = Matrix::Identity(d, d);
  return AlgorithmRealization::from_factor(kron(alg.ac, id), kron(alg.bc, id),
                                           kron(alg.cc, id), kron(alg.dc, id), alg.d * d);
}

SynthesisOutput synthesize_impl(const FunctionClass& fc, double rho, int ell,
                                MultiplierClass class_tag, const Config& cfg) {
  fc.validate();
  FeasibilityResult feas = synthesis_feasible(fc, rho, ell, class_tag, cfg);
  if (!feas.feasible())
    throw std::runtime_error("synthesize: design LMI not feasible at rho = " +
                             std::to_string(rho));

  // The feasibility solve ran at block size one for unstructured classes.
  FunctionClass fcs = fc;
  if (!fc.structured) fcs.d = 1;
  const int ds = fcs.d;

  // The design inequalities are jointly homogeneous in (X, Lambda); pin the
  // scale at Lambda_0 ~ I so the completion below stays well conditioned.
  ZamesFalbParams lambda = *feas.lambda;
  Matrix x_cert = *feas.x;
  {
    Eigen::JacobiSVD<Matrix> svd(lambda.blocks[0]);
    const double lead = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    if (lead > 1e-12) {
      for (auto& blk : lambda.blocks) blk /= lead;
      x_cert /= lead;
    }
  }
  SynthesisPlant splant = build_synthesis_plant(fcs, rho, ell);

  // Scale Y from the Lyapunov solution of the Schur state matrix.
  Matrix y0 = dlyap(splant.a, Matrix::Identity(splant.a.rows(), splant.a.cols()));
  Matrix xinv = x_cert.llt().solve(Matrix::Identity(x_cert.rows(), x_cert.cols()));
  Matrix y0_isqrt = spd_inv_sqrt(y0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(y0_isqrt * xinv * y0_isqrt);
  const double alpha0 = 2.0 * (es.eigenvalues().maxCoeff() + 1.0);
  Matrix y = alpha0 * y0;

  GeneralizedPlant design = splant.at_multiplier(lambda);
  StateSpace z_rec = reconstruct_controller(design, x_cert, y, cfg);

  // Ensure the multiplier feedthrough is invertible before inverting the
  // filter; perturb along the identity tail direction when needed.
  ZamesFalbParams lambda_tilde = lambda;
  {
    Eigen::JacobiSVD<Matrix> svd(lambda_tilde.blocks[0]);
    double lam_norm = 0.0;
    for (const auto& bmat : lambda_tilde.blocks)
      lam_norm = std::max(lam_norm, bmat.cwiseAbs().maxCoeff());
    const double floor = std::max(1e-8, 1e-6 * lam_norm);
    if (svd.singularValues().minCoeff() < floor)
      lambda_tilde.blocks[0] += floor * Matrix::Identity(ds, ds);
  }

  // Q = T2^-1 Pi(Lambda~)^-1 (T2 Z); the static gap gain commutes through.
  MultiplierFilter filt = build_fir(lambda_tilde);
  StateSpace pi_inv = inverse(filt.to_statespace(), cfg);
  YoulaData yd = youla_data(fcs, rho, ds);
  StateSpace z_lco = series(yd.t2, z_rec);
  StateSpace q = series(inverse(yd.t2, cfg), series(pi_inv, z_lco));
  q = minimal_realization(q, cfg.minreal_tol);
  if (!is_schur(q.a, cfg).schur)
    throw std::runtime_error("synthesize: recovered Youla parameter is unstable");

  AlgorithmRealization raw = youla_to_algorithm(q, fcs, rho, cfg);

  // Trim unreachable/unobservable states, then re-factor.
  AlgorithmRealization trimmed = raw;
  StateSpace loop_min = minimal_realization(raw.loop(), cfg.minreal_tol);
  analysis::StructureReport rep = analysis::structure_check(loop_min, cfg);
  if (rep.ok) trimmed = rep.value;

  SynthesisOutput out;
  out.raw = kron_expand(raw, fc.d / ds);
  out.algorithm = kron_expand(trimmed, fc.d / ds);
  out.lambda = lambda;
  if (fc.d != ds) {
    out.lambda.block_dim = fc.d;
    for (auto& blk : out.lambda.blocks)
      blk = kron(blk, Matrix::Identity(fc.d / ds, fc.d / ds));
  }
  out.external_theorem_dependent =
      class_tag == MultiplierClass::Full && fc.structured.has_value();

  analysis::CertifyResult post =
      analysis::certify(out.algorithm, fc, rho, ell, class_tag, cfg);
  if (!post.feasible())
    throw std::runtime_error("synthesize: post-certification failed (internal inconsistency)");
  out.certificate = *post.certificate;

  sim::MonteCarloResult mc = sim::monte_carlo_rate(out.algorithm, fc, 20, 400, cfg);
  out.empirical_rate = mc.rho_max;
  if (mc.divergences > 0 || mc.rho_max > rho + 0.02)
    throw std::runtime_error("synthesize: simulation contradicts the certified rate");
  return out;
}

}  // namespace

SynthesisOutput synthesize(const FunctionClass& fc, double rho, int ell,
                           MultiplierClass class_tag, const Config& cfg) {
  if (fc.structured)
    throw std::invalid_argument("synthesize: use synthesize_structured for matrix bounds");
  return synthesize_impl(fc, rho, ell, class_tag, cfg);
}

SynthesisOutput synthesize_structured(const FunctionClass& fc, double rho, int ell,
                                      MultiplierClass class_tag, const Config& cfg) {
  if (!fc.structured)
    throw std::invalid_argument("synthesize_structured: structured pair required");
  return synthesize_impl(fc, rho, ell, class_tag, cfg);
}

RateSearchResult bisect_design_rate(const FunctionClass& fc, int ell,
                                    MultiplierClass class_tag, const Config& cfg) {
  RateSearchResult out;
  auto feasible_at = [&](double rho) {
    if (class_tag == MultiplierClass::Repeated && !fc.structured)
      return pick_feasible(fc, rho, ell, cfg).feasible();
    return synthesis_feasible(fc, rho, ell, class_tag, cfg).feasible();
  };
  double lo = 1e-3, hi = 1.0 - 1e-6;
  if (!feasible_at(hi)) {
    out.reason = "infeasible at the bracket ceiling";
    return out;
  }
  if (feasible_at(lo)) {
    out.ok = true;
    out.rho_star = lo;
    return out;
  }
  while (hi - lo > cfg.tol_bisect) {
    const double mid = 0.5 * (hi + lo);
    if (feasible_at(mid))
      hi = mid;
    else
      lo = mid;
  }
  out.ok = true;
  out.rho_star = hi;
  return out;
}

}  // namespace synthesis
}  // namespace ratesyn

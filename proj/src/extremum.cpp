#include "ratesyn/extremum.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "ratesyn/linalg.hpp"

namespace ratesyn {
namespace extremum {

Matrix ExtremumPlant::stacked_output() const {
  Matrix cg(d + nv, ng());
  cg.topRows(d) = c_g1;
  cg.bottomRows(nv) = c_g2;
  return cg;
}

ExtremumPlant ExtremumPlant::from_systems(const StateSpace& g1,
                                          const std::optional<StateSpace>& g2) {
  ExtremumPlant ep;
  ep.d = g1.outputs();
  ep.nu = g1.inputs();
  if (g2) {
    if (g2->inputs() != ep.nu)
      throw std::invalid_argument("ExtremumPlant: shared input dimension mismatch");
    if (g2->d.size() > 0 && g2->d.cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("ExtremumPlant: auxiliary output must have no feedthrough");
    ep.nv = g2->outputs();
  }
  const int n1 = g1.states();
  const int n2 = g2 ? g2->states() : 0;
  ep.a_g = Matrix::Zero(n1 + n2, n1 + n2);
  ep.a_g.topLeftCorner(n1, n1) = g1.a;
  if (g2) ep.a_g.bottomRightCorner(n2, n2) = g2->a;
  ep.b_g = Matrix::Zero(n1 + n2, ep.nu);
  ep.b_g.topRows(n1) = g1.b;
  if (g2) ep.b_g.bottomRows(n2) = g2->b;
  ep.c_g1 = Matrix::Zero(ep.d, n1 + n2);
  ep.c_g1.leftCols(n1) = g1.c;
  ep.d_g1 = g1.d;
  ep.c_g2 = Matrix::Zero(ep.nv, n1 + n2);
  if (g2) ep.c_g2.rightCols(n2) = g2->c;
  return ep;
}

GeneralizedPlant build_generalized_plant(const ExtremumPlant& ep) {
  // Reduce to the observable part of the given dynamics first.
  ExtremumPlant red = ep;
  Config cfg;
  if (!hautus(ep.a_g, ep.stacked_output(), HautusMode::Detectable, 1.0, cfg)) {
    StateSpace joint(ep.a_g, ep.b_g, ep.stacked_output(),
                     Matrix::Zero(ep.d + ep.nv, ep.nu));
    StateSpace obs = observable_part(joint, cfg.rank_rtol);
    red.a_g = obs.a;
    red.b_g = obs.b;
    red.c_g1 = obs.c.topRows(ep.d);
    red.c_g2 = obs.c.bottomRows(ep.nv);
  }

  const int d = red.d, ng = red.ng(), nv = red.nv;
  GeneralizedPlant gp;
  gp.a = Matrix::Zero(d + ng, d + ng);
  gp.a.topLeftCorner(d, d) = Matrix::Identity(d, d);
  gp.a.bottomRightCorner(ng, ng) = red.a_g;
  gp.b1 = Matrix::Zero(d + ng, d);
  gp.b1.topRows(d) = Matrix::Identity(d, d);
  gp.b = Matrix::Zero(d + ng, red.nu);
  gp.b.bottomRows(ng) = red.b_g;
  gp.c1 = Matrix::Zero(d, d + ng);
  gp.c1.rightCols(ng) = red.c_g1;
  gp.d1 = Matrix::Zero(d, d);
  gp.e = red.d_g1;
  gp.c = Matrix::Zero(d + nv, d + ng);
  gp.c.topLeftCorner(d, d) = Matrix::Identity(d, d);
  gp.c.bottomRightCorner(nv, ng) = red.c_g2;
  gp.f = Matrix::Zero(d + nv, d);
  return gp;
}

GeneralizedPlant build_output_opt_plant(const StateSpace& g) {
  const int d = g.inputs();
  if (g.outputs() != d)
    throw std::invalid_argument("build_output_opt_plant: square plant required");
  const int ng = g.states();
  GeneralizedPlant gp;
  gp.a = Matrix::Zero(ng + d, ng + d);
  gp.a.topLeftCorner(ng, ng) = g.a;
  gp.a.bottomLeftCorner(d, ng) = g.c;
  gp.a.bottomRightCorner(d, d) = Matrix::Identity(d, d);
  gp.b1 = Matrix::Zero(ng + d, d);
  gp.b1.topRows(ng) = g.b;
  gp.b1.bottomRows(d) = g.d;
  gp.b = Matrix::Zero(ng + d, d);
  gp.c1 = Matrix::Zero(d, ng + d);
  gp.d1 = Matrix::Zero(d, d);
  gp.e = Matrix::Identity(d, d);
  gp.c = Matrix::Zero(d, ng + d);
  gp.c.rightCols(d) = Matrix::Identity(d, d);
  gp.f = Matrix::Zero(d, d);
  return gp;
}

GeneralizedPlant weighted_plant(const GeneralizedPlant& gp, const FunctionClass& fc,
                                double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("weighted_plant: rho in (0,1)");
  if (gp.d1.cwiseAbs().maxCoeff() > 0.0 || gp.f.cwiseAbs().maxCoeff() > 0.0)
    throw std::invalid_argument("weighted_plant: plant must have D1 = 0, F = 0");
  const Matrix mf = fc.structured ? fc.lower_matrix() : fc.m * Matrix::Identity(gp.nz(), gp.nz());
  const Matrix gap = fc.structured
                         ? Matrix(fc.upper_matrix() - fc.lower_matrix())
                         : Matrix((fc.L - fc.m) * Matrix::Identity(gp.nz(), gp.nz()));
  GeneralizedPlant wp;
  wp.a = (gp.a + gp.b1 * mf * gp.c1) / rho;
  wp.b1 = gp.b1 / rho;
  wp.b = (gp.b + gp.b1 * mf * gp.e) / rho;
  wp.c1 = gap * gp.c1;
  wp.d1 = -Matrix::Identity(gp.nz(), gp.nz());
  wp.e = gap * gp.e;
  wp.c = gp.c;
  wp.f = Matrix::Zero(gp.ny(), gp.nz());
  return wp;
}

StabilizabilityReport stabilizability_check(const ExtremumPlant& ep, double rho,
                                            const Config& cfg) {
  StabilizabilityReport rep;
  if (!hautus(ep.a_g, ep.b_g, HautusMode::Stabilizable, rho, cfg)) {
    rep.reason = "uncontrollable mode of the dynamics with |lambda| >= rho";
    return rep;
  }
  if (!hautus(ep.a_g, ep.stacked_output(), HautusMode::Detectable, rho, cfg)) {
    rep.reason = "unobservable mode of the dynamics with |lambda| >= rho";
    return rep;
  }
  const int ng = ep.ng();
  Matrix test(ng + ep.d, ng + ep.nu);
  test.topLeftCorner(ng, ng) = ep.a_g - Matrix::Identity(ng, ng);
  test.topRightCorner(ng, ep.nu) = ep.b_g;
  test.bottomLeftCorner(ep.d, ng) = ep.c_g1;
  test.bottomRightCorner(ep.d, ep.nu) = ep.d_g1;
  Eigen::JacobiSVD<Matrix> svd(test);
  const auto& sv = svd.singularValues();
  const double tol = sv.size() ? std::max(sv(0) * cfg.rank_rtol, 1e-300) : 0.0;
  int rank = 0;
  for (int k = 0; k < sv.size(); ++k)
    if (sv(k) > tol) ++rank;
  if (rank < ng + ep.d) {
    rep.reason = "steady-state matrix [A-I B; C1 D1] is row-rank deficient "
                 "(invariant zero at one)";
    return rep;
  }
  rep.ok = true;
  return rep;
}

YoulaBlocks youla_factorization(const GeneralizedPlant& wp, const Config& cfg) {
  if (!hautus(wp.a, wp.b, HautusMode::Stabilizable, 1.0, cfg))
    throw std::invalid_argument("youla_factorization: weighted plant not stabilizable");
  if (!hautus(wp.a, wp.c, HautusMode::Detectable, 1.0, cfg))
    throw std::invalid_argument("youla_factorization: weighted plant not detectable");

  YoulaBlocks yb;
  yb.feedback = stabilizing_feedback(wp.a, wp.b);
  yb.injection = stabilizing_injection(wp.a, wp.c);

  const Matrix af = wp.a + wp.b * yb.feedback;   // A~ + B~ M~
  const Matrix al = wp.a + yb.injection * wp.c;  // A~ + L~ C~
  const Matrix cf = wp.c1 + wp.e * yb.feedback;  // C~1 + E~ M~
  const int n = wp.nx();

  Matrix a1(2 * n, 2 * n), b1(2 * n, wp.nw()), c1(wp.nz(), 2 * n);
  a1 << af, -wp.b * yb.feedback, Matrix::Zero(n, n), al;
  b1 << wp.b1, wp.b1 + yb.injection * wp.f;
  c1 << cf, -wp.e * yb.feedback;
  yb.t1 = StateSpace(a1, b1, c1, wp.d1);
  yb.t2 = StateSpace(af, wp.b, cf, wp.e);
  yb.t3 = StateSpace(al, wp.b1 + yb.injection * wp.f, wp.c, wp.f);

  for (const auto* t : {&yb.t1, &yb.t2, &yb.t3})
    if (!is_schur(t->a, cfg).schur)
      throw std::runtime_error("youla_factorization: factor block is not Schur");
  return yb;
}

StructuredPlant structured_plant(const YoulaBlocks& yb, int ell, int d) {
  if (yb.t1.outputs() != d)
    throw std::invalid_argument("structured_plant: dimension mismatch");
  MultiplierFilter skel = fir_skeleton(ell, d);
  const int nf = ell * d;
  const int n_t1 = yb.t1.states();
  const int n_t3 = yb.t3.states();

  StructuredPlant sp;
  sp.nf = nf;
  sp.d = d;
  sp.t1_c = yb.t1.c;
  sp.t1_d = yb.t1.d;

  const int n1 = nf + n_t1 + n_t3;
  sp.a1 = Matrix::Zero(n1, n1);
  sp.a1.topLeftCorner(nf, nf) = skel.a_f;
  sp.a1.block(0, nf, nf, n_t1) = skel.b_f * yb.t1.c;
  sp.a1.block(nf, nf, n_t1, n_t1) = yb.t1.a;
  sp.a1.bottomRightCorner(n_t3, n_t3) = yb.t3.a;
  sp.a2 = yb.t2.a;

  sp.b11 = Matrix::Zero(n1, yb.t1.inputs());
  sp.b11.topRows(nf) = skel.b_f * yb.t1.d;
  sp.b11.middleRows(nf, n_t1) = yb.t1.b;
  sp.b11.bottomRows(n_t3) = yb.t3.b;
  sp.b22 = yb.t2.b;

  sp.c12 = yb.t2.c;
  sp.c21 = Matrix::Zero(yb.t3.outputs(), n1);
  sp.c21.rightCols(n_t3) = yb.t3.c;
  sp.e = yb.t2.d;
  sp.f = yb.t3.d;
  return sp;
}

AffineExpr StructuredPlant::c11_expr(const lmi::LmiProblem::ZfHandles& h) const {
  const int n_t1 = static_cast<int>(t1_c.cols());
  const int n_t3 = n1() - nf - n_t1;
  return AffineExpr::block(
      {{h.c_f, h.d_f.right_mul(t1_c), AffineExpr::zero(d, n_t3)}});
}

AffineExpr StructuredPlant::d1_expr(const lmi::LmiProblem::ZfHandles& h) const {
  return h.d_f.right_mul(t1_d);
}

ExtremumSynthesisResult extremum_synthesis_plant(const GeneralizedPlant& wp,
                                                 const FunctionClass& fc, double rho,
                                                 int ell, const Config& cfg,
                                                 MultiplierClass class_tag) {
  (void)fc;
  ExtremumSynthesisResult res;
  res.external_theorem_dependent = class_tag == MultiplierClass::Full;
  if (!hautus(wp.a, wp.b, HautusMode::Stabilizable, 1.0, cfg) ||
      !hautus(wp.a, wp.c, HautusMode::Detectable, 1.0, cfg)) {
    res.status = lmi::SdpSolution::Status::Infeasible;
    res.reason = "weighted plant is not stabilizable/detectable";
    return res;
  }
  YoulaBlocks yb = youla_factorization(wp, cfg);
  const int d = wp.nz();
  StructuredPlant sp = structured_plant(yb, ell, d);
  const int n1 = sp.n1(), n2 = sp.n2();
  const int n = n1 + n2;

  lmi::LmiProblem problem;
  AffineExpr x = problem.add_symmetric("X", n);
  AffineExpr w = problem.add_symmetric("W", n);

  lmi::ZfVarDesc zf;
  zf.class_tag = class_tag;
  zf.ell = ell;
  zf.d = d;
  zf.rho = rho;
  auto handles = problem.add_zames_falb("Lambda", zf);

  // Sub-blocks of W in the (n1, n2) partition.
  Matrix sel1 = Matrix::Zero(n, n1), sel2 = Matrix::Zero(n, n2);
  sel1.topRows(n1) = Matrix::Identity(n1, n1);
  sel2.bottomRows(n2) = Matrix::Identity(n2, n2);
  AffineExpr w11 = w.congruence(sel1);
  AffineExpr w22 = w.congruence(sel2);
  AffineExpr w12 = w.left_mul(sel1.transpose()).right_mul(sel2);
  AffineExpr w21t = w12.transpose();  // W12^T

  // Bold variables of the convexification, all affine in (W, Lambda).
  AffineExpr bold_w1 = AffineExpr::block(
      {{w11, w12}, {AffineExpr::zero(n2, n1), AffineExpr(Matrix::Identity(n2, n2))}});
  AffineExpr bold_y = AffineExpr::block(
      {{w11, AffineExpr::zero(n1, n2)}, {AffineExpr::zero(n2, n1), w22}});
  AffineExpr bold_a = AffineExpr::block(
      {{w11.right_mul(sp.a1), AffineExpr::zero(n1, n2)},
       {w21t.right_mul(sp.a1) - w21t.left_mul(sp.a2), w22.left_mul(sp.a2)}});
  AffineExpr bold_b1 = AffineExpr::block(
      {{w11.right_mul(sp.b11)}, {w21t.right_mul(sp.b11)}});
  AffineExpr c11 = sp.c11_expr(handles);
  AffineExpr bold_c1 =
      AffineExpr::block({{c11 - w21t.left_mul(sp.c12), w22.left_mul(sp.c12)}});
  AffineExpr bold_d1 = sp.d1_expr(handles);

  // Coupling condition.
  AffineExpr coupling = AffineExpr::block({{x, bold_w1}, {bold_w1.transpose(), bold_y}});
  problem.add_constraint(coupling, lmi::Sense::PositiveDefinite, "[X W1; W1' Y] > 0");

  // X-side inequality on ker [C F].
  Matrix a_full = Matrix::Zero(n, n);
  a_full.topLeftCorner(n1, n1) = sp.a1;
  a_full.bottomRightCorner(n2, n2) = sp.a2;
  Matrix b1_full(n, sp.b11.cols());
  b1_full << sp.b11, Matrix::Zero(n2, sp.b11.cols());
  AffineExpr c1_full = AffineExpr::block({{c11, AffineExpr(sp.c12)}});
  Matrix cf(sp.c21.rows(), n + d);
  cf << sp.c21, Matrix::Zero(sp.c21.rows(), n2), sp.f;
  Matrix u_basis = kernel_basis(cf);
  AffineExpr x_lmi =
      lmi::kyp_constraint(a_full, b1_full, c1_full, bold_d1, lmi::PBlocks::snr(d), x)
          .congruence(u_basis);
  problem.add_constraint(x_lmi, lmi::Sense::NegativeDefinite, "X-side design LMI");

  // Y-side inequality with the inverse removed by a Schur complement.
  Matrix bet(sp.b22.cols(), n2 + d);
  bet << sp.b22.transpose(), sp.e.transpose();
  Matrix v12 = kernel_basis(bet);
  Matrix v_basis = Matrix::Zero(n + d, n1 + v12.cols());
  v_basis.topLeftCorner(n1, n1) = Matrix::Identity(n1, n1);
  v_basis.block(n1, n1, n2 + d, v12.cols()) = v12;

  Matrix vx = v_basis.topRows(n);     // state rows of V
  Matrix vz = v_basis.bottomRows(d);  // output rows of V
  AffineExpr r2 = (bold_a.transpose().right_mul(vx) + bold_c1.transpose().right_mul(vz))
                      .scaled(-1.0);
  AffineExpr r4 = (bold_b1.transpose().right_mul(vx) + bold_d1.transpose().right_mul(vz))
                      .scaled(-1.0);
  AffineExpr phi = bold_y.congruence(vx) + r4.left_mul(vz.transpose()).sym();
  AffineExpr y_lmi = AffineExpr::block({{phi, r2.transpose()}, {r2, bold_y}});
  problem.add_constraint(y_lmi, lmi::Sense::PositiveDefinite, "Y-side design LMI");

  lmi::SdpSolution sol = lmi::solve(problem, cfg);
  res.status = sol.status;
  res.margin = sol.margin;
  if (res.reason.empty()) res.reason = sol.diagnostics;
  if (sol.status == lmi::SdpSolution::Status::Feasible)
    res.lambda = sol.zf_value("Lambda", problem);
  return res;
}

ExtremumSynthesisResult extremum_synthesis(const ExtremumPlant& ep, const FunctionClass& fc,
                                           double rho, int ell, const Config& cfg,
                                           MultiplierClass class_tag) {
  ExtremumSynthesisResult res;
  if (!(rho > 0.0 && rho < 1.0)) {
    res.status = lmi::SdpSolution::Status::Infeasible;
    res.reason = "rho outside (0,1)";
    return res;
  }
  StabilizabilityReport stab = stabilizability_check(ep, rho, cfg);
  if (!stab.ok) {
    res.status = lmi::SdpSolution::Status::Infeasible;
    res.reason = stab.reason;
    return res;
  }
  GeneralizedPlant gp = build_generalized_plant(ep);
  GeneralizedPlant wp = weighted_plant(gp, fc, rho);
  return extremum_synthesis_plant(wp, fc, rho, ell, cfg, class_tag);
}

namespace {

// Solve the projected synthesis inequalities for (X, Y) on a fixed plant.
std::pair<Matrix, Matrix> solve_xy(const GeneralizedPlant& plant, const Config& cfg) {
  const int n = plant.nx();
  const int d = plant.nz();
  lmi::LmiProblem problem;
  AffineExpr x = problem.add_symmetric("X", n);
  AffineExpr y = problem.add_symmetric("Y", n);

  Matrix id = Matrix::Identity(n, n);
  AffineExpr coupling = AffineExpr::block({{x, AffineExpr(id)}, {AffineExpr(id), y}});
  problem.add_constraint(coupling, lmi::Sense::PositiveDefinite, "[X I; I Y] > 0");

  Matrix cf(plant.ny(), n + d);
  cf << plant.c, plant.f;
  Matrix u_basis = kernel_basis(cf);
  AffineExpr x_lmi = lmi::kyp_constraint(plant.a, plant.b1, AffineExpr(plant.c1),
                                         AffineExpr(plant.d1), lmi::PBlocks::snr(d), x)
                         .congruence(u_basis);
  problem.add_constraint(x_lmi, lmi::Sense::NegativeDefinite, "X projection");

  Matrix bet(plant.nu(), n + d);
  bet << plant.b.transpose(), plant.e.transpose();
  Matrix v_basis = kernel_basis(bet);
  Matrix vx = v_basis.topRows(n);
  Matrix vz = v_basis.bottomRows(d);
  Matrix r2 = -(plant.a.transpose() * vx + plant.c1.transpose() * vz);
  Matrix r4 = -(plant.b1.transpose() * vx + plant.d1.transpose() * vz);
  AffineExpr y_lmi = y.congruence(vx) - y.congruence(r2) +
                     AffineExpr(vz.transpose() * r4 + r4.transpose() * vz);
  problem.add_constraint(y_lmi, lmi::Sense::PositiveDefinite, "Y projection");

  lmi::SdpSolution sol = lmi::solve(problem, cfg);
  if (sol.status != lmi::SdpSolution::Status::Feasible)
    throw std::runtime_error("extremum controller: projected inequalities infeasible");
  return {sol.matrix_value("X", problem), sol.matrix_value("Y", problem)};
}

}  // namespace

ExtremumController assemble_extremum_controller(const ExtremumPlant& ep,
                                                const FunctionClass& fc, double rho,
                                                int ell, const ZamesFalbParams& lambda,
                                                const Config& cfg) {
  GeneralizedPlant gp = build_generalized_plant(ep);
  GeneralizedPlant wp = weighted_plant(gp, fc, rho);
  const int d = wp.nz();

  // Multiplier-weighted generalized plant.
  MultiplierFilter filt = build_fir(lambda);
  const int nf = static_cast<int>(filt.a_f.rows());
  const int nt = wp.nx();
  GeneralizedPlant wg;
  wg.a = Matrix::Zero(nf + nt, nf + nt);
  wg.a.topLeftCorner(nf, nf) = filt.a_f;
  wg.a.topRightCorner(nf, nt) = filt.b_f * wp.c1;
  wg.a.bottomRightCorner(nt, nt) = wp.a;
  wg.b1 = Matrix::Zero(nf + nt, wp.nw());
  wg.b1.topRows(nf) = filt.b_f * wp.d1;
  wg.b1.bottomRows(nt) = wp.b1;
  wg.b = Matrix::Zero(nf + nt, wp.nu());
  wg.b.topRows(nf) = filt.b_f * wp.e;
  wg.b.bottomRows(nt) = wp.b;
  wg.c1 = Matrix::Zero(d, nf + nt);
  wg.c1.leftCols(nf) = filt.c_f;
  wg.c1.rightCols(nt) = filt.d_f * wp.c1;
  wg.d1 = filt.d_f * wp.d1;
  wg.e = filt.d_f * wp.e;
  wg.c = Matrix::Zero(wp.ny(), nf + nt);
  wg.c.rightCols(nt) = wp.c;
  wg.f = wp.f;

  auto [x, y] = solve_xy(wg, cfg);
  StateSpace kw = synthesis::reconstruct_controller(wg, x, y, cfg);

  // De-weight the state blocks and attach the integrator on the gradient
  // channel so the controller feedthrough from w vanishes.
  StateSpace kbar(rho * kw.a, rho * kw.b, kw.c, kw.d);
  const int nv = ep.nv;
  Matrix ha = Matrix::Identity(d, d);
  Matrix hb(d, d + nv);
  hb << Matrix::Identity(d, d), Matrix::Zero(d, nv);
  Matrix hc(d + nv, d);
  hc << Matrix::Identity(d, d), Matrix::Zero(nv, d);
  Matrix hd = Matrix::Zero(d + nv, d + nv);
  hd.bottomRightCorner(nv, nv) = Matrix::Identity(nv, nv);
  StateSpace h_aug(ha, hb, hc, hd);

  ExtremumController k;
  k.joint = series(kbar, h_aug);
  k.k1 = StateSpace(k.joint.a, k.joint.b.leftCols(d), k.joint.c, k.joint.d.leftCols(d));
  k.k2 = StateSpace(k.joint.a, k.joint.b.rightCols(nv), k.joint.c, k.joint.d.rightCols(nv));

  // Re-certify the assembled loop.
  StateSpace loop = closed_loop(ep, k);
  analysis::StructureReport rep = analysis::structure_check(loop, cfg);
  if (!rep.ok)
    throw std::runtime_error("assemble_extremum_controller: loop lost the integrator: " +
                             rep.reason);
  FunctionClass fc_loop = fc;
  fc_loop.d = d;
  analysis::CertifyResult cert =
      analysis::certify(rep.value, fc_loop, rho, ell, lambda.class_tag, cfg);
  if (!cert.feasible())
    throw std::runtime_error("assemble_extremum_controller: re-certification failed");
  return k;
}

StateSpace closed_loop(const ExtremumPlant& ep, const ExtremumController& k) {
  const int d = ep.d;
  const Matrix dk1 = k.joint.d.leftCols(d);
  if (dk1.cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("closed_loop: gradient-channel feedthrough must vanish");
  const int ng = ep.ng();
  const int nk = k.joint.states();
  const Matrix bk1 = k.joint.b.leftCols(d);
  const Matrix bk2 = k.joint.b.rightCols(ep.nv);
  const Matrix dk2 = k.joint.d.rightCols(ep.nv);

  StateSpace cl;
  cl.a = Matrix::Zero(ng + nk, ng + nk);
  cl.a.topLeftCorner(ng, ng) = ep.a_g + ep.b_g * dk2 * ep.c_g2;
  cl.a.topRightCorner(ng, nk) = ep.b_g * k.joint.c;
  cl.a.bottomLeftCorner(nk, ng) = bk2 * ep.c_g2;
  cl.a.bottomRightCorner(nk, nk) = k.joint.a;
  cl.b = Matrix::Zero(ng + nk, d);
  cl.b.bottomRows(nk) = bk1;
  cl.c = Matrix::Zero(d, ng + nk);
  cl.c.leftCols(ng) = ep.c_g1 + ep.d_g1 * dk2 * ep.c_g2;
  cl.c.rightCols(nk) = ep.d_g1 * k.joint.c;
  cl.d = Matrix::Zero(d, d);
  return cl;
}

StateSpace tf_realization(const std::vector<double>& num, const std::vector<double>& den) {
  if (den.empty() || den[0] == 0.0)
    throw std::invalid_argument("tf_realization: denominator must have nonzero lead");
  if (num.size() > den.size())
    throw std::invalid_argument("tf_realization: improper transfer function");
  const int n = static_cast<int>(den.size()) - 1;
  std::vector<double> a(n), b(den.size(), 0.0);
  for (int i = 0; i < n; ++i) a[i] = den[i + 1] / den[0];
  const int pad = static_cast<int>(den.size() - num.size());
  for (size_t i = 0; i < num.size(); ++i) b[pad + i] = num[i] / den[0];
  const double d0 = b[0];

  if (n == 0) return StateSpace::gain(Matrix::Constant(1, 1, d0));
  Matrix am = Matrix::Zero(n, n), bm = Matrix::Zero(n, 1), cm = Matrix::Zero(1, n);
  for (int i = 0; i < n; ++i) am(0, i) = -a[i];
  am.bottomLeftCorner(n - 1, n - 1) = Matrix::Identity(n - 1, n - 1);
  bm(0, 0) = 1.0;
  for (int i = 0; i < n; ++i) cm(0, i) = b[i + 1] - d0 * a[i];
  return StateSpace(am, bm, cm, Matrix::Constant(1, 1, d0));
}

StateSpace mimo_from_grid(const std::vector<std::vector<StateSpace>>& grid) {
  // Sum over inputs of the column systems, each mapping input j to all rows.
  const int rows = static_cast<int>(grid.size());
  const int cols = static_cast<int>(grid[0].size());
  StateSpace result;
  bool first = true;
  for (int j = 0; j < cols; ++j) {
    StateSpace column = grid[0][j];
    for (int i = 1; i < rows; ++i) column = stack_outputs(column, grid[i][j]);
    // Embed input j into the full input vector.
    Matrix embed = Matrix::Zero(1, cols);
    embed(0, j) = 1.0;
    StateSpace padded = series(column, StateSpace::gain(embed));
    result = first ? padded : parallel(result, padded);
    first = false;
  }
  return result;
}

ExtremumPlant example_pole_family(double p) {
  // (z - 0.5) / ((z + p)(z + 0.5))
  StateSpace g1 = tf_realization({1.0, -0.5}, {1.0, p + 0.5, 0.5 * p});
  return ExtremumPlant::from_systems(g1);
}

ExtremumPlant example_delay(int nu) {
  if (nu < 0) throw std::invalid_argument("example_delay: nu >= 0");
  if (nu == 0)
    return ExtremumPlant::from_systems(StateSpace::scaled_identity(1, 1.0));
  Matrix a = Matrix::Zero(nu, nu);
  a.bottomLeftCorner(nu - 1, nu - 1) = Matrix::Identity(nu - 1, nu - 1);
  Matrix b = Matrix::Zero(nu, 1);
  b(0, 0) = 1.0;
  Matrix c = Matrix::Zero(1, nu);
  c(0, nu - 1) = 1.0;
  return ExtremumPlant::from_systems(StateSpace(a, b, c, Matrix::Zero(1, 1)));
}

StateSpace example_mimo_sex3() {
  StateSpace one = StateSpace::scaled_identity(1, 1.0);
  StateSpace g12 = tf_realization({1.0, -0.2}, {1.0, 1.2});
  StateSpace g21 = tf_realization({1.0, -1.2}, {1.0, 0.5});
  return mimo_from_grid({{one, g12}, {g21, one}});
}

SweepRow bisect_extremum_rate(const std::string& example, double param,
                              const FunctionClass& fc, int ell, const Config& cfg,
                              MultiplierClass class_tag, const BisectEcOptions& opts) {
  SweepRow row;
  row.example = example;
  row.param = param;
  row.kappa = fc.kappa();
  row.ell = ell;
  if (example != "delay" && example != "pole_family" && example != "mimo_sex3") {
    row.status = "error: unknown example: " + example;
    return row;
  }

  auto cell = [&](double rho) -> ExtremumSynthesisResult {
    if (example == "mimo_sex3") {
      FunctionClass fc2 = fc;
      fc2.d = 2;
      GeneralizedPlant wp = weighted_plant(build_output_opt_plant(example_mimo_sex3()), fc2, rho);
      return extremum_synthesis_plant(wp, fc2, rho, ell, cfg, class_tag);
    }
    ExtremumPlant ep;
    if (example == "delay")
      ep = example_delay(static_cast<int>(param));
    else if (example == "pole_family")
      ep = example_pole_family(param);
    else
      throw std::invalid_argument("unknown example: " + example);
    return extremum_synthesis(ep, fc, rho, ell, cfg, class_tag);
  };

  try {
    double lo = opts.lower, hi = opts.upper;
    double margin = 0.0;
    bool any_feasible = false;
    std::string probe_note;
    auto feasible_at = [&](double rho) {
      if (rho >= 1.0) return true;  // saturation sentinel above one
      // Probes at extreme rates can defeat the Riccati designs numerically;
      // treat those conservatively as infeasible (the result stays an upper
      // bound on the achievable rate).
      try {
        ExtremumSynthesisResult r = cell(rho);
        if (r.feasible()) {
          margin = r.margin;
          any_feasible = true;
        }
        return r.feasible();
      } catch (const std::exception& e) {
        probe_note = e.what();
        return false;
      }
    };
    if (feasible_at(lo)) {
      row.rho_star = lo;
      row.status = "ok";
      row.margin = margin;
      return row;
    }
    const double tol = std::max(cfg.tol_bisect, 1e-3);
    while (hi - lo > tol) {
      const double mid = 0.5 * (hi + lo);
      if (feasible_at(mid))
        hi = mid;
      else
        lo = mid;
    }
    row.rho_star = hi;
    row.margin = margin;
    row.status = (hi >= 1.0 || !any_feasible) ? "no_certificate_leq_1" : "ok";
    if (!any_feasible && !probe_note.empty()) row.status += " (" + probe_note + ")";
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
  }
  return row;
}

std::vector<SweepRow> example_harness(const std::string& example,
                                      const std::vector<double>& params,
                                      const std::vector<double>& kappas,
                                      const std::vector<int>& ells, const Config& cfg,
                                      MultiplierClass class_tag) {
  std::vector<SweepRow> rows;
  for (double param : params)
    for (double kappa : kappas)
      for (int ell : ells) {
        FunctionClass fc;
        fc.m = 1.0;
        fc.L = kappa;
        fc.d = 1;
        rows.push_back(bisect_extremum_rate(example, param, fc, ell, cfg, class_tag));
      }
  return rows;
}

}  // namespace extremum
}  // namespace ratesyn

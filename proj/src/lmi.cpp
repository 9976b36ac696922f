#include "ratesyn/lmi.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

#include "ratesyn/linalg.hpp"

namespace ratesyn {
namespace lmi {

int DecisionVar::dim() const {
  switch (kind) {
    case VarKind::Symmetric:
      return symmetric_dim(n);
    case VarKind::General:
      return rows * cols;
    case VarKind::ZamesFalb:
      return free_parameter_count(zf.class_tag, zf.ell, zf.d);
  }
  return 0;
}

AffineExpr LmiProblem::add_symmetric(const std::string& name, int n) {
  DecisionVar v;
  v.name = name;
  v.kind = VarKind::Symmetric;
  v.n = n;
  vars.push_back(v);
  return AffineExpr::from_var(name, Matrix::Zero(n, n), symmetric_images(n));
}

AffineExpr LmiProblem::add_general(const std::string& name, int rows, int cols) {
  DecisionVar v;
  v.name = name;
  v.kind = VarKind::General;
  v.rows = rows;
  v.cols = cols;
  vars.push_back(v);
  return AffineExpr::from_var(name, Matrix::Zero(rows, cols), general_images(rows, cols));
}

LmiProblem::ZfHandles LmiProblem::add_zames_falb(const std::string& name,
                                                 const ZfVarDesc& desc) {
  DecisionVar v;
  v.name = name;
  v.kind = VarKind::ZamesFalb;
  v.zf = desc;
  if (v.zf.transform.size() == 0) v.zf.transform = Matrix::Identity(desc.d, desc.d);
  vars.push_back(v);

  const int ell = desc.ell;
  const int d = desc.d;
  const int p = free_parameter_count(desc.class_tag, ell, d);
  const Matrix& t = vars.back().zf.transform;

  // Images of the transformed filter rows C_f(T Lambda T^T), D_f(T Lambda T^T)
  // per free coordinate.
  std::vector<Matrix> cf_images(p, Matrix::Zero(d, ell * d));
  std::vector<Matrix> df_images(p, Matrix::Zero(d, d));
  for (int k = 0; k < p; ++k) {
    Vector theta = Vector::Zero(p);
    theta(k) = 1.0;
    auto blocks = blocks_from_parameters(desc.class_tag, ell, d, theta);
    for (auto& blk : blocks) blk = t * blk * t.transpose();
    for (int j = 0; j < ell; ++j) cf_images[k].middleCols(j * d, d) = blocks[ell - j];
    df_images[k] = blocks[0];
  }
  ZfHandles h;
  h.c_f = AffineExpr::from_var(name, Matrix::Zero(d, ell * d), std::move(cf_images));
  h.d_f = AffineExpr::from_var(name, Matrix::Zero(d, d), std::move(df_images));

  if (desc.add_membership) {
    for (const auto& ineq : constraint_generators(desc.class_tag, ell, d, desc.rho)) {
      std::vector<Matrix> images(p);
      for (int k = 0; k < p; ++k) images[k] = Matrix::Constant(1, 1, ineq.coeffs(k));
      add_elementwise(AffineExpr::from_var(name, Matrix::Constant(1, 1, ineq.constant),
                                           std::move(images)),
                      name + ": " + ineq.label);
    }
  }
  return h;
}

void LmiProblem::add_constraint(AffineExpr expr, Sense sense, std::string label,
                                bool with_margin) {
  if (expr.rows() != expr.cols())
    throw std::invalid_argument("add_constraint: expression must be square");
  constraints.push_back({std::move(expr), sense, std::move(label), with_margin});
}

void LmiProblem::add_elementwise(AffineExpr expr, std::string label) {
  elementwise.push_back({std::move(expr), std::move(label)});
}

const DecisionVar& LmiProblem::find(const std::string& name) const {
  for (const auto& v : vars)
    if (v.name == name) return v;
  throw std::invalid_argument("LmiProblem: unknown variable " + name);
}

int LmiProblem::total_coords() const {
  int p = 0;
  for (const auto& v : vars) p += v.dim();
  return p;
}

namespace {

std::map<std::string, int> coordinate_offsets(const LmiProblem& problem) {
  std::map<std::string, int> offsets;
  int off = 0;
  for (const auto& v : problem.vars) {
    if (offsets.count(v.name))
      throw std::invalid_argument("LmiProblem: duplicate variable " + v.name);
    offsets[v.name] = off;
    off += v.dim();
  }
  return offsets;
}

void check_declared(const LmiProblem& problem, const AffineExpr& expr) {
  for (const auto& [name, images] : expr.coefficients()) {
    const auto& v = problem.find(name);
    if (static_cast<int>(images.size()) != v.dim())
      throw std::invalid_argument("LmiProblem: coordinate mismatch for " + name);
  }
}

}  // namespace

ConeProblem LmiProblem::assemble(const Config& cfg) const {
  if (constraints.empty())
    throw std::invalid_argument("LmiProblem: at least one constraint required");
  auto offsets = coordinate_offsets(*this);
  const int p0 = total_coords();
  const bool margin_mode = objective == ObjectiveKind::FeasibilityMargin;
  const int p = p0 + (margin_mode ? 1 : 0);

  ConeProblem cone;
  cone.num_vars = p;

  for (const auto& con : constraints) {
    check_declared(*this, con.expr);
    const double sign = con.sense == Sense::PositiveDefinite ? 1.0 : -1.0;
    ConeBlock blk;
    blk.f0 = sign * con.expr.constant_term();
    blk.fk.assign(p, Matrix::Zero(blk.f0.rows(), blk.f0.cols()));
    for (const auto& [name, images] : con.expr.coefficients()) {
      const int off = offsets.at(name);
      for (size_t k = 0; k < images.size(); ++k) blk.fk[off + k] = sign * images[k];
    }
    if (margin_mode && con.with_margin)
      blk.fk[p0] = -Matrix::Identity(blk.f0.rows(), blk.f0.cols());
    cone.psd.push_back(std::move(blk));
  }

  // Elementwise inequalities, variable box, margin bounds.
  int rows = 0;
  for (const auto& e : elementwise) rows += e.expr.rows() * e.expr.cols();
  rows += 2 * p0;
  if (margin_mode) rows += 2;
  cone.lp_coeffs = Matrix::Zero(rows, p);
  cone.lp_const = Vector::Zero(rows);
  int r = 0;
  for (const auto& e : elementwise) {
    check_declared(*this, e.expr);
    const Matrix& c0 = e.expr.constant_term();
    for (int i = 0; i < c0.rows(); ++i)
      for (int j = 0; j < c0.cols(); ++j) {
        cone.lp_const(r) = c0(i, j);
        for (const auto& [name, images] : e.expr.coefficients()) {
          const int off = offsets.at(name);
          for (size_t k = 0; k < images.size(); ++k)
            cone.lp_coeffs(r, off + k) = images[k](i, j);
        }
        ++r;
      }
  }
  for (int k = 0; k < p0; ++k) {
    cone.lp_const(r) = cfg.var_bound;
    cone.lp_coeffs(r, k) = -1.0;
    ++r;
    cone.lp_const(r) = cfg.var_bound;
    cone.lp_coeffs(r, k) = 1.0;
    ++r;
  }
  if (margin_mode) {
    cone.lp_const(r) = cfg.margin_cap;
    cone.lp_coeffs(r, p0) = -1.0;
    ++r;
    cone.lp_const(r) = cfg.var_bound;
    cone.lp_coeffs(r, p0) = 1.0;
    ++r;
  }

  cone.objective = Vector::Zero(p);
  if (margin_mode) {
    cone.objective(p0) = 1.0;
  } else {
    const double sign = objective == ObjectiveKind::Maximize ? 1.0 : -1.0;
    for (const auto& [name, coeffs] : objective_coeffs) {
      const int off = offsets.at(name);
      cone.objective.segment(off, coeffs.size()) = sign * coeffs;
    }
  }
  return cone;
}

Matrix SdpSolution::matrix_value(const std::string& name, const LmiProblem& problem) const {
  const auto& v = problem.find(name);
  const Vector& coords = assignment.at(name);
  if (v.kind == VarKind::Symmetric) return unpack_symmetric(coords, v.n);
  if (v.kind == VarKind::General) {
    Matrix m(v.rows, v.cols);
    int idx = 0;
    for (int i = 0; i < v.rows; ++i)
      for (int j = 0; j < v.cols; ++j) m(i, j) = coords(idx++);
    return m;
  }
  throw std::invalid_argument("matrix_value: use zf_value for multiplier variables");
}

ZamesFalbParams SdpSolution::zf_value(const std::string& name,
                                      const LmiProblem& problem) const {
  const auto& v = problem.find(name);
  if (v.kind != VarKind::ZamesFalb)
    throw std::invalid_argument("zf_value: not a multiplier variable");
  const Vector& coords = assignment.at(name);
  ZamesFalbParams params;
  params.rho = v.zf.rho;
  params.class_tag = v.zf.class_tag;
  params.block_dim = v.zf.d;
  params.blocks = blocks_from_parameters(v.zf.class_tag, v.zf.ell, v.zf.d, coords);
  for (auto& b : params.blocks) b = v.zf.transform * b * v.zf.transform.transpose();
  return params;
}

SdpSolution solve(const LmiProblem& problem, const Config& cfg, ConeBackend* backend) {
  ConeProblem cone = problem.assemble(cfg);
  ConeSettings settings;
  settings.max_iterations = cfg.max_iterations;

  InteriorPointBackend default_backend;
  ConeBackend* be = backend ? backend : &default_backend;
  ConeSolution cs = be->solve(cone, settings);

  SdpSolution out;
  out.iterations = cs.iterations;
  out.gap = cs.gap;
  out.primal_residual = cs.primal_residual;
  out.dual_residual = cs.dual_residual;

  auto offsets = coordinate_offsets(problem);
  for (const auto& v : problem.vars)
    out.assignment[v.name] = cs.y.segment(offsets.at(v.name), v.dim());

  const bool margin_mode = problem.objective == ObjectiveKind::FeasibilityMargin;
  const int p0 = problem.total_coords();
  out.margin = margin_mode ? cs.y(p0) : 0.0;

  // Soundness: re-verify every matrix constraint by eigenvalues under the
  // returned assignment.
  double verified = std::numeric_limits<double>::infinity();
  for (const auto& con : problem.constraints) {
    Matrix m = con.expr.eval(out.assignment);
    if (con.sense == Sense::NegativeDefinite) m = -m;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
    if (con.with_margin || !margin_mode)
      verified = std::min(verified, es.eigenvalues().minCoeff());
  }
  out.verified_margin = verified;

  if (cs.status == ConeSolution::Status::NumericalFailure) {
    out.status = SdpSolution::Status::Inconclusive;
    out.diagnostics = "interior-point backend failed";
    return out;
  }

  if (!margin_mode) {
    out.status = cs.status == ConeSolution::Status::Optimal
                     ? SdpSolution::Status::Feasible
                     : SdpSolution::Status::Inconclusive;
    return out;
  }

  // The optimal margin of a homogeneous strict system is exactly zero when
  // it is infeasible (the zero assignment is always admissible), so the
  // negative answer comes from the certified dual upper bound on the margin
  // rather than the sign of the primal value alone.
  const bool converged = cs.status == ConeSolution::Status::Optimal &&
                         cs.dual_residual < 1e-6;
  if (out.margin > cfg.tol_feas && out.verified_margin > 0.0) {
    out.status = SdpSolution::Status::Feasible;
  } else if (converged && cs.dual_objective < cfg.tol_feas) {
    out.status = SdpSolution::Status::Infeasible;
  } else {
    out.status = SdpSolution::Status::Inconclusive;
    if (!converged) out.diagnostics = "solver did not converge";
  }
  return out;
}

PBlocks PBlocks::snr(int d) {
  return {Matrix::Zero(d, d), Matrix::Identity(d, d), Matrix::Zero(d, d)};
}

AffineExpr kyp_constraint(const Matrix& a, const Matrix& b, const AffineExpr& c_expr,
                          const AffineExpr& d_expr, const PBlocks& p,
                          const AffineExpr& x_expr) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(b.cols());
  if (x_expr.rows() != n || x_expr.cols() != n)
    throw std::invalid_argument("kyp_constraint: Lyapunov variable size mismatch");
  if (c_expr.cols() != n || d_expr.cols() != m || c_expr.rows() != d_expr.rows())
    throw std::invalid_argument("kyp_constraint: output dimensions mismatch");

  Matrix ab(n, n + m);
  ab << a, b;
  Matrix in0(n, n + m);
  in0 << Matrix::Identity(n, n), Matrix::Zero(n, m);

  AffineExpr lhs = x_expr.congruence(ab) - x_expr.congruence(in0);

  AffineExpr cd = AffineExpr::block({{c_expr, d_expr}});
  const bool cd_variable = !cd.coefficients().empty();
  Matrix zi(m, n + m);
  zi << Matrix::Zero(m, n), Matrix::Identity(m, m);

  if (cd_variable) {
    if (p.q.size() > 0 && p.q.cwiseAbs().maxCoeff() > 0.0)
      throw std::invalid_argument("kyp_constraint: variable outputs require Q = 0");
    // [C D]^T S [0 I] + transpose, plus the constant R block.
    lhs = lhs + cd.transpose().right_mul(p.s * zi).sym() +
          AffineExpr(zi.transpose() * p.r * zi);
  } else {
    Matrix cdm(cd.rows(), n + m);
    cdm = cd.constant_term();
    Matrix term = cdm.transpose() * p.q * cdm + cdm.transpose() * p.s * zi +
                  zi.transpose() * p.s.transpose() * cdm + zi.transpose() * p.r * zi;
    lhs = lhs + AffineExpr(term);
  }
  return lhs;
}

AffineExpr kyp_constraint(const StateSpace& g, const PBlocks& p, const AffineExpr& x_expr) {
  return kyp_constraint(g.a, g.b, AffineExpr(g.c), AffineExpr(g.d), p, x_expr);
}

namespace {

// Evaluate the image of a single coordinate direction of one variable.
Matrix direction_image(const AffineExpr& expr, const LmiProblem& problem,
                       const std::string& var, const Vector& direction) {
  Assignment a;
  for (const auto& v : problem.vars) a[v.name] = Vector::Zero(v.dim());
  a[var] = direction;
  return expr.eval(a) - expr.constant_term();
}

}  // namespace

LmiProblem structural_kron_reduce(const LmiProblem& problem, int d) {
  if (d == 1) return problem;
  if (d < 1) throw std::invalid_argument("structural_kron_reduce: d must be >= 1");

  LmiProblem red;
  red.objective = problem.objective;
  red.objective_coeffs = problem.objective_coeffs;

  // Reduced variables plus the coordinate lift original <- reduced.
  std::map<std::string, std::vector<Vector>> lifted_directions;
  for (const auto& v : problem.vars) {
    if (v.kind == VarKind::Symmetric) {
      if (v.n % d != 0)
        throw std::invalid_argument("structural_kron_reduce: size of " + v.name +
                                    " is not a multiple of d");
      const int nr = v.n / d;
      red.add_symmetric(v.name, nr);
      std::vector<Vector> dirs;
      for (const auto& img : symmetric_images(nr))
        dirs.push_back(pack_symmetric(kron(img, Matrix::Identity(d, d))));
      lifted_directions[v.name] = std::move(dirs);
    } else if (v.kind == VarKind::ZamesFalb) {
      if (v.zf.class_tag != MultiplierClass::Repeated)
        throw std::invalid_argument(
            "structural_kron_reduce: only repeated multipliers carry M (x) I structure");
      Matrix factor;
      if (!kron_identity_factor(v.zf.transform, d, factor) || factor.rows() != 1)
        throw std::invalid_argument("structural_kron_reduce: transform of " + v.name +
                                    " is not scalar (x) I");
      ZfVarDesc desc = v.zf;
      desc.d = 1;
      desc.transform = factor;
      desc.add_membership = false;  // membership rows are copied below
      red.add_zames_falb(v.name, desc);
      std::vector<Vector> dirs;
      for (int k = 0; k < v.dim(); ++k) dirs.push_back(Vector::Unit(v.dim(), k));
      lifted_directions[v.name] = std::move(dirs);
    } else {
      throw std::invalid_argument(
          "structural_kron_reduce: general matrix variables are not supported");
    }
  }

  auto reduce_expr = [&](const AffineExpr& expr, bool elementwise_row) {
    Matrix factor0;
    Matrix c0 = expr.constant_term();
    if (elementwise_row) {
      factor0 = c0;  // scalar rows carry no Kronecker structure
    } else if (!kron_identity_factor(c0, d, factor0, 1e-10 * std::max(1.0, c0.norm()))) {
      throw std::invalid_argument("structural_kron_reduce: constant block violates M (x) I");
    }
    AffineExpr out(factor0);
    for (const auto& [name, images] : expr.coefficients()) {
      const auto& dirs = lifted_directions.at(name);
      std::vector<Matrix> red_images;
      red_images.reserve(dirs.size());
      for (const auto& dir : dirs) {
        Matrix img = direction_image(expr, problem, name, dir);
        Matrix f;
        if (elementwise_row) {
          f = img;
        } else if (!kron_identity_factor(img, d, f, 1e-10 * std::max(1.0, img.norm()))) {
          throw std::invalid_argument(
              "structural_kron_reduce: coefficient of " + name + " violates M (x) I");
        }
        red_images.push_back(f);
      }
      out = out + AffineExpr::from_var(name, Matrix::Zero(factor0.rows(), factor0.cols()),
                                       std::move(red_images));
    }
    return out;
  };

  for (const auto& con : problem.constraints)
    red.add_constraint(reduce_expr(con.expr, false), con.sense, con.label, con.with_margin);
  for (const auto& e : problem.elementwise)
    red.add_elementwise(reduce_expr(e.expr, true), e.label);
  return red;
}

Assignment kron_expand_assignment(const LmiProblem& reduced, const Assignment& a, int d) {
  Assignment out;
  for (const auto& v : reduced.vars) {
    const Vector& coords = a.at(v.name);
    if (v.kind == VarKind::Symmetric) {
      Matrix m = unpack_symmetric(coords, v.n);
      out[v.name] = pack_symmetric(kron(m, Matrix::Identity(d, d)));
    } else {
      out[v.name] = coords;
    }
  }
  return out;
}

}  // namespace lmi
}  // namespace ratesyn

#include "ratesyn/conesolver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ratesyn {

namespace {

struct PsdState {
  Matrix slack;      // S
  Matrix dual;       // Z
  Matrix r;          // NT factor: R^T Z R = diag(lam), R^-1 S R^-T = diag(lam)
  Matrix rinv;
  Vector lam;
};

// Largest alpha with M + alpha dM staying PSD, measured through the
// Cholesky factor of M. Returns +inf when dM is PSD already.
double step_to_boundary(const Eigen::LLT<Matrix>& llt, const Matrix& dm) {
  const Matrix l = llt.matrixL();
  Matrix scaled = l.triangularView<Eigen::Lower>().solve(dm.transpose()).transpose();
  scaled = l.triangularView<Eigen::Lower>().solve(scaled);
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (scaled + scaled.transpose()));
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

}  // namespace

ConeSolution InteriorPointBackend::solve(const ConeProblem& problem,
                                         const ConeSettings& settings) {
  const int p = problem.num_vars;
  const int nblocks = static_cast<int>(problem.psd.size());
  const int mlp = static_cast<int>(problem.lp_const.size());
  if (p <= 0) throw std::invalid_argument("conesolver: no decision variables");
  for (const auto& blk : problem.psd)
    if (static_cast<int>(blk.fk.size()) != p)
      throw std::invalid_argument("conesolver: coefficient count mismatch");

  ConeSolution sol;
  sol.y = Vector::Zero(p);

  double cone_dim = mlp;
  for (const auto& blk : problem.psd) cone_dim += blk.f0.rows();
  if (cone_dim == 0) throw std::invalid_argument("conesolver: empty cone");

  // Interior start: identity-scaled slacks and duals.
  std::vector<PsdState> ps(nblocks);
  for (int j = 0; j < nblocks; ++j) {
    const int n = static_cast<int>(problem.psd[j].f0.rows());
    double scale = std::max(1.0, problem.psd[j].f0.norm());
    ps[j].slack = scale * Matrix::Identity(n, n);
    ps[j].dual = Matrix::Identity(n, n);
  }
  Vector s_lp = Vector::Ones(mlp), z_lp = Vector::Ones(mlp);
  for (int i = 0; i < mlp; ++i) s_lp(i) = std::max(1.0, std::abs(problem.lp_const(i)));

  const Vector c = -problem.objective;  // internally minimize c.y

  std::vector<Matrix> presid(nblocks);
  Vector presid_lp(mlp), dresid(p);

  // Best iterate fallback: degenerate optima (margin exactly on the cone
  // boundary) can break the scaling before the target tolerance is met.
  ConeSolution best;
  double best_err = std::numeric_limits<double>::infinity();
  const double acceptable_err = 1e-6;
  auto track_best = [&](const ConeSolution& cur) {
    const double err =
        std::max({cur.primal_residual, cur.dual_residual, cur.rel_gap});
    if (err < best_err) {
      best_err = err;
      best = cur;
    }
  };
  auto finish_degraded = [&](ConeSolution::Status hard_status) {
    ConeSolution out = best_err <= acceptable_err ? best : sol;
    out.status = best_err <= acceptable_err ? ConeSolution::Status::Optimal : hard_status;
    return out;
  };

  auto compute_residuals = [&](const Vector& y, ConeSolution& out) {
    double pnorm = 0.0;
    for (int j = 0; j < nblocks; ++j) {
      Matrix fy = problem.psd[j].f0;
      for (int k = 0; k < p; ++k) fy += y(k) * problem.psd[j].fk[k];
      presid[j] = fy - ps[j].slack;
      pnorm = std::max(pnorm, presid[j].norm() / std::max(1.0, problem.psd[j].f0.norm()));
    }
    if (mlp > 0) {
      presid_lp = problem.lp_const + problem.lp_coeffs * y - s_lp;
      pnorm = std::max(pnorm, presid_lp.cwiseAbs().maxCoeff() /
                                  std::max(1.0, problem.lp_const.cwiseAbs().maxCoeff()));
    }
    for (int k = 0; k < p; ++k) {
      double acc = c(k);
      for (int j = 0; j < nblocks; ++j)
        acc -= (ps[j].dual.array() * problem.psd[j].fk[k].array()).sum();
      if (mlp > 0) acc -= problem.lp_coeffs.col(k).dot(z_lp);
      dresid(k) = acc;
    }
    out.primal_residual = pnorm;
    out.dual_residual = dresid.norm() / std::max(1.0, c.norm());
  };

  double gap = 0.0;
  int iter = 0;
  for (; iter < settings.max_iterations; ++iter) {
    compute_residuals(sol.y, sol);
    gap = s_lp.dot(z_lp);
    for (int j = 0; j < nblocks; ++j)
      gap += (ps[j].slack.array() * ps[j].dual.array()).sum();
    const double mu = gap / cone_dim;

    const double pcost = c.dot(sol.y);
    double dcost = 0.0;
    for (int j = 0; j < nblocks; ++j)
      dcost -= (ps[j].dual.array() * problem.psd[j].f0.array()).sum();
    if (mlp > 0) dcost -= problem.lp_const.dot(z_lp);
    sol.objective_value = -pcost;   // back to the maximization convention
    sol.dual_objective = -dcost;
    sol.gap = gap;
    const double denom = std::max({1.0, std::abs(pcost), std::abs(dcost)});
    sol.rel_gap = gap / denom;
    sol.iterations = iter;

    if (sol.primal_residual <= settings.feas_tol && sol.dual_residual <= settings.feas_tol &&
        (gap <= settings.gap_tol || sol.rel_gap <= settings.rel_gap_tol)) {
      sol.status = ConeSolution::Status::Optimal;
      return sol;
    }
    track_best(sol);

    // NT scaling per cone.
    std::vector<Eigen::LLT<Matrix>> llt_s(nblocks), llt_z(nblocks);
    bool chol_ok = true;
    for (int j = 0; j < nblocks; ++j) {
      llt_s[j].compute(ps[j].slack);
      llt_z[j].compute(ps[j].dual);
      if (llt_s[j].info() != Eigen::Success || llt_z[j].info() != Eigen::Success) {
        chol_ok = false;
        break;
      }
      Matrix l1 = llt_s[j].matrixL();
      Matrix l2 = llt_z[j].matrixL();
      Eigen::JacobiSVD<Matrix> svd(l2.transpose() * l1,
                                   Eigen::ComputeFullU | Eigen::ComputeFullV);
      ps[j].lam = svd.singularValues();
      if (ps[j].lam.size() > 0 && ps[j].lam.minCoeff() <= 0.0) {
        chol_ok = false;
        break;
      }
      Matrix lam_isqrt = ps[j].lam.cwiseSqrt().cwiseInverse().asDiagonal();
      ps[j].r = l1 * svd.matrixV() * lam_isqrt;
      ps[j].rinv = lam_isqrt * svd.matrixU().transpose() * l2.transpose();
    }
    if (!chol_ok) return finish_degraded(ConeSolution::Status::NumericalFailure);
    Vector w_lp(mlp);
    for (int i = 0; i < mlp; ++i) w_lp(i) = z_lp(i) / s_lp(i);

    // Schur complement B and the scaled coefficient images.
    Matrix schur = Matrix::Zero(p, p);
    std::vector<std::vector<Matrix>> wfw(nblocks);
    for (int j = 0; j < nblocks; ++j) {
      wfw[j].resize(p);
      for (int k = 0; k < p; ++k)
        wfw[j][k] = ps[j].rinv * problem.psd[j].fk[k] * ps[j].rinv.transpose();
      for (int k = 0; k < p; ++k)
        for (int l = k; l < p; ++l)
          schur(k, l) += (wfw[j][k].array() * wfw[j][l].array()).sum();
    }
    if (mlp > 0)
      for (int k = 0; k < p; ++k)
        for (int l = k; l < p; ++l)
          schur(k, l) += (problem.lp_coeffs.col(k).array() *
                          problem.lp_coeffs.col(l).array() * w_lp.array())
                             .sum();
    schur = schur.selfadjointView<Eigen::Upper>();
    Eigen::LDLT<Matrix> schur_fact(schur);
    if (schur_fact.info() != Eigen::Success) {
      // Rounding can make the (mathematically positive definite) Schur
      // matrix indefinite near degenerate optima; retry with a ridge.
      const double base = std::max(1e-14 * std::abs(schur.trace()) / p, 1e-300);
      double reg = base;
      for (; reg <= 1e8 * base; reg *= 100.0) {
        schur_fact.compute(schur + reg * Matrix::Identity(p, p));
        if (schur_fact.info() == Eigen::Success) break;
      }
      if (schur_fact.info() != Eigen::Success)
        return finish_degraded(ConeSolution::Status::NumericalFailure);
    }

    // One Newton solve for a given centrality target per cone.
    std::vector<Matrix> dS(nblocks), dZ(nblocks);
    Vector ds_lp(mlp), dz_lp(mlp);
    Vector dy(p);
    auto newton = [&](const std::vector<Matrix>& target_psd, const Vector& target_lp) {
      Vector rhs = -dresid;
      std::vector<Matrix> u(nblocks);
      for (int j = 0; j < nblocks; ++j) {
        const auto& lam = ps[j].lam;
        const int n = static_cast<int>(lam.size());
        u[j].resize(n, n);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            u[j](a, b) = 2.0 * target_psd[j](a, b) / (lam(a) + lam(b));
        Matrix term = ps[j].rinv.transpose() * u[j] * ps[j].rinv -
                      ps[j].rinv.transpose() *
                          (ps[j].rinv * presid[j] * ps[j].rinv.transpose()) * ps[j].rinv;
        for (int k = 0; k < p; ++k)
          rhs(k) += (term.array() * problem.psd[j].fk[k].array()).sum();
      }
      for (int i = 0; i < mlp; ++i) {
        const double coef = target_lp(i) / s_lp(i) - w_lp(i) * presid_lp(i);
        rhs += coef * problem.lp_coeffs.row(i).transpose();
      }
      dy = schur_fact.solve(rhs);
      dy += schur_fact.solve(rhs - schur * dy);  // one refinement step
      for (int j = 0; j < nblocks; ++j) {
        dS[j] = presid[j];
        for (int k = 0; k < p; ++k) dS[j] += dy(k) * problem.psd[j].fk[k];
        Matrix ds_scaled = ps[j].rinv * dS[j] * ps[j].rinv.transpose();
        Matrix dz_scaled = u[j] - ds_scaled;
        dZ[j] = ps[j].rinv.transpose() * dz_scaled * ps[j].rinv;
        dZ[j] = 0.5 * (dZ[j] + dZ[j].transpose()).eval();
        dS[j] = 0.5 * (dS[j] + dS[j].transpose()).eval();
      }
      if (mlp > 0) {
        ds_lp = problem.lp_coeffs * dy + presid_lp;
        for (int i = 0; i < mlp; ++i)
          dz_lp(i) = (target_lp(i) - z_lp(i) * ds_lp(i)) / s_lp(i);
      }
    };

    auto boundary_step = [&]() {
      double alpha = std::numeric_limits<double>::infinity();
      for (int j = 0; j < nblocks; ++j) {
        alpha = std::min(alpha, step_to_boundary(llt_s[j], dS[j]));
        alpha = std::min(alpha, step_to_boundary(llt_z[j], dZ[j]));
      }
      for (int i = 0; i < mlp; ++i) {
        if (ds_lp(i) < 0.0) alpha = std::min(alpha, -s_lp(i) / ds_lp(i));
        if (dz_lp(i) < 0.0) alpha = std::min(alpha, -z_lp(i) / dz_lp(i));
      }
      return alpha;
    };

    // Predictor (affine direction).
    std::vector<Matrix> target(nblocks);
    for (int j = 0; j < nblocks; ++j) {
      target[j] = Matrix((-ps[j].lam.cwiseProduct(ps[j].lam)).asDiagonal());
    }
    Vector target_lp = mlp > 0 ? (-s_lp.cwiseProduct(z_lp)).eval() : Vector();
    newton(target, target_lp);
    double alpha_aff = std::min(1.0, settings.step_fraction * boundary_step());

    double gap_aff = 0.0;
    for (int j = 0; j < nblocks; ++j)
      gap_aff += ((ps[j].slack + alpha_aff * dS[j]).array() *
                  (ps[j].dual + alpha_aff * dZ[j]).array())
                     .sum();
    if (mlp > 0) gap_aff += (s_lp + alpha_aff * ds_lp).dot(z_lp + alpha_aff * dz_lp);
    gap_aff = std::max(gap_aff, 0.0);
    double sigma = std::pow(gap_aff / gap, 3.0);
    sigma = std::min(std::max(sigma, 1e-8), 1.0 - 1e-8);
    const double sigmu = sigma * mu;

    // Corrector with Mehrotra second-order term.
    std::vector<Matrix> ds_aff(nblocks), dz_aff(nblocks);
    for (int j = 0; j < nblocks; ++j) {
      ds_aff[j] = ps[j].rinv * dS[j] * ps[j].rinv.transpose();
      dz_aff[j] = ps[j].r.transpose() * dZ[j] * ps[j].r;
    }
    Vector ds_lp_aff = ds_lp, dz_lp_aff = dz_lp;
    for (int j = 0; j < nblocks; ++j) {
      const int n = static_cast<int>(ps[j].lam.size());
      Matrix corr = 0.5 * (ds_aff[j] * dz_aff[j] + dz_aff[j] * ds_aff[j]);
      target[j] = sigmu * Matrix::Identity(n, n) -
                  Matrix(ps[j].lam.cwiseProduct(ps[j].lam).asDiagonal()) - corr;
    }
    for (int i = 0; i < mlp; ++i)
      target_lp(i) = sigmu - s_lp(i) * z_lp(i) - ds_lp_aff(i) * dz_lp_aff(i);
    newton(target, target_lp);
    double alpha = std::min(1.0, settings.step_fraction * boundary_step());
    if (!std::isfinite(alpha) || alpha <= 1e-10)
      return finish_degraded(ConeSolution::Status::MaxIterations);

    // Commit the step, backing off if rounding lands a cone factor on the
    // boundary.
    bool committed = false;
    for (int attempt = 0; attempt < 40 && !committed; ++attempt) {
      committed = true;
      for (int j = 0; j < nblocks && committed; ++j) {
        Matrix s_new = ps[j].slack + alpha * dS[j];
        Matrix z_new = ps[j].dual + alpha * dZ[j];
        if (Eigen::LLT<Matrix>(0.5 * (s_new + s_new.transpose())).info() != Eigen::Success ||
            Eigen::LLT<Matrix>(0.5 * (z_new + z_new.transpose())).info() != Eigen::Success)
          committed = false;
      }
      for (int i = 0; i < mlp && committed; ++i)
        if (s_lp(i) + alpha * ds_lp(i) <= 0.0 || z_lp(i) + alpha * dz_lp(i) <= 0.0)
          committed = false;
      if (!committed) alpha *= 0.7;
    }
    if (!committed || alpha <= 1e-10)
      return finish_degraded(ConeSolution::Status::MaxIterations);

    sol.y += alpha * dy;
    for (int j = 0; j < nblocks; ++j) {
      ps[j].slack += alpha * dS[j];
      ps[j].dual += alpha * dZ[j];
      ps[j].slack = 0.5 * (ps[j].slack + ps[j].slack.transpose()).eval();
      ps[j].dual = 0.5 * (ps[j].dual + ps[j].dual.transpose()).eval();
    }
    s_lp += alpha * ds_lp;
    z_lp += alpha * dz_lp;
  }

  compute_residuals(sol.y, sol);
  sol.iterations = iter;
  track_best(sol);
  return finish_degraded(ConeSolution::Status::MaxIterations);
}

ConeSolution solve_cone(const ConeProblem& problem, const ConeSettings& settings) {
  InteriorPointBackend backend;
  return backend.solve(problem, settings);
}

}  // namespace ratesyn

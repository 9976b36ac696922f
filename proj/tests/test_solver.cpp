#include <doctest.h>

#include <random>

#include "ratesyn/conesolver.hpp"

using namespace ratesyn;

namespace {

// maximize t s.t. F0 + y1 F1 ... - t I >= 0 convenience builder with a box.
ConeProblem margin_problem(const std::vector<Matrix>& f0s,
                           const std::vector<std::vector<Matrix>>& fks, int nvars,
                           double box = 1e3) {
  ConeProblem p;
  p.num_vars = nvars + 1;  // margin last
  for (size_t j = 0; j < f0s.size(); ++j) {
    ConeBlock blk;
    blk.f0 = f0s[j];
    blk.fk.assign(p.num_vars, Matrix::Zero(f0s[j].rows(), f0s[j].cols()));
    for (int k = 0; k < nvars; ++k) blk.fk[k] = fks[j][k];
    blk.fk[nvars] = -Matrix::Identity(f0s[j].rows(), f0s[j].cols());
    p.psd.push_back(blk);
  }
  const int rows = 2 * p.num_vars;
  p.lp_coeffs = Matrix::Zero(rows, p.num_vars);
  p.lp_const = Vector::Zero(rows);
  for (int k = 0; k < p.num_vars; ++k) {
    p.lp_coeffs(2 * k, k) = 1.0;
    p.lp_const(2 * k) = box;
    p.lp_coeffs(2 * k + 1, k) = -1.0;
    p.lp_const(2 * k + 1) = box;
  }
  p.objective = Vector::Zero(p.num_vars);
  p.objective(nvars) = 1.0;
  return p;
}

}  // namespace

TEST_CASE("pure LP: maximize y with y <= 3") {
  ConeProblem p;
  p.num_vars = 1;
  p.lp_coeffs = Matrix::Zero(2, 1);
  p.lp_const = Vector::Zero(2);
  p.lp_coeffs(0, 0) = -1.0;
  p.lp_const(0) = 3.0;  // 3 - y >= 0
  p.lp_coeffs(1, 0) = 1.0;
  p.lp_const(1) = 10.0;  // y >= -10
  p.objective = Vector::Ones(1);
  ConeSolution s = solve_cone(p);
  REQUIRE(s.status == ConeSolution::Status::Optimal);
  CHECK(s.y(0) == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(s.rel_gap < 1e-7);
}

TEST_CASE("scalar SDP margin: x in [1, 2] maximizing min(x - 1, 2 - x)") {
  // Constraints x - 1 - t >= 0 and 2 - x - t >= 0; optimum t = 1/2 at x = 3/2.
  std::vector<Matrix> f0s = {Matrix::Constant(1, 1, -1.0), Matrix::Constant(1, 1, 2.0)};
  std::vector<std::vector<Matrix>> fks = {{Matrix::Constant(1, 1, 1.0)},
                                          {Matrix::Constant(1, 1, -1.0)}};
  ConeProblem p = margin_problem(f0s, fks, 1);
  ConeSolution s = solve_cone(p);
  REQUIRE(s.status == ConeSolution::Status::Optimal);
  CHECK(s.objective_value == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(s.y(0) == doctest::Approx(1.5).epsilon(1e-5));
}

TEST_CASE("infeasible pair x > 0.5, -x > 0.5 yields a negative margin") {
  std::vector<Matrix> f0s = {Matrix::Constant(1, 1, -0.5), Matrix::Constant(1, 1, -0.5)};
  std::vector<std::vector<Matrix>> fks = {{Matrix::Constant(1, 1, 1.0)},
                                          {Matrix::Constant(1, 1, -1.0)}};
  ConeSolution s = solve_cone(margin_problem(f0s, fks, 1));
  REQUIRE(s.status == ConeSolution::Status::Optimal);
  CHECK(s.objective_value == doctest::Approx(-0.5).epsilon(1e-6));
}

TEST_CASE("2x2 eigenvalue problem") {
  // maximize t with A - t I >= 0: optimum is lambda_min(A).
  Matrix a(2, 2);
  a << 2.0, 0.5, 0.5, 1.0;
  ConeProblem p = margin_problem({a}, {{}}, 0);
  ConeSolution s = solve_cone(p);
  REQUIRE(s.status == ConeSolution::Status::Optimal);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  CHECK(s.objective_value == doctest::Approx(es.eigenvalues().minCoeff()).epsilon(1e-7));
  CHECK(s.rel_gap < 1e-7);
}

TEST_CASE("duality gap is closed at optimality") {
  std::mt19937 rng(3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix base(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) base(i, j) = gauss(rng);
    base = (0.5 * (base + base.transpose())).eval();
    Matrix dir(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) dir(i, j) = gauss(rng);
    dir = (0.5 * (dir + dir.transpose())).eval();
    ConeProblem p = margin_problem({base}, {{dir}}, 1);
    ConeSolution s = solve_cone(p);
    REQUIRE(s.status == ConeSolution::Status::Optimal);
    CHECK(s.rel_gap <= 1e-7);
    CHECK(std::abs(s.objective_value - s.dual_objective) <=
          1e-6 * std::max(1.0, std::abs(s.objective_value)));
  }
}

TEST_CASE("Stein feasibility battery against eigenvalue ground truth") {
  // a' X a - X < 0 with X > 0 is solvable iff a is Schur.
  std::mt19937 rng(2024);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> scale(0.3, 1.7);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + trial % 4;
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = gauss(rng) / std::sqrt(double(n));
    a *= scale(rng);
    Eigen::EigenSolver<Matrix> es(a);
    const double radius = es.eigenvalues().cwiseAbs().maxCoeff();
    if (std::abs(radius - 1.0) < 0.05) continue;  // skip near-boundary draws

    // Variables: X symmetric packed into coordinates via basis matrices.
    std::vector<Matrix> basis;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Matrix e = Matrix::Zero(n, n);
        e(i, j) = e(j, i) = 1.0;
        basis.push_back(e);
      }
    const int nv = static_cast<int>(basis.size());
    std::vector<Matrix> f0s = {Matrix::Zero(n, n), Matrix::Zero(n, n)};
    std::vector<std::vector<Matrix>> fks(2);
    for (const auto& e : basis) {
      fks[0].push_back(e);                                // X > 0
      fks[1].push_back(-(a.transpose() * e * a - e));     // -(A'XA - X) > 0
    }
    ConeSolution s = solve_cone(margin_problem(f0s, fks, nv));
    REQUIRE(s.status == ConeSolution::Status::Optimal);
    const bool feasible = s.objective_value > 1e-7;
    CHECK(feasible == (radius < 1.0));
    ++checked;
  }
  CHECK(checked >= 40);
}

TEST_CASE("feasible witnesses verify by eigenvalues") {
  Matrix a(3, 3);
  a << 0.4, 0.2, 0.0, -0.1, 0.3, 0.1, 0.0, 0.2, 0.5;
  std::vector<Matrix> basis;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      Matrix e = Matrix::Zero(3, 3);
      e(i, j) = e(j, i) = 1.0;
      basis.push_back(e);
    }
  std::vector<std::vector<Matrix>> fks(2);
  for (const auto& e : basis) {
    fks[0].push_back(e);
    fks[1].push_back(-(a.transpose() * e * a - e));
  }
  ConeProblem p = margin_problem({Matrix::Zero(3, 3), Matrix::Zero(3, 3)}, fks,
                                 static_cast<int>(basis.size()));
  ConeSolution s = solve_cone(p);
  REQUIRE(s.status == ConeSolution::Status::Optimal);
  REQUIRE(s.objective_value > 1e-6);
  // Rebuild X and verify both constraints by eigenvalues.
  Matrix x = Matrix::Zero(3, 3);
  for (size_t k = 0; k < basis.size(); ++k) x += s.y(k) * basis[k];
  Eigen::SelfAdjointEigenSolver<Matrix> ex(x);
  Eigen::SelfAdjointEigenSolver<Matrix> estein(-(a.transpose() * x * a - x));
  CHECK(ex.eigenvalues().minCoeff() >= s.objective_value - 1e-8);
  CHECK(estein.eigenvalues().minCoeff() >= s.objective_value - 1e-8);
}

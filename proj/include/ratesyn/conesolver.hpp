#pragma once

#include <vector>

#include "ratesyn/statespace.hpp"

namespace ratesyn {

/// One PSD constraint F0 + sum_k y_k Fk >= 0 in matrix form.
struct ConeBlock {
  Matrix f0;
  std::vector<Matrix> fk;  ///< one coefficient matrix per scalar variable
};

/// Dense linear semidefinite problem
///   maximize objective . y
///   s.t.     F_j0 + sum_k y_k F_jk  PSD   for every psd block j,
///            lp_const + lp_coeffs y >= 0  elementwise.
struct ConeProblem {
  int num_vars = 0;
  std::vector<ConeBlock> psd;
  Matrix lp_coeffs;  // m x num_vars
  Vector lp_const;   // m
  Vector objective;  // num_vars
};

struct ConeSettings {
  int max_iterations = 100;
  double feas_tol = 1e-9;
  double gap_tol = 1e-9;
  double rel_gap_tol = 1e-9;
  double step_fraction = 0.98;
};

struct ConeSolution {
  enum class Status { Optimal, MaxIterations, NumericalFailure };
  Status status = Status::NumericalFailure;
  Vector y;
  double objective_value = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;
  double rel_gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
};

/// Interface for pluggable conic backends; the embedded interior-point
/// method below is the default.
class ConeBackend {
 public:
  virtual ~ConeBackend() = default;
  virtual ConeSolution solve(const ConeProblem& problem, const ConeSettings& settings) = 0;
};

/// Primal-dual path-following method with Nesterov-Todd scaling and a
/// Mehrotra predictor-corrector step, specialized to small dense problems.
class InteriorPointBackend final : public ConeBackend {
 public:
  ConeSolution solve(const ConeProblem& problem, const ConeSettings& settings) override;
};

ConeSolution solve_cone(const ConeProblem& problem, const ConeSettings& settings = {});

}  // namespace ratesyn

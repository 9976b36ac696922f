#pragma once

#include <optional>
#include <string>

#include "ratesyn/lmi.hpp"
#include "ratesyn/multiplier.hpp"
#include "ratesyn/statespace.hpp"

namespace ratesyn {

/// Objective-function class: strongly convex with parameter m, gradient
/// Lipschitz with constant L (kappa = L/m). An optional matrix pair
/// (M_f, L_f) with 0 < M_f < L_f describes Hessian-bounded structure.
struct FunctionClass {
  double m = 1.0;
  double L = 10.0;
  int d = 1;
  std::optional<std::pair<Matrix, Matrix>> structured;

  double kappa() const { return L / m; }
  double sigma() const { return L / m - 1.0; }

  Matrix lower_matrix() const;  ///< M_f or m I_d
  Matrix upper_matrix() const;  ///< L_f or L I_d

  void validate() const;
};

/// Algorithm in first-order form: factor matrices (A_c, B_c, C_c, D_c) whose
/// product with the discrete integrator realizes the loop matrices (A, B, C)
/// with zero feedthrough.
struct AlgorithmRealization {
  Matrix ac, bc, cc, dc;
  Matrix a, b, c;
  int d = 1;

  int states() const { return static_cast<int>(a.rows()); }
  StateSpace loop() const { return StateSpace(a, b, c, Matrix::Zero(d, d)); }
  StateSpace factor() const { return StateSpace(ac, bc, cc, dc); }

  /// Loop matrices assembled from the factor in the canonical block pattern
  /// [I 0 I; B_c A_c 0; D_c C_c 0].
  static AlgorithmRealization from_factor(const Matrix& ac, const Matrix& bc,
                                          const Matrix& cc, const Matrix& dc, int d);
};

enum class CertifyMethod { AnalysisLmi, Pick, ClosedForm };

struct RateCertificate {
  double rho = 0.0;
  int ell = 0;
  MultiplierClass class_tag = MultiplierClass::Repeated;
  ZamesFalbParams lambda;
  double margin = 0.0;
  CertifyMethod method = CertifyMethod::AnalysisLmi;
};

namespace analysis {

/// Named first-order algorithms. Gradient descent is z+ = z - alpha grad f;
/// the momentum family shares the three-parameter template with gamma = 0
/// (heavy ball), gamma = beta (accelerated gradient), and the tuned
/// triple-momentum parameters.
AlgorithmRealization gradient_descent(double alpha, double L, int d);
AlgorithmRealization heavy_ball(double alpha, double beta, double L, int d);
AlgorithmRealization nesterov(double alpha, double beta, double L, int d);
AlgorithmRealization triple_momentum(double m, double L, int d);

struct StructureReport {
  bool ok = false;
  std::string reason;
  bool reduced = false;  ///< a non-detectable part was removed first
  AlgorithmRealization value;
};

/// Verify the necessary integrator structure of a loop system with D = 0 and
/// construct the factor matrices; reports which condition failed otherwise.
StructureReport structure_check(const StateSpace& g, const Config& cfg = {});

/// Unique fixed point x* with A x* = x*, C x* = z*.
Vector fixed_point(const AlgorithmRealization& alg, const Vector& z_star);

/// Rate-weighted loop system [rho^-1(A + B M_f C), rho^-1 B; (L_f - M_f) C, -I].
StateSpace weighted_system(const AlgorithmRealization& alg, const FunctionClass& fc,
                           double rho);

struct CertifyResult {
  lmi::SdpSolution::Status status = lmi::SdpSolution::Status::Inconclusive;
  std::optional<RateCertificate> certificate;
  std::string reason;
  double margin = 0.0;

  bool feasible() const { return status == lmi::SdpSolution::Status::Feasible; }
};

/// The joint (Lyapunov, multiplier) feasibility problem certifying rate rho.
/// Exposed for cross-checks and problem dumps.
lmi::LmiProblem assemble_certify_problem(const AlgorithmRealization& alg,
                                         const FunctionClass& fc, double rho, int ell,
                                         MultiplierClass class_tag, const Config& cfg = {});

/// Certify rho-convergence with a length-ell multiplier of the given class.
CertifyResult certify(const AlgorithmRealization& alg, const FunctionClass& fc, double rho,
                      int ell, MultiplierClass class_tag, const Config& cfg = {});

/// Re-solve the certification LMI with the multiplier frozen at the
/// certificate value; true when feasible with positive margin.
bool verify_certificate(const AlgorithmRealization& alg, const FunctionClass& fc,
                        const RateCertificate& cert, const Config& cfg = {});

struct BisectResult {
  bool ok = false;
  double rho_star = 1.0;
  std::optional<RateCertificate> certificate;
  std::string reason;
  int inconclusive_count = 0;  ///< solver indecisions treated as infeasible
};

struct BisectOptions {
  double lower = -1.0;  ///< negative means the default bracket floor
  double upper = 1.0 - 1e-4;
  double tol = -1.0;  ///< negative means cfg.tol_bisect
};

/// Bisection on rho over certify(); inconclusive solves count as infeasible
/// (conservative) and are reported.
BisectResult bisect_rate(const AlgorithmRealization& alg, const FunctionClass& fc, int ell,
                         MultiplierClass class_tag, const Config& cfg = {},
                         const BisectOptions& opts = {});

}  // namespace analysis
}  // namespace ratesyn

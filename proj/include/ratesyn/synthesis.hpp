#pragma once

#include <optional>

#include "ratesyn/analysis.hpp"
#include "ratesyn/lmi.hpp"

namespace ratesyn {

/// Generalized plant [z; y] = [A B1 B; C1 D1 E; C F 0] [x; w; u] closed by a
/// controller u = K y.
struct GeneralizedPlant {
  Matrix a, b1, b;
  Matrix c1, d1, e;
  Matrix c, f;

  int nx() const { return static_cast<int>(a.rows()); }
  int nw() const { return static_cast<int>(b1.cols()); }
  int nu() const { return static_cast<int>(b.cols()); }
  int nz() const { return static_cast<int>(c1.rows()); }
  int ny() const { return static_cast<int>(c.rows()); }

  /// Closed-loop system w -> z for u = K y.
  StateSpace close(const StateSpace& k) const;
};

namespace synthesis {

/// Stable coprime-factor data parameterizing all weighted closed loops
/// T1 + T2 Q T3 with Q ranging over stable systems.
struct YoulaData {
  StateSpace t1;  ///< transfer -I - sigma/(rho z) I
  StateSpace t2;  ///< static gain (L - m) I
  StateSpace t3;  ///< transfer (rho z - 1)/(rho z)^2 I
  double sigma = 0.0;
  double rho = 0.0;
  int d = 1;
};

YoulaData youla_data(const FunctionClass& fc, double rho, int d);

/// Plant realizing the convexified design interconnection: the multiplier
/// filters only the w-channel, the control enters through the static gap
/// gain. States are (filter, two integrator-like blocks).
struct SynthesisPlant {
  Matrix a, b1, b;  // b is a zero column
  Matrix e, c, f;
  Matrix j;          // selector compressing the third state block
  Matrix sigma_mat;  // sigma I or L_f M_f^-1 - I
  Matrix gap;        // (L - m) I or L_f - M_f
  int ell = 0;
  int d = 1;
  double rho = 0.0;

  AffineExpr c1_expr(const lmi::LmiProblem::ZfHandles& h) const;
  AffineExpr d1_expr(const lmi::LmiProblem::ZfHandles& h) const;
  GeneralizedPlant at_multiplier(const ZamesFalbParams& params) const;
};

SynthesisPlant build_synthesis_plant(const FunctionClass& fc, double rho, int ell);

struct FeasibilityResult {
  lmi::SdpSolution::Status status = lmi::SdpSolution::Status::Inconclusive;
  double margin = 0.0;
  std::optional<ZamesFalbParams> lambda;
  std::optional<Matrix> x;
  std::string reason;

  bool feasible() const { return status == lmi::SdpSolution::Status::Feasible; }
};

/// Joint (X, Lambda) design feasibility at rate rho with a length-ell
/// multiplier of the given class.
FeasibilityResult synthesis_feasible(const FunctionClass& fc, double rho, int ell,
                                     MultiplierClass class_tag, const Config& cfg = {});

/// X-eliminated 2x2 feasibility test over the repeated class only; agrees
/// with synthesis_feasible in status.
FeasibilityResult pick_feasible(const FunctionClass& fc, double rho, int ell,
                                const Config& cfg = {});

/// The 2x2 block matrix of the eliminated test at fixed coefficients.
Matrix pick_matrix(const FunctionClass& fc, double rho, const std::vector<double>& lambda);

/// Best certifiable design rate: 1 - 1/sqrt(kappa) for ell >= 1 and
/// (kappa - 1)/(kappa + 1) for the static multiplier.
double optimal_rate(const FunctionClass& fc, int ell);

/// Full-order output-feedback controller from a synthesis certificate:
/// completes (X, Y) to a closed-loop Lyapunov matrix, then solves the
/// closed-loop inequality (affine in the controller for fixed Lyapunov
/// matrix) as one more LMI. Post-verified; throws on failure.
StateSpace reconstruct_controller(const GeneralizedPlant& plant, const Matrix& x,
                                  const Matrix& y, const Config& cfg = {});

/// Map a stable Youla parameter to algorithm matrices and verify the
/// resulting closed loop against T1 + T2 Q T3.
AlgorithmRealization youla_to_algorithm(const StateSpace& q, const FunctionClass& fc,
                                        double rho, const Config& cfg = {});

/// The design plant closed by the de-weighted algorithm controller.
GeneralizedPlant algorithm_plant(const FunctionClass& fc, double rho, int d);

struct SynthesisOutput {
  AlgorithmRealization algorithm;      ///< after minimal-order trimming
  AlgorithmRealization raw;            ///< untouched reconstruction
  RateCertificate certificate;         ///< post-certification at the design rate
  ZamesFalbParams lambda;              ///< design multiplier
  double empirical_rate = 0.0;         ///< quick Monte-Carlo spot check
  bool external_theorem_dependent = false;  ///< full class on structured costs
};

/// End-to-end design: feasibility, controller reconstruction, Youla
/// conversion, assembly, post-certification, and a simulation spot check.
SynthesisOutput synthesize(const FunctionClass& fc, double rho, int ell,
                           MultiplierClass class_tag, const Config& cfg = {});

/// Design for Hessian-bounded classes via the congruence substitution
/// T = (L_f - M_f)^{-1/2}; reduces exactly to synthesize() for
/// M_f = m I, L_f = L I.
SynthesisOutput synthesize_structured(const FunctionClass& fc, double rho, int ell,
                                      MultiplierClass class_tag, const Config& cfg = {});

/// Bisection over pick_feasible (repeated class) or synthesis_feasible.
struct RateSearchResult {
  bool ok = false;
  double rho_star = 1.0;
  std::string reason;
};
RateSearchResult bisect_design_rate(const FunctionClass& fc, int ell,
                                    MultiplierClass class_tag, const Config& cfg = {});

}  // namespace synthesis
}  // namespace ratesyn

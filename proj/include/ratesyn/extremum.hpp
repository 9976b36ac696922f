#pragma once

#include <optional>

#include "ratesyn/synthesis.hpp"

namespace ratesyn {
namespace extremum {

/// Given dynamics around the gradient loop: a system to be steered (d
/// outputs) and an optional auxiliary measurement system sharing the input.
struct ExtremumPlant {
  Matrix a_g, b_g;
  Matrix c_g1, d_g1;  // steered output z
  Matrix c_g2;        // auxiliary output v (zero feedthrough)
  int d = 1, nu = 1, nv = 0;

  int ng() const { return static_cast<int>(a_g.rows()); }
  Matrix stacked_output() const;

  static ExtremumPlant from_systems(const StateSpace& g1,
                                    const std::optional<StateSpace>& g2 = std::nullopt);
};

enum class LoopConfig {
  SteeredOutput,   ///< gradient taken at the plant output, integrator on w
  ControllerOutput ///< gradient taken at the controller output
};

/// Generalized plant with the integrator adjoined so every stabilizing
/// controller yields the required loop structure.
GeneralizedPlant build_generalized_plant(const ExtremumPlant& ep);

/// Generalized plant for optimizing the controller output: the measurement
/// is the integrated plant response and the performance channel is u itself.
GeneralizedPlant build_output_opt_plant(const StateSpace& g);

/// Rate-weighted plant blocks.
GeneralizedPlant weighted_plant(const GeneralizedPlant& gp, const FunctionClass& fc,
                                double rho);

struct StabilizabilityReport {
  bool ok = false;
  std::string reason;
};

/// Three conditions for a stabilizing controller of the weighted plant to
/// exist: mode controllability and observability outside radius rho, and the
/// full-row-rank steady-state condition (no invariant zero at one).
StabilizabilityReport stabilizability_check(const ExtremumPlant& ep, double rho,
                                            const Config& cfg = {});

/// Stable coprime-factor blocks from Riccati-designed stabilizers.
struct YoulaBlocks {
  StateSpace t1, t2, t3;
  Matrix feedback;   // M~
  Matrix injection;  // L~
};
YoulaBlocks youla_factorization(const GeneralizedPlant& wp, const Config& cfg = {});

/// Plant blocks of the convexified interconnection. Block one collects the
/// states that are unreachable from the control, block two the rest.
struct StructuredPlant {
  Matrix a1, a2, b11, b22, c12, c21, e, f;
  Matrix t1_c, t1_d;  // output data of the filtered channel
  int nf = 0, d = 1;

  int n1() const { return static_cast<int>(a1.rows()); }
  int n2() const { return static_cast<int>(a2.rows()); }
  AffineExpr c11_expr(const lmi::LmiProblem::ZfHandles& h) const;
  AffineExpr d1_expr(const lmi::LmiProblem::ZfHandles& h) const;
};

StructuredPlant structured_plant(const YoulaBlocks& yb, int ell, int d);

struct ExtremumSynthesisResult {
  lmi::SdpSolution::Status status = lmi::SdpSolution::Status::Inconclusive;
  double margin = 0.0;
  std::optional<ZamesFalbParams> lambda;
  std::string reason;
  bool external_theorem_dependent = false;

  bool feasible() const { return status == lmi::SdpSolution::Status::Feasible; }
};

/// Convexified synthesis conditions on a weighted generalized plant.
ExtremumSynthesisResult extremum_synthesis_plant(const GeneralizedPlant& wp,
                                                 const FunctionClass& fc, double rho,
                                                 int ell, const Config& cfg = {},
                                                 MultiplierClass class_tag =
                                                     MultiplierClass::Repeated);

/// Convenience wrapper for the steered-output configuration.
ExtremumSynthesisResult extremum_synthesis(const ExtremumPlant& ep, const FunctionClass& fc,
                                           double rho, int ell, const Config& cfg = {},
                                           MultiplierClass class_tag =
                                               MultiplierClass::Repeated);

/// Gradient-channel and auxiliary-channel controller blocks; the gradient
/// channel carries the integrator factor so its feedthrough vanishes.
struct ExtremumController {
  StateSpace joint;  ///< inputs (w, v)
  StateSpace k1;     ///< w-channel view
  StateSpace k2;     ///< v-channel view (empty input when nv = 0)
};

/// Reconstruct the controller on the multiplier-weighted plant, de-weight
/// the state blocks, and attach the integrator factor. The assembled loop is
/// re-certified; failure is a hard error.
ExtremumController assemble_extremum_controller(const ExtremumPlant& ep,
                                                const FunctionClass& fc, double rho,
                                                int ell, const ZamesFalbParams& lambda,
                                                const Config& cfg = {});

/// Closed gradient loop z = G w of plant and controller (zero feedthrough).
StateSpace closed_loop(const ExtremumPlant& ep, const ExtremumController& k);

/// Controllable-canonical realization of num(z)/den(z) (strictly proper or
/// biproper, monic denominator after normalization).
StateSpace tf_realization(const std::vector<double>& num, const std::vector<double>& den);

/// MIMO assembly from a grid of SISO transfer systems.
StateSpace mimo_from_grid(const std::vector<std::vector<StateSpace>>& grid);

/// Named example plants.
ExtremumPlant example_pole_family(double p);
ExtremumPlant example_delay(int nu);
StateSpace example_mimo_sex3();

struct SweepRow {
  std::string example;
  double param = 0.0;
  double kappa = 0.0;
  int ell = 0;
  double rho_star = 1.1;
  std::string status;
  double margin = 0.0;
};

struct BisectEcOptions {
  double lower = 1e-3;
  double upper = 1.1;  ///< values above one report "no certificate <= 1"
};

/// Bisection of the achievable rate for one harness cell.
SweepRow bisect_extremum_rate(const std::string& example, double param,
                              const FunctionClass& fc, int ell, const Config& cfg = {},
                              MultiplierClass class_tag = MultiplierClass::Repeated,
                              const BisectEcOptions& opts = {});

/// Run a named example family over (parameter, kappa, ell) grids; per-cell
/// failures are recorded in the table and the run continues.
std::vector<SweepRow> example_harness(const std::string& example,
                                      const std::vector<double>& params,
                                      const std::vector<double>& kappas,
                                      const std::vector<int>& ells, const Config& cfg = {},
                                      MultiplierClass class_tag = MultiplierClass::Repeated);

}  // namespace extremum
}  // namespace ratesyn

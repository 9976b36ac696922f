#pragma once

namespace ratesyn {

/// Numerical tolerances and solver limits shared across the library.
/// Defaults are the documented values; callers may pass adjusted copies.
struct Config {
  /// Strictness threshold for Schur tests: spectral radius must be < 1 - tol_schur.
  double tol_schur = 1e-10;
  /// Relative tolerance for rank decisions (kernel bases, staircase forms).
  double rank_rtol = 1e-12;
  /// Feasibility threshold on the optimal margin of an LMI solve.
  double tol_feas = 1e-7;
  /// Bisection width on convergence rates.
  double tol_bisect = 1e-4;
  /// Norm bound on all scalarized decision variables (box |v_i| <= var_bound).
  double var_bound = 1e6;
  /// Cap on the uniform margin variable; classification only needs its sign,
  /// so capping keeps homogeneous problems well scaled.
  double margin_cap = 1.0;
  /// Condition-number threshold for inverting feedthrough matrices.
  double cond_limit = 1e12;
  /// Interior-point iteration limit.
  int max_iterations = 100;
  /// Horizon for finite-horizon IQC inner products.
  int iqc_horizon = 200;
  /// Default simulation horizon.
  int sim_horizon = 500;
  /// State norm above which a trajectory is flagged divergent.
  double divergence_limit = 1e12;
  /// Tolerance used when trimming nearly unreachable/unobservable states.
  double minreal_tol = 1e-8;
};

}  // namespace ratesyn

#pragma once

#include <functional>
#include <random>

#include "ratesyn/analysis.hpp"
#include "ratesyn/multiplier.hpp"

namespace ratesyn {
namespace sim {

/// Objective with gradient oracle and known minimizer. Quadratics carry the
/// minimizer exactly; other kinds compute it with a long reference descent.
struct Objective {
  enum class Kind { Quadratic, LogisticRidge, Custom };
  Kind kind = Kind::Quadratic;
  int d = 1;
  double m = 1.0, L = 10.0;

  Matrix hessian;  // quadratic
  Vector offset;

  Matrix data_x;  // logistic ridge
  Vector data_y;
  double ridge = 1.0;

  std::function<Vector(const Vector&)> custom_grad;

  Vector minimizer;

  Vector gradient(const Vector& z) const;

  static Objective quadratic(const Matrix& h, const Vector& b, double m, double L);
  /// Random quadratic with Hessian eigenvalues pinned at {m, L} (the
  /// worst-case instances for these classes) or spread over [m, L].
  static Objective random_quadratic(const FunctionClass& fc, std::mt19937& rng,
                                    bool pin_extremes);
  static Objective logistic_ridge(const Matrix& x, const Vector& y, double ridge,
                                  const Config& cfg = {});
};

struct Trajectory {
  std::vector<Vector> states;
  std::vector<Vector> outputs;
  std::vector<Vector> gradients;
  std::vector<double> distance;  // ||z_k - z*||
  bool divergent = false;
};

/// Run x+ = A x + B grad f(C x) for N steps from x0.
Trajectory run(const AlgorithmRealization& alg, const Objective& obj, const Vector& x0,
               int steps, const Config& cfg = {});

/// Least-squares exponent fit over the tail half of the usable samples.
/// Throws if fewer than 20 samples exceed the 1e-12 floor.
double estimate_rate(const Trajectory& traj);

/// Worst empirical rate of an algorithm over random quadratics.
struct MonteCarloResult {
  double rho_max = 0.0;
  double rho_median = 0.0;
  int divergences = 0;
};
MonteCarloResult monte_carlo_rate(const AlgorithmRealization& alg, const FunctionClass& fc,
                                  int seeds, int horizon, const Config& cfg = {},
                                  unsigned base_seed = 1234);

/// One gradient sample g from the shifted class (zero lower curvature,
/// Lipschitz constant L - m).
struct GradientSample {
  std::function<Vector(const Vector&)> grad;
  std::string description;
};

/// Quadratic and scalar piecewise-smooth members of the shifted class.
std::vector<GradientSample> sample_shifted_gradients(const FunctionClass& fc, int count,
                                                     std::mt19937& rng);

/// Finite-horizon filtered inner product for the multiplier positivity
/// property: runs the loop transformation on random square-summable inputs
/// and returns the minimum of <Pi(Lambda) z~, w~> over the samples. The
/// infinite sums are truncated at `horizon` (documented bias).
double iqc_check(const ZamesFalbParams& params, const FunctionClass& fc, double rho,
                 const std::vector<GradientSample>& samples, int horizon,
                 std::mt19937& rng, int signals_per_sample = 3);

}  // namespace sim
}  // namespace ratesyn

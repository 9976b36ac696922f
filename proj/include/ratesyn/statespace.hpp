#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>

#include "ratesyn/config.hpp"

namespace ratesyn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Discrete-time linear system x+ = A x + B w, z = C x + D w.
///
/// All matrices are dense real doubles. n = 0 (empty state) is a first-class
/// citizen and encodes a static gain, so degenerate interconnections need no
/// special casing downstream.
struct StateSpace {
  Matrix a;  ///< n x n
  Matrix b;  ///< n x m
  Matrix c;  ///< p x n
  Matrix d;  ///< p x m

  StateSpace() = default;
  StateSpace(Matrix a_, Matrix b_, Matrix c_, Matrix d_);

  /// Static gain with empty state.
  static StateSpace gain(const Matrix& d);
  /// Static scalar gain replicated on the diagonal.
  static StateSpace scaled_identity(int size, double value);
  /// Discrete integrator block of dimension dim: (I, I, I, 0).
  static StateSpace integrator(int dim);

  int states() const { return static_cast<int>(a.rows()); }
  int inputs() const { return static_cast<int>(d.cols()); }
  int outputs() const { return static_cast<int>(d.rows()); }

  /// C (zI - A)^{-1} B + D. Throws if z is an eigenvalue of A.
  ComplexMatrix frequency_response(std::complex<double> z) const;
};

/// Series interconnection g1 * g2 (output of g2 feeds g1).
StateSpace series(const StateSpace& g1, const StateSpace& g2);

/// Parallel interconnection g1 + g2 (matching dimensions).
StateSpace parallel(const StateSpace& g1, const StateSpace& g2);

/// Inverse system; requires square, well-conditioned D.
StateSpace inverse(const StateSpace& g, const Config& cfg = {});

/// State-coordinate change xi = T^{-1} x mapping (A,B,C,D) to
/// (T^{-1}AT, T^{-1}B, CT, D). Response-preserving.
StateSpace coordinate_change(const StateSpace& g, const Matrix& t);

/// Vertical concatenation: same input, stacked outputs.
StateSpace stack_outputs(const StateSpace& g1, const StateSpace& g2);

struct SchurResult {
  bool schur = false;
  double spectral_radius = 0.0;
};

/// Spectral-radius test: true iff all eigenvalues satisfy |lambda| < 1 - tol.
SchurResult is_schur(const Matrix& a, const Config& cfg = {});

enum class HautusMode { Stabilizable, Detectable };

/// Hautus rank test. For Stabilizable checks rank [lambda I - A, B] = n at
/// every eigenvalue with |lambda| >= disc_radius; Detectable uses the stacked
/// form with C. disc_radius defaults to the unit circle.
bool hautus(const Matrix& a, const Matrix& bc, HautusMode mode,
            double disc_radius = 1.0, const Config& cfg = {});

}  // namespace ratesyn

#pragma once

#include "ratesyn/statespace.hpp"

namespace ratesyn {

/// Orthonormal basis of ker(m) via SVD with tolerance rank_rtol * ||m||.
/// Returns an n x k matrix with full column rank; k = 0 for injective m.
/// A positive abs_tol overrides the relative threshold (useful when the
/// caller knows the natural scale, e.g. for A - I with ||A|| ~ 1).
Matrix kernel_basis(const Matrix& m, const Config& cfg = {}, double abs_tol = -1.0);

/// Solve a1 X - X a2 + q = 0. Requires disjoint spectra; the residual is
/// checked against 1e-10 * ||q||.
Matrix sylvester_solve(const Matrix& a1, const Matrix& a2, const Matrix& q);

/// Stabilizing solution of the discrete Lyapunov equation A X A^T - X + Q = 0.
Matrix dlyap(const Matrix& a, const Matrix& q);

/// Stabilizing solution of the discrete Riccati equation
/// X = A^T X A - A^T X B (R + B^T X B)^{-1} B^T X A + Q
/// via the structure-preserving doubling algorithm.
Matrix dare(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r);

/// State feedback M with A + B M Schur, from the unit-weight Riccati design.
Matrix stabilizing_feedback(const Matrix& a, const Matrix& b);

/// Output injection L with A + L C Schur (dual Riccati design).
Matrix stabilizing_injection(const Matrix& a, const Matrix& c);

/// Symmetric positive (semi)definite square root.
Matrix psd_sqrt(const Matrix& m);

/// Inverse square root of a symmetric positive definite matrix.
Matrix spd_inv_sqrt(const Matrix& m);

/// Orthonormal basis of the reachable subspace of (A, B).
Matrix reachable_subspace(const Matrix& a, const Matrix& b, double tol);

/// Restriction of g to its observable part (z-trajectories are preserved).
StateSpace observable_part(const StateSpace& g, double tol);

/// Reachable-and-observable restriction; response-preserving up to tol.
StateSpace minimal_realization(const StateSpace& g, double tol);

/// Kronecker product m1 (x) m2.
Matrix kron(const Matrix& m1, const Matrix& m2);

/// Check m == factor (x) I_d for some factor; returns true and the factor on
/// success. Entries are compared against atol.
bool kron_identity_factor(const Matrix& m, int d, Matrix& factor, double atol = 1e-12);

}  // namespace ratesyn

#pragma once

#include <vector>

#include "ratesyn/statespace.hpp"

namespace ratesyn {

enum class MultiplierClass { Repeated, Full };

/// Coefficient tuple of a causal FIR Zames-Falb multiplier of length ell and
/// block dimension d. blocks[i] holds Lambda_i, i = 0..ell (Lambda_0 is the
/// feedthrough coefficient).
struct ZamesFalbParams {
  std::vector<Matrix> blocks;
  double rho = 0.0;
  MultiplierClass class_tag = MultiplierClass::Repeated;
  int block_dim = 1;

  int length() const { return static_cast<int>(blocks.size()) - 1; }

  /// Repeated-class parameters lambda_i * I_d from scalars (index 0 = lambda_0).
  static ZamesFalbParams repeated(const std::vector<double>& lambda, double rho, int d);
};

/// FIR filter realization of the multiplier: nilpotent block-shift state
/// matrix, output row [Lambda_ell ... Lambda_1], feedthrough Lambda_0.
struct MultiplierFilter {
  Matrix a_f;  ///< (ell*d) x (ell*d) shift register
  Matrix b_f;  ///< (ell*d) x d
  Matrix c_f;  ///< d x (ell*d)
  Matrix d_f;  ///< d x d

  StateSpace to_statespace() const { return StateSpace(a_f, b_f, c_f, d_f); }
};

/// Realize the FIR multiplier for the given coefficients. For ell = 0 the
/// result is the static gain Lambda_0 with empty state.
MultiplierFilter build_fir(const ZamesFalbParams& params);

/// Shift-register blocks (A_f, B_f) alone, for assembling constraints where
/// the output row stays a decision variable.
MultiplierFilter fir_skeleton(int ell, int d);

struct MembershipResult {
  bool member = false;
  std::vector<std::string> violations;
};

/// Test the four elementwise conditions defining the admissible coefficient
/// set at rate rho (off-diagonal signs of Lambda_0, signs of Lambda_i for
/// i >= 1, and the two weighted row/column sum conditions). Boundary cases
/// count as members; tolerance 1e-12. Repeated-class inputs additionally
/// verify the scalar * I structure.
MembershipResult is_member(const ZamesFalbParams& params, double tol = 1e-12);

/// One scalar linear inequality a0 + a . theta >= 0 over the free multiplier
/// parameterization (theta as produced by free_parameter_count ordering).
struct LinearInequality {
  Vector coeffs;
  double constant = 0.0;
  std::string label;
};

/// Number of free scalars: ell + 1 for the repeated class, (ell + 1) d^2 for
/// the full class (entries stored block-major, row-major inside each block,
/// Lambda_0 first).
int free_parameter_count(MultiplierClass class_tag, int ell, int d);

/// Assemble Lambda blocks from a free-parameter vector theta.
std::vector<Matrix> blocks_from_parameters(MultiplierClass class_tag, int ell, int d,
                                           const Vector& theta);

/// Linear-inequality description of the admissible set over the free
/// parameterization, suitable for appending to an LMI problem.
std::vector<LinearInequality> constraint_generators(MultiplierClass class_tag, int ell,
                                                    int d, double rho);

/// Congruence-transformed class {T Lambda T^T}: membership of params is
/// tested by pulling the blocks back through T^{-1} (.) T^{-T}.
struct TransformedClass {
  Matrix t;
  MultiplierClass base_class = MultiplierClass::Repeated;
  double rho = 0.0;
  int block_dim = 1;

  ZamesFalbParams pull_back(const ZamesFalbParams& params) const;
  MembershipResult is_member(const ZamesFalbParams& params, double tol = 1e-12) const;
};

TransformedClass transform_class(MultiplierClass base_class, double rho, int d,
                                 const Matrix& t);

}  // namespace ratesyn

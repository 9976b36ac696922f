#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ratesyn/affine.hpp"
#include "ratesyn/conesolver.hpp"
#include "ratesyn/multiplier.hpp"

namespace ratesyn {
namespace lmi {

enum class VarKind { Symmetric, General, ZamesFalb };

/// Descriptor of a Zames-Falb coefficient variable. Coordinates are the free
/// parameters of the base class; the filter output rows use the congruence
/// transformed blocks T Lambda T^T (transform defaults to the identity).
struct ZfVarDesc {
  MultiplierClass class_tag = MultiplierClass::Repeated;
  int ell = 0;
  int d = 1;
  double rho = 0.5;
  Matrix transform;           // empty means identity
  bool add_membership = true; // append the admissible-set inequalities
};

struct DecisionVar {
  std::string name;
  VarKind kind = VarKind::Symmetric;
  int n = 0;           // symmetric size
  int rows = 0, cols = 0;  // general size
  ZfVarDesc zf;

  int dim() const;
};

enum class Sense { PositiveDefinite, NegativeDefinite };

struct LmiConstraint {
  AffineExpr expr;
  Sense sense = Sense::PositiveDefinite;
  std::string label;
  /// Strictness margin applies (the paper's strict inequalities). Side
  /// constraints like the multiplier set are closed and carry no margin.
  bool with_margin = true;
};

struct ElementwiseConstraint {
  AffineExpr expr;  // entries >= 0
  std::string label;
};

enum class ObjectiveKind { FeasibilityMargin, Maximize, Minimize };

struct SdpSolution {
  enum class Status { Feasible, Infeasible, Inconclusive };
  Status status = Status::Inconclusive;
  double margin = 0.0;           ///< optimal uniform strictness margin t
  double verified_margin = 0.0;  ///< eigenvalue recheck over all constraints
  int iterations = 0;
  double gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  std::string diagnostics;
  Assignment assignment;

  Matrix matrix_value(const std::string& name, const struct LmiProblem& problem) const;
  ZamesFalbParams zf_value(const std::string& name, const struct LmiProblem& problem) const;
};

/// Affine matrix-inequality feasibility problem over named decision
/// variables. Strict constraints are closed by maximizing a uniform margin.
struct LmiProblem {
  std::vector<DecisionVar> vars;
  std::vector<LmiConstraint> constraints;
  std::vector<ElementwiseConstraint> elementwise;
  ObjectiveKind objective = ObjectiveKind::FeasibilityMargin;
  Assignment objective_coeffs;  // used for Maximize / Minimize

  AffineExpr add_symmetric(const std::string& name, int n);
  AffineExpr add_general(const std::string& name, int rows, int cols);

  struct ZfHandles {
    AffineExpr c_f;  ///< d x (ell d) output rows of the transformed filter
    AffineExpr d_f;  ///< d x d feedthrough of the transformed filter
  };
  ZfHandles add_zames_falb(const std::string& name, const ZfVarDesc& desc);

  void add_constraint(AffineExpr expr, Sense sense, std::string label,
                      bool with_margin = true);
  void add_elementwise(AffineExpr expr, std::string label);

  const DecisionVar& find(const std::string& name) const;
  int total_coords() const;

  /// Assemble the cone program (margin variable appended last when the
  /// objective is FeasibilityMargin).
  ConeProblem assemble(const Config& cfg) const;
};

SdpSolution solve(const LmiProblem& problem, const Config& cfg = {},
                  ConeBackend* backend = nullptr);

/// P-blocks of a quadratic performance index [Q S; S^T R].
struct PBlocks {
  Matrix q, s, r;
  /// Passivity / strict-negative-realness choice Q = R = 0, S = I.
  static PBlocks snr(int d);
};

/// KYP-form constraint for z = G w with Lyapunov variable expression x_expr:
///   [A B; I 0]^T blkdiag(X, -X) [A B; I 0] + [C D; 0 I]^T P [C D; 0 I]
/// Returned as the left-hand side; callers add it with sense NegativeDefinite.
/// Output rows may be affine in decision variables provided Q = 0.
AffineExpr kyp_constraint(const Matrix& a, const Matrix& b, const AffineExpr& c_expr,
                          const AffineExpr& d_expr, const PBlocks& p,
                          const AffineExpr& x_expr);
AffineExpr kyp_constraint(const StateSpace& g, const PBlocks& p, const AffineExpr& x_expr);

/// Rewrite a problem whose data all carry the Kronecker structure M (x) I_d
/// as the equivalent d = 1 problem. Solutions expand by X -> X (x) I_d.
LmiProblem structural_kron_reduce(const LmiProblem& problem, int d);

/// Expand a reduced assignment back to block dimension d.
Assignment kron_expand_assignment(const LmiProblem& reduced, const Assignment& a, int d);

}  // namespace lmi
}  // namespace ratesyn

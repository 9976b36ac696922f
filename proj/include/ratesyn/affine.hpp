#pragma once

#include <initializer_list>
#include <map>
#include <string>
#include <vector>

#include "ratesyn/statespace.hpp"

namespace ratesyn {

/// Scalarized variable assignment: one coordinate vector per named variable.
using Assignment = std::map<std::string, Vector>;

/// Matrix-valued expression that is affine in named scalar coordinates:
///   expr(theta) = constant + sum_v sum_k theta_{v,k} * image_{v,k}.
/// Images are stored densely; problems in scope are small.
class AffineExpr {
 public:
  AffineExpr() = default;
  explicit AffineExpr(Matrix constant) : constant_(std::move(constant)) {}

  static AffineExpr zero(int rows, int cols) { return AffineExpr(Matrix::Zero(rows, cols)); }

  /// Expression equal to a variable with the given per-coordinate images.
  static AffineExpr from_var(const std::string& name, const Matrix& constant,
                             std::vector<Matrix> images);

  int rows() const { return static_cast<int>(constant_.rows()); }
  int cols() const { return static_cast<int>(constant_.cols()); }
  const Matrix& constant_term() const { return constant_; }
  const std::map<std::string, std::vector<Matrix>>& coefficients() const { return coeffs_; }
  bool depends_on(const std::string& name) const { return coeffs_.count(name) > 0; }

  Matrix eval(const Assignment& assignment) const;

  AffineExpr operator+(const AffineExpr& other) const;
  AffineExpr operator-(const AffineExpr& other) const;
  AffineExpr operator-() const { return scaled(-1.0); }
  AffineExpr scaled(double s) const;
  AffineExpr left_mul(const Matrix& l) const;   // L * expr
  AffineExpr right_mul(const Matrix& r) const;  // expr * R
  AffineExpr transpose() const;
  /// expr + expr^T
  AffineExpr sym() const { return *this + transpose(); }
  /// T^T * expr * T
  AffineExpr congruence(const Matrix& t) const { return left_mul(t.transpose()).right_mul(t); }

  /// Dense block assembly from a grid of expressions (rows of equal height).
  static AffineExpr block(const std::vector<std::vector<AffineExpr>>& grid);

 private:
  Matrix constant_{Matrix::Zero(0, 0)};
  std::map<std::string, std::vector<Matrix>> coeffs_;
};

/// Coordinate packing for symmetric matrix variables: upper triangle by rows,
/// coordinate value = matrix entry.
Vector pack_symmetric(const Matrix& m);
Matrix unpack_symmetric(const Vector& v, int n);
int symmetric_dim(int n);

/// Coordinate images of a symmetric n x n variable (basis matrices).
std::vector<Matrix> symmetric_images(int n);
/// Coordinate images of a general rows x cols variable (row-major entries).
std::vector<Matrix> general_images(int rows, int cols);

}  // namespace ratesyn

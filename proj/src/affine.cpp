#include "ratesyn/affine.hpp"

#include <stdexcept>

namespace ratesyn {

AffineExpr AffineExpr::from_var(const std::string& name, const Matrix& constant,
                                std::vector<Matrix> images) {
  AffineExpr e(constant);
  e.coeffs_[name] = std::move(images);
  return e;
}

Matrix AffineExpr::eval(const Assignment& assignment) const {
  Matrix out = constant_;
  for (const auto& [name, images] : coeffs_) {
    auto it = assignment.find(name);
    if (it == assignment.end())
      throw std::invalid_argument("AffineExpr::eval: missing assignment for " + name);
    if (it->second.size() != static_cast<Eigen::Index>(images.size()))
      throw std::invalid_argument("AffineExpr::eval: coordinate count mismatch for " + name);
    for (size_t k = 0; k < images.size(); ++k) out += it->second(k) * images[k];
  }
  return out;
}

AffineExpr AffineExpr::operator+(const AffineExpr& other) const {
  if (rows() != other.rows() || cols() != other.cols())
    throw std::invalid_argument("AffineExpr: size mismatch in addition");
  AffineExpr out(constant_ + other.constant_);
  out.coeffs_ = coeffs_;
  for (const auto& [name, images] : other.coeffs_) {
    auto it = out.coeffs_.find(name);
    if (it == out.coeffs_.end()) {
      out.coeffs_[name] = images;
    } else {
      if (it->second.size() != images.size())
        throw std::invalid_argument("AffineExpr: coordinate count mismatch for " + name);
      for (size_t k = 0; k < images.size(); ++k) it->second[k] += images[k];
    }
  }
  return out;
}

AffineExpr AffineExpr::operator-(const AffineExpr& other) const {
  return *this + other.scaled(-1.0);
}

AffineExpr AffineExpr::scaled(double s) const {
  AffineExpr out(s * constant_);
  out.coeffs_ = coeffs_;
  for (auto& [name, images] : out.coeffs_)
    for (auto& img : images) img *= s;
  return out;
}

AffineExpr AffineExpr::left_mul(const Matrix& l) const {
  if (l.cols() != rows()) throw std::invalid_argument("AffineExpr::left_mul: size mismatch");
  AffineExpr out(l * constant_);
  out.coeffs_ = coeffs_;
  for (auto& [name, images] : out.coeffs_)
    for (auto& img : images) img = (l * img).eval();
  return out;
}

AffineExpr AffineExpr::right_mul(const Matrix& r) const {
  if (cols() != r.rows()) throw std::invalid_argument("AffineExpr::right_mul: size mismatch");
  AffineExpr out(constant_ * r);
  out.coeffs_ = coeffs_;
  for (auto& [name, images] : out.coeffs_)
    for (auto& img : images) img = (img * r).eval();
  return out;
}

AffineExpr AffineExpr::transpose() const {
  AffineExpr out(constant_.transpose());
  out.coeffs_ = coeffs_;
  for (auto& [name, images] : out.coeffs_)
    for (auto& img : images) img = img.transpose().eval();
  return out;
}

AffineExpr AffineExpr::block(const std::vector<std::vector<AffineExpr>>& grid) {
  if (grid.empty()) return AffineExpr(Matrix::Zero(0, 0));
  int total_rows = 0, total_cols = 0;
  for (const auto& e : grid[0]) total_cols += e.cols();
  for (const auto& row : grid) total_rows += row[0].rows();

  AffineExpr out(Matrix::Zero(total_rows, total_cols));
  int roff = 0;
  for (const auto& row : grid) {
    const int rh = row[0].rows();
    int coff = 0;
    for (const auto& e : row) {
      if (e.rows() != rh) throw std::invalid_argument("AffineExpr::block: ragged row");
      Matrix embed_l = Matrix::Zero(total_rows, e.rows());
      embed_l.block(roff, 0, e.rows(), e.rows()) = Matrix::Identity(e.rows(), e.rows());
      Matrix embed_r = Matrix::Zero(e.cols(), total_cols);
      embed_r.block(0, coff, e.cols(), e.cols()) = Matrix::Identity(e.cols(), e.cols());
      out = out + e.left_mul(embed_l).right_mul(embed_r);
      coff += e.cols();
    }
    if (coff != total_cols) throw std::invalid_argument("AffineExpr::block: ragged grid");
    roff += rh;
  }
  return out;
}

int symmetric_dim(int n) { return n * (n + 1) / 2; }

Vector pack_symmetric(const Matrix& m) {
  const int n = static_cast<int>(m.rows());
  Vector v(symmetric_dim(n));
  int idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) v(idx++) = 0.5 * (m(i, j) + m(j, i));
  return v;
}

Matrix unpack_symmetric(const Vector& v, int n) {
  Matrix m(n, n);
  int idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      m(i, j) = v(idx);
      m(j, i) = v(idx);
      ++idx;
    }
  return m;
}

std::vector<Matrix> symmetric_images(int n) {
  std::vector<Matrix> images;
  images.reserve(symmetric_dim(n));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Matrix e = Matrix::Zero(n, n);
      e(i, j) = 1.0;
      e(j, i) = 1.0;
      images.push_back(e);
    }
  return images;
}

std::vector<Matrix> general_images(int rows, int cols) {
  std::vector<Matrix> images;
  images.reserve(rows * cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      Matrix e = Matrix::Zero(rows, cols);
      e(i, j) = 1.0;
      images.push_back(e);
    }
  return images;
}

}  // namespace ratesyn

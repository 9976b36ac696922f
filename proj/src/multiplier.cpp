#include "ratesyn/multiplier.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace ratesyn {

ZamesFalbParams ZamesFalbParams::repeated(const std::vector<double>& lambda, double rho,
                                          int d) {
  ZamesFalbParams p;
  p.rho = rho;
  p.class_tag = MultiplierClass::Repeated;
  p.block_dim = d;
  p.blocks.reserve(lambda.size());
  for (double l : lambda) p.blocks.push_back(l * Matrix::Identity(d, d));
  return p;
}

MultiplierFilter fir_skeleton(int ell, int d) {
  if (ell < 0 || d < 1) throw std::invalid_argument("fir_skeleton: need ell >= 0, d >= 1");
  MultiplierFilter f;
  const int n = ell * d;
  f.a_f = Matrix::Zero(n, n);
  for (int i = 0; i + 1 < ell; ++i)
    f.a_f.block(i * d, (i + 1) * d, d, d) = Matrix::Identity(d, d);
  f.b_f = Matrix::Zero(n, d);
  if (ell > 0) f.b_f.bottomRows(d) = Matrix::Identity(d, d);
  f.c_f = Matrix::Zero(d, n);
  f.d_f = Matrix::Zero(d, d);
  return f;
}

MultiplierFilter build_fir(const ZamesFalbParams& params) {
  const int ell = params.length();
  const int d = params.block_dim;
  if (ell < 0) throw std::invalid_argument("build_fir: empty coefficient list");
  for (const auto& b : params.blocks)
    if (b.rows() != d || b.cols() != d)
      throw std::invalid_argument("build_fir: block dimension mismatch");
  MultiplierFilter f = fir_skeleton(ell, d);
  // Output row [Lambda_ell ... Lambda_1]; state block j delays the input by
  // ell - j steps, so the oldest tap sits leftmost.
  for (int j = 0; j < ell; ++j) f.c_f.middleCols(j * d, d) = params.blocks[ell - j];
  f.d_f = params.blocks[0];
  return f;
}

namespace {

bool is_scaled_identity(const Matrix& m, double tol, double* scalar) {
  const int d = static_cast<int>(m.rows());
  const double s = m.trace() / d;
  if ((m - s * Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > tol) return false;
  if (scalar) *scalar = s;
  return true;
}

}  // namespace

MembershipResult is_member(const ZamesFalbParams& params, double tol) {
  MembershipResult r;
  const int ell = params.length();
  const int d = params.block_dim;
  if (ell < 0 || d < 1) {
    r.violations.push_back("empty parameter tuple");
    return r;
  }
  if (params.rho <= 0.0 || params.rho >= 1.0)
    r.violations.push_back("rho outside (0,1)");

  if (params.class_tag == MultiplierClass::Repeated) {
    for (int i = 0; i <= ell; ++i)
      if (!is_scaled_identity(params.blocks[i], tol, nullptr))
        r.violations.push_back("block " + std::to_string(i) +
                               " is not a scaled identity (repeated class)");
  }

  // Off-diagonal entries of Lambda_0 must be nonpositive.
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (i != j && params.blocks[0](i, j) > tol)
        r.violations.push_back("positive off-diagonal entry in block 0");

  for (int i = 1; i <= ell; ++i)
    if (params.blocks[i].maxCoeff() > tol)
      r.violations.push_back("positive entry in block " + std::to_string(i));

  Matrix sum_pos = Matrix::Zero(d, d);
  Matrix sum_neg = Matrix::Zero(d, d);
  for (int i = 0; i <= ell; ++i) {
    sum_pos += params.blocks[i] * std::pow(params.rho, i);
    sum_neg += params.blocks[i] * std::pow(params.rho, -i);
  }
  Vector e = Vector::Ones(d);
  if ((sum_pos * e).minCoeff() < -tol)
    r.violations.push_back("row-sum condition sum Lambda_i rho^i e >= 0 violated");
  if ((e.transpose() * sum_neg).minCoeff() < -tol)
    r.violations.push_back("column-sum condition e^T sum Lambda_i rho^-i >= 0 violated");

  r.member = r.violations.empty();
  return r;
}

int free_parameter_count(MultiplierClass class_tag, int ell, int d) {
  return class_tag == MultiplierClass::Repeated ? ell + 1 : (ell + 1) * d * d;
}

std::vector<Matrix> blocks_from_parameters(MultiplierClass class_tag, int ell, int d,
                                           const Vector& theta) {
  if (theta.size() != free_parameter_count(class_tag, ell, d))
    throw std::invalid_argument("blocks_from_parameters: parameter count mismatch");
  std::vector<Matrix> blocks(ell + 1);
  if (class_tag == MultiplierClass::Repeated) {
    for (int i = 0; i <= ell; ++i) blocks[i] = theta(i) * Matrix::Identity(d, d);
  } else {
    for (int i = 0; i <= ell; ++i) {
      blocks[i].resize(d, d);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) blocks[i](r, c) = theta(i * d * d + r * d + c);
    }
  }
  return blocks;
}

std::vector<LinearInequality> constraint_generators(MultiplierClass class_tag, int ell,
                                                    int d, double rho) {
  const int p = free_parameter_count(class_tag, ell, d);
  std::vector<LinearInequality> out;
  auto add = [&](const Vector& coeffs, const std::string& label) {
    out.push_back({coeffs, 0.0, label});
  };

  if (class_tag == MultiplierClass::Repeated) {
    // lambda_i <= 0 for i >= 1 (off-diagonal condition is vacuous for
    // scaled-identity blocks); both weighted sums >= 0.
    for (int i = 1; i <= ell; ++i) {
      Vector v = Vector::Zero(p);
      v(i) = -1.0;
      add(v, "lambda_" + std::to_string(i) + " <= 0");
    }
    Vector vp = Vector::Zero(p), vn = Vector::Zero(p);
    for (int i = 0; i <= ell; ++i) {
      vp(i) = std::pow(rho, i);
      vn(i) = std::pow(rho, -i);
    }
    add(vp, "sum lambda_i rho^i >= 0");
    add(vn, "sum lambda_i rho^-i >= 0");
    return out;
  }

  auto entry = [&](int block, int r, int c) { return block * d * d + r * d + c; };
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c)
      if (r != c) {
        Vector v = Vector::Zero(p);
        v(entry(0, r, c)) = -1.0;
        add(v, "block0 off-diagonal <= 0");
      }
  for (int i = 1; i <= ell; ++i)
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) {
        Vector v = Vector::Zero(p);
        v(entry(i, r, c)) = -1.0;
        add(v, "block" + std::to_string(i) + " entry <= 0");
      }
  for (int r = 0; r < d; ++r) {
    Vector v = Vector::Zero(p);
    for (int i = 0; i <= ell; ++i)
      for (int c = 0; c < d; ++c) v(entry(i, r, c)) = std::pow(rho, i);
    add(v, "weighted row sum >= 0");
  }
  for (int c = 0; c < d; ++c) {
    Vector v = Vector::Zero(p);
    for (int i = 0; i <= ell; ++i)
      for (int r = 0; r < d; ++r) v(entry(i, r, c)) = std::pow(rho, -i);
    add(v, "weighted column sum >= 0");
  }
  return out;
}

ZamesFalbParams TransformedClass::pull_back(const ZamesFalbParams& params) const {
  Eigen::FullPivLU<Matrix> lu(t);
  if (!lu.isInvertible()) throw std::invalid_argument("TransformedClass: singular T");
  Matrix tinv = lu.inverse();
  ZamesFalbParams base = params;
  base.class_tag = base_class;
  for (auto& b : base.blocks) b = tinv * b * tinv.transpose();
  return base;
}

MembershipResult TransformedClass::is_member(const ZamesFalbParams& params,
                                             double tol) const {
  return ratesyn::is_member(pull_back(params), tol);
}

TransformedClass transform_class(MultiplierClass base_class, double rho, int d,
                                 const Matrix& t) {
  if (t.rows() != d || t.cols() != d)
    throw std::invalid_argument("transform_class: T must be d x d");
  Eigen::FullPivLU<Matrix> lu(t);
  if (!lu.isInvertible()) throw std::invalid_argument("transform_class: singular T");
  return TransformedClass{t, base_class, rho, d};
}

}  // namespace ratesyn

#pragma once

#include <utility>
#include <vector>

#include "clocklmi/polymat.hpp"

namespace clocklmi {

/// Scalar affine expression c + sum_i a_i y_i over decision variables,
/// with a sparse linear part kept sorted by variable index.
class AffExpr {
public:
  AffExpr() = default;
  AffExpr(double c) : c_(c) {}  // NOLINT(google-explicit-constructor)
  static AffExpr variable(int var, double coeff = 1.0);

  double constant() const { return c_; }
  const std::vector<std::pair<int, double>>& terms() const { return lin_; }
  bool is_constant() const { return lin_.empty(); }

  double eval(const Vector& y) const;

  AffExpr& operator+=(const AffExpr& o);
  AffExpr& operator-=(const AffExpr& o);
  AffExpr& operator*=(double s);
  AffExpr operator+(const AffExpr& o) const { AffExpr r = *this; r += o; return r; }
  AffExpr operator-(const AffExpr& o) const { AffExpr r = *this; r -= o; return r; }
  AffExpr operator*(double s) const { AffExpr r = *this; r *= s; return r; }
  AffExpr operator-() const { return *this * -1.0; }
  friend AffExpr operator*(double s, const AffExpr& e) { return e * s; }

private:
  double c_ = 0.0;
  std::vector<std::pair<int, double>> lin_;
};

/// Dense matrix of affine expressions.
class AffMat {
public:
  AffMat() = default;
  AffMat(int rows, int cols) : rows_(rows), cols_(cols), e_(static_cast<size_t>(rows) * cols) {}
  static AffMat from_const(const Matrix& m);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  AffExpr& operator()(int i, int j) { return e_[static_cast<size_t>(i) * cols_ + j]; }
  const AffExpr& operator()(int i, int j) const { return e_[static_cast<size_t>(i) * cols_ + j]; }

  Matrix eval(const Vector& y) const;
  Matrix constant_part() const;

  AffMat transpose() const;
  AffMat operator+(const AffMat& o) const;
  AffMat operator-(const AffMat& o) const;
  AffMat operator-() const;
  AffMat operator*(double s) const;
  friend AffMat operator*(const Matrix& m, const AffMat& a);  // m * A
  friend AffMat operator*(const AffMat& a, const Matrix& m);  // A * m

  /// (A + A^T)/2
  AffMat symmetrized() const;

  void paste(int i0, int j0, const AffMat& b);
  static AffMat block2x2(const AffMat& a11, const AffMat& a12,
                         const AffMat& a21, const AffMat& a22);

private:
  int rows_ = 0, cols_ = 0;
  std::vector<AffExpr> e_;
};

/// Polynomial matrix in the clock whose coefficients are affine in the
/// decision variables. This is the intermediate form every clock-dependent
/// inequality is assembled in before sum-of-squares compilation.
class APolyMat {
public:
  APolyMat() = default;
  explicit APolyMat(std::vector<AffMat> coeffs);
  static APolyMat from_const(const PolyMat& p);
  static APolyMat from_mat(const AffMat& m);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  AffMat coeff(int k) const;
  const std::vector<AffMat>& coeffs() const { return coeffs_; }

  /// Constant-in-tau part, i.e. the value at clock zero (still affine in y).
  APolyMat at_zero() const;

  APolyMat derivative() const;
  APolyMat transpose() const;
  APolyMat symmetrized() const;

  PolyMat eval_vars(const Vector& y) const;

  APolyMat operator+(const APolyMat& o) const;
  APolyMat operator-(const APolyMat& o) const;
  APolyMat operator-() const;
  APolyMat operator*(double s) const;
  friend APolyMat operator*(const Matrix& m, const APolyMat& a);
  friend APolyMat operator*(const APolyMat& a, const Matrix& m);
  /// Products with known polynomial data keep coefficients affine.
  friend APolyMat operator*(const PolyMat& p, const APolyMat& a);
  friend APolyMat operator*(const APolyMat& a, const PolyMat& p);
  /// Multiply by a scalar polynomial given by its coefficients.
  APolyMat mul_scalar_poly(const std::vector<double>& g) const;

  static APolyMat block2x2(const APolyMat& a11, const APolyMat& a12,
                           const APolyMat& a21, const APolyMat& a22);

private:
  int rows_ = 0, cols_ = 0;
  std::vector<AffMat> coeffs_;
};

/// T^T F T with constant T.
APolyMat congruence(const APolyMat& f, const Matrix& t);

}  // namespace clocklmi

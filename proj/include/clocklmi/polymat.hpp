#pragma once

#include <Eigen/Dense>
#include <vector>

namespace clocklmi {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Univariate polynomial with real matrix coefficients,
///   P(tau) = C_0 + C_1 tau + ... + C_d tau^d,
/// where tau is a clock value in seconds. Values are immutable after
/// construction; all operations return new objects.
class PolyMat {
public:
  PolyMat() = default;

  /// Coefficients in increasing degree order. Trailing all-zero
  /// coefficients are trimmed. With `symmetric` set, every coefficient
  /// must be exactly symmetric.
  explicit PolyMat(std::vector<Matrix> coeffs, bool symmetric = false);

  static PolyMat constant(const Matrix& c, bool symmetric = false);
  static PolyMat zero(int rows, int cols);
  static PolyMat identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_symmetric() const { return symmetric_; }
  bool is_zero() const;

  /// k-th coefficient; a zero matrix for k > degree().
  Matrix coeff(int k) const;

  /// Horner evaluation at a finite clock value.
  Matrix eval(double tau) const;

  /// Coefficient rule D_k = (k+1) C_{k+1}; the symmetric flag survives.
  PolyMat derivative() const;

  PolyMat transpose() const;

  /// P(s * tau) as a polynomial in tau (clock-basis rescaling).
  PolyMat rescale_clock(double s) const;

  PolyMat operator+(const PolyMat& o) const;
  PolyMat operator-(const PolyMat& o) const;
  PolyMat operator-() const;
  PolyMat operator*(double s) const;
  PolyMat operator*(const PolyMat& o) const;  // coefficient convolution

  friend PolyMat operator*(double s, const PolyMat& p) { return p * s; }
  friend PolyMat operator*(const Matrix& m, const PolyMat& p);
  friend PolyMat operator*(const PolyMat& p, const Matrix& m);

private:
  int rows_ = 0, cols_ = 0;
  bool symmetric_ = false;
  std::vector<Matrix> coeffs_;
};

/// T^T P T for constant T; keeps the symmetric flag when P carries it.
PolyMat congruence(const PolyMat& p, const Matrix& t);

/// Gram (sum-of-squares) representation of a symmetric polynomial matrix:
///   S(tau) = (z_m(tau) (x) I_q)^T G (z_m(tau) (x) I_q),
/// with z_m(tau) = (1, tau, ..., tau^m)^T. A positive semidefinite G
/// certifies S(tau) >= 0 for every real tau.
struct GramForm {
  int basis_degree = 0;  // m
  int base_dim = 0;      // q
  Matrix gram;           // q(m+1) x q(m+1), symmetric

  GramForm(int m, int q, Matrix g);

  /// Expand to the degree-2m symmetric PolyMat realized by the Gram matrix.
  PolyMat realize() const;
};

}  // namespace clocklmi

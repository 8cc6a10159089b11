#include "clocklmi/polymat.hpp"

#include <cmath>
#include <stdexcept>

namespace clocklmi {

namespace {

bool exactly_symmetric(const Matrix& m) {
  if (m.rows() != m.cols()) return false;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i + 1; j < m.cols(); ++j)
      if (m(i, j) != m(j, i)) return false;
  return true;
}

}  // namespace

PolyMat::PolyMat(std::vector<Matrix> coeffs, bool symmetric)
    : symmetric_(symmetric), coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw std::invalid_argument("PolyMat: no coefficients");
  rows_ = static_cast<int>(coeffs_[0].rows());
  cols_ = static_cast<int>(coeffs_[0].cols());
  for (const Matrix& c : coeffs_) {
    if (c.rows() != rows_ || c.cols() != cols_)
      throw std::invalid_argument("PolyMat: coefficient shape mismatch");
    if (symmetric_ && !exactly_symmetric(c))
      throw std::invalid_argument("PolyMat: coefficient not symmetric");
  }
  while (coeffs_.size() > 1 && coeffs_.back().isZero(0.0)) coeffs_.pop_back();
}

PolyMat PolyMat::constant(const Matrix& c, bool symmetric) {
  return PolyMat({c}, symmetric);
}

PolyMat PolyMat::zero(int rows, int cols) {
  return PolyMat({Matrix::Zero(rows, cols)}, rows == cols);
}

PolyMat PolyMat::identity(int n) {
  return PolyMat({Matrix::Identity(n, n)}, true);
}

bool PolyMat::is_zero() const {
  for (const Matrix& c : coeffs_)
    if (!c.isZero(0.0)) return false;
  return true;
}

Matrix PolyMat::coeff(int k) const {
  if (k < 0) throw std::out_of_range("PolyMat::coeff");
  if (k > degree()) return Matrix::Zero(rows_, cols_);
  return coeffs_[static_cast<size_t>(k)];
}

Matrix PolyMat::eval(double tau) const {
  if (!std::isfinite(tau)) throw std::invalid_argument("PolyMat::eval: tau not finite");
  Matrix v = coeffs_.back();
  for (int k = degree() - 1; k >= 0; --k) v = v * tau + coeffs_[static_cast<size_t>(k)];
  return v;
}

PolyMat PolyMat::derivative() const {
  if (degree() == 0) return PolyMat({Matrix::Zero(rows_, cols_)}, symmetric_);
  std::vector<Matrix> d;
  d.reserve(coeffs_.size() - 1);
  for (int k = 1; k <= degree(); ++k) d.push_back(static_cast<double>(k) * coeffs_[static_cast<size_t>(k)]);
  return PolyMat(std::move(d), symmetric_);
}

PolyMat PolyMat::transpose() const {
  std::vector<Matrix> t;
  t.reserve(coeffs_.size());
  for (const Matrix& c : coeffs_) t.push_back(c.transpose());
  return PolyMat(std::move(t), symmetric_);
}

PolyMat PolyMat::rescale_clock(double s) const {
  std::vector<Matrix> r;
  r.reserve(coeffs_.size());
  double f = 1.0;
  for (const Matrix& c : coeffs_) {
    r.push_back(f * c);
    f *= s;
  }
  return PolyMat(std::move(r), symmetric_);
}

PolyMat PolyMat::operator+(const PolyMat& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw std::invalid_argument("PolyMat+: shape mismatch");
  std::vector<Matrix> r;
  int d = std::max(degree(), o.degree());
  r.reserve(static_cast<size_t>(d) + 1);
  for (int k = 0; k <= d; ++k) r.push_back(coeff(k) + o.coeff(k));
  return PolyMat(std::move(r), symmetric_ && o.symmetric_);
}

PolyMat PolyMat::operator-(const PolyMat& o) const { return *this + (-o); }

PolyMat PolyMat::operator-() const {
  std::vector<Matrix> r;
  r.reserve(coeffs_.size());
  for (const Matrix& c : coeffs_) r.push_back(-c);
  return PolyMat(std::move(r), symmetric_);
}

PolyMat PolyMat::operator*(double s) const {
  std::vector<Matrix> r;
  r.reserve(coeffs_.size());
  for (const Matrix& c : coeffs_) r.push_back(s * c);
  return PolyMat(std::move(r), symmetric_);
}

PolyMat PolyMat::operator*(const PolyMat& o) const {
  if (cols_ != o.rows_) throw std::invalid_argument("PolyMat*: shape mismatch");
  int d = degree() + o.degree();
  std::vector<Matrix> r(static_cast<size_t>(d) + 1, Matrix::Zero(rows_, o.cols_));
  for (int i = 0; i <= degree(); ++i)
    for (int j = 0; j <= o.degree(); ++j)
      r[static_cast<size_t>(i + j)] += coeffs_[static_cast<size_t>(i)] * o.coeffs_[static_cast<size_t>(j)];
  return PolyMat(std::move(r), false);
}

PolyMat operator*(const Matrix& m, const PolyMat& p) {
  std::vector<Matrix> r;
  r.reserve(p.coeffs_.size());
  for (const Matrix& c : p.coeffs_) r.push_back(m * c);
  return PolyMat(std::move(r), false);
}

PolyMat operator*(const PolyMat& p, const Matrix& m) {
  std::vector<Matrix> r;
  r.reserve(p.coeffs_.size());
  for (const Matrix& c : p.coeffs_) r.push_back(c * m);
  return PolyMat(std::move(r), false);
}

PolyMat congruence(const PolyMat& p, const Matrix& t) {
  std::vector<Matrix> r;
  r.reserve(static_cast<size_t>(p.degree()) + 1);
  for (int k = 0; k <= p.degree(); ++k) {
    Matrix c = t.transpose() * p.coeff(k) * t;
    if (p.is_symmetric()) c = ((c + c.transpose()) * 0.5).eval();
    r.push_back(std::move(c));
  }
  return PolyMat(std::move(r), p.is_symmetric());
}

GramForm::GramForm(int m, int q, Matrix g)
    : basis_degree(m), base_dim(q), gram(std::move(g)) {
  if (m < 0 || q <= 0) throw std::invalid_argument("GramForm: bad sizes");
  const int dim = q * (m + 1);
  if (gram.rows() != dim || gram.cols() != dim)
    throw std::invalid_argument("GramForm: gram size does not match q(m+1)");
  if (!gram.isApprox(gram.transpose(), 0.0))
    throw std::invalid_argument("GramForm: gram not symmetric");
}

PolyMat GramForm::realize() const {
  const int m = basis_degree, q = base_dim;
  std::vector<Matrix> c(static_cast<size_t>(2 * m) + 1, Matrix::Zero(q, q));
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m; ++j)
      c[static_cast<size_t>(i + j)] += gram.block(i * q, j * q, q, q);
  for (Matrix& ck : c) ck = ((ck + ck.transpose()) * 0.5).eval();
  return PolyMat(std::move(c), true);
}

}  // namespace clocklmi

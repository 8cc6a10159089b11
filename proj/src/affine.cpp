#include "clocklmi/affine.hpp"

#include <algorithm>
#include <stdexcept>

namespace clocklmi {

AffExpr AffExpr::variable(int var, double coeff) {
  AffExpr e;
  if (coeff != 0.0) e.lin_.emplace_back(var, coeff);
  return e;
}

double AffExpr::eval(const Vector& y) const {
  double v = c_;
  for (const auto& [var, a] : lin_) v += a * y[var];
  return v;
}

AffExpr& AffExpr::operator+=(const AffExpr& o) {
  c_ += o.c_;
  if (o.lin_.empty()) return *this;
  std::vector<std::pair<int, double>> merged;
  merged.reserve(lin_.size() + o.lin_.size());
  size_t i = 0, j = 0;
  while (i < lin_.size() || j < o.lin_.size()) {
    if (j == o.lin_.size() || (i < lin_.size() && lin_[i].first < o.lin_[j].first)) {
      merged.push_back(lin_[i++]);
    } else if (i == lin_.size() || o.lin_[j].first < lin_[i].first) {
      merged.push_back(o.lin_[j++]);
    } else {
      double a = lin_[i].second + o.lin_[j].second;
      if (a != 0.0) merged.emplace_back(lin_[i].first, a);
      ++i, ++j;
    }
  }
  lin_ = std::move(merged);
  return *this;
}

AffExpr& AffExpr::operator-=(const AffExpr& o) { return *this += o * -1.0; }

AffExpr& AffExpr::operator*=(double s) {
  if (s == 0.0) {
    c_ = 0.0;
    lin_.clear();
    return *this;
  }
  c_ *= s;
  for (auto& t : lin_) t.second *= s;
  return *this;
}

AffMat AffMat::from_const(const Matrix& m) {
  AffMat a(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int i = 0; i < a.rows_; ++i)
    for (int j = 0; j < a.cols_; ++j) a(i, j) = AffExpr(m(i, j));
  return a;
}

Matrix AffMat::eval(const Vector& y) const {
  Matrix m(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).eval(y);
  return m;
}

Matrix AffMat::constant_part() const {
  Matrix m(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).constant();
  return m;
}

AffMat AffMat::transpose() const {
  AffMat t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

AffMat AffMat::operator+(const AffMat& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("AffMat+: shape");
  AffMat r = *this;
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r(i, j) += o(i, j);
  return r;
}

AffMat AffMat::operator-(const AffMat& o) const { return *this + (-o); }

AffMat AffMat::operator-() const { return *this * -1.0; }

AffMat AffMat::operator*(double s) const {
  AffMat r = *this;
  for (auto& e : r.e_) e *= s;
  return r;
}

AffMat operator*(const Matrix& m, const AffMat& a) {
  AffMat r(static_cast<int>(m.rows()), a.cols());
  for (int i = 0; i < r.rows(); ++i)
    for (int j = 0; j < r.cols(); ++j) {
      AffExpr s;
      for (int k = 0; k < a.rows(); ++k) {
        double c = m(i, k);
        if (c != 0.0) s += a(k, j) * c;
      }
      r(i, j) = std::move(s);
    }
  return r;
}

AffMat operator*(const AffMat& a, const Matrix& m) {
  AffMat r(a.rows(), static_cast<int>(m.cols()));
  for (int i = 0; i < r.rows(); ++i)
    for (int j = 0; j < r.cols(); ++j) {
      AffExpr s;
      for (int k = 0; k < a.cols(); ++k) {
        double c = m(k, j);
        if (c != 0.0) s += a(i, k) * c;
      }
      r(i, j) = std::move(s);
    }
  return r;
}

AffMat AffMat::symmetrized() const {
  if (rows_ != cols_) throw std::invalid_argument("AffMat::symmetrized: not square");
  AffMat r(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r(i, j) = ((*this)(i, j) + (*this)(j, i)) * 0.5;
  return r;
}

void AffMat::paste(int i0, int j0, const AffMat& b) {
  for (int i = 0; i < b.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) (*this)(i0 + i, j0 + j) = b(i, j);
}

AffMat AffMat::block2x2(const AffMat& a11, const AffMat& a12,
                        const AffMat& a21, const AffMat& a22) {
  AffMat r(a11.rows() + a21.rows(), a11.cols() + a12.cols());
  r.paste(0, 0, a11);
  r.paste(0, a11.cols(), a12);
  r.paste(a11.rows(), 0, a21);
  r.paste(a11.rows(), a11.cols(), a22);
  return r;
}

APolyMat::APolyMat(std::vector<AffMat> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw std::invalid_argument("APolyMat: no coefficients");
  rows_ = coeffs_[0].rows();
  cols_ = coeffs_[0].cols();
}

APolyMat APolyMat::from_const(const PolyMat& p) {
  std::vector<AffMat> c;
  c.reserve(static_cast<size_t>(p.degree()) + 1);
  for (int k = 0; k <= p.degree(); ++k) c.push_back(AffMat::from_const(p.coeff(k)));
  return APolyMat(std::move(c));
}

APolyMat APolyMat::from_mat(const AffMat& m) { return APolyMat({m}); }

AffMat APolyMat::coeff(int k) const {
  if (k <= degree()) return coeffs_[static_cast<size_t>(k)];
  return AffMat(rows_, cols_);
}

APolyMat APolyMat::at_zero() const { return APolyMat({coeffs_[0]}); }

APolyMat APolyMat::derivative() const {
  if (degree() == 0) return APolyMat({AffMat(rows_, cols_)});
  std::vector<AffMat> d;
  d.reserve(coeffs_.size() - 1);
  for (int k = 1; k <= degree(); ++k) d.push_back(coeffs_[static_cast<size_t>(k)] * static_cast<double>(k));
  return APolyMat(std::move(d));
}

APolyMat APolyMat::transpose() const {
  std::vector<AffMat> t;
  t.reserve(coeffs_.size());
  for (const AffMat& c : coeffs_) t.push_back(c.transpose());
  return APolyMat(std::move(t));
}

APolyMat APolyMat::symmetrized() const {
  std::vector<AffMat> t;
  t.reserve(coeffs_.size());
  for (const AffMat& c : coeffs_) t.push_back(c.symmetrized());
  return APolyMat(std::move(t));
}

PolyMat APolyMat::eval_vars(const Vector& y) const {
  std::vector<Matrix> c;
  c.reserve(coeffs_.size());
  for (const AffMat& a : coeffs_) c.push_back(a.eval(y));
  return PolyMat(std::move(c));
}

APolyMat APolyMat::operator+(const APolyMat& o) const {
  int d = std::max(degree(), o.degree());
  std::vector<AffMat> r;
  r.reserve(static_cast<size_t>(d) + 1);
  for (int k = 0; k <= d; ++k) r.push_back(coeff(k) + o.coeff(k));
  return APolyMat(std::move(r));
}

APolyMat APolyMat::operator-(const APolyMat& o) const { return *this + (-o); }

APolyMat APolyMat::operator-() const { return *this * -1.0; }

APolyMat APolyMat::operator*(double s) const {
  std::vector<AffMat> r;
  r.reserve(coeffs_.size());
  for (const AffMat& c : coeffs_) r.push_back(c * s);
  return APolyMat(std::move(r));
}

APolyMat operator*(const Matrix& m, const APolyMat& a) {
  std::vector<AffMat> r;
  r.reserve(a.coeffs_.size());
  for (const AffMat& c : a.coeffs_) r.push_back(m * c);
  return APolyMat(std::move(r));
}

APolyMat operator*(const APolyMat& a, const Matrix& m) {
  std::vector<AffMat> r;
  r.reserve(a.coeffs_.size());
  for (const AffMat& c : a.coeffs_) r.push_back(c * m);
  return APolyMat(std::move(r));
}

APolyMat operator*(const PolyMat& p, const APolyMat& a) {
  int d = p.degree() + a.degree();
  std::vector<AffMat> r(static_cast<size_t>(d) + 1, AffMat(static_cast<int>(p.rows()), a.cols()));
  for (int i = 0; i <= p.degree(); ++i)
    for (int j = 0; j <= a.degree(); ++j)
      r[static_cast<size_t>(i + j)] = r[static_cast<size_t>(i + j)] + p.coeff(i) * a.coeffs_[static_cast<size_t>(j)];
  return APolyMat(std::move(r));
}

APolyMat operator*(const APolyMat& a, const PolyMat& p) {
  int d = p.degree() + a.degree();
  std::vector<AffMat> r(static_cast<size_t>(d) + 1, AffMat(a.rows(), static_cast<int>(p.cols())));
  for (int i = 0; i <= a.degree(); ++i)
    for (int j = 0; j <= p.degree(); ++j)
      r[static_cast<size_t>(i + j)] = r[static_cast<size_t>(i + j)] + a.coeffs_[static_cast<size_t>(i)] * p.coeff(j);
  return APolyMat(std::move(r));
}

APolyMat APolyMat::mul_scalar_poly(const std::vector<double>& g) const {
  if (g.empty()) throw std::invalid_argument("mul_scalar_poly: empty polynomial");
  int d = degree() + static_cast<int>(g.size()) - 1;
  std::vector<AffMat> r(static_cast<size_t>(d) + 1, AffMat(rows_, cols_));
  for (int i = 0; i <= degree(); ++i)
    for (size_t j = 0; j < g.size(); ++j)
      r[static_cast<size_t>(i) + j] = r[static_cast<size_t>(i) + j] + coeffs_[static_cast<size_t>(i)] * g[j];
  return APolyMat(std::move(r));
}

APolyMat APolyMat::block2x2(const APolyMat& a11, const APolyMat& a12,
                            const APolyMat& a21, const APolyMat& a22) {
  int d = std::max(std::max(a11.degree(), a12.degree()), std::max(a21.degree(), a22.degree()));
  std::vector<AffMat> r;
  r.reserve(static_cast<size_t>(d) + 1);
  for (int k = 0; k <= d; ++k)
    r.push_back(AffMat::block2x2(a11.coeff(k), a12.coeff(k), a21.coeff(k), a22.coeff(k)));
  return APolyMat(std::move(r));
}

APolyMat congruence(const APolyMat& f, const Matrix& t) {
  Matrix tt = t.transpose();
  std::vector<AffMat> r;
  r.reserve(static_cast<size_t>(f.degree()) + 1);
  for (int k = 0; k <= f.degree(); ++k) r.push_back(tt * f.coeff(k) * t);
  return APolyMat(std::move(r));
}

}  // namespace clocklmi

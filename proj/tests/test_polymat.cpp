#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "clocklmi/polymat.hpp"

using namespace clocklmi;

namespace {

PolyMat example_p() {
  // [[tau^2, tau], [tau, 1]]
  Matrix c0(2, 2), c1(2, 2), c2(2, 2);
  c0 << 0, 0, 0, 1;
  c1 << 0, 1, 1, 0;
  c2 << 1, 0, 0, 0;
  return PolyMat({c0, c1, c2}, true);
}

PolyMat random_poly(std::mt19937& rng, int n, int deg) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Matrix> c;
  for (int k = 0; k <= deg; ++k) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = u(rng);
    c.push_back(m);
  }
  return PolyMat(std::move(c));
}

}  // namespace

TEST_CASE("eval") {
  PolyMat p = example_p();
  Matrix at0(2, 2), at2(2, 2);
  at0 << 0, 0, 0, 1;
  at2 << 4, 2, 2, 1;
  CHECK(p.eval(0.0).isApprox(at0, 0));
  CHECK(p.eval(2.0).isApprox(at2, 0));

  PolyMat id = PolyMat::identity(3);
  CHECK(id.eval(7.3).isApprox(Matrix::Identity(3, 3), 0));

  CHECK_THROWS(p.eval(std::numeric_limits<double>::quiet_NaN()));
}

TEST_CASE("derivative") {
  PolyMat p = example_p();
  PolyMat d = p.derivative();
  CHECK(d.degree() == 1);
  Matrix d0(2, 2), d1(2, 2);
  d0 << 0, 1, 1, 0;
  d1 << 2, 0, 0, 0;
  CHECK(d.coeff(0).isApprox(d0, 0));
  CHECK(d.coeff(1).isApprox(d1, 0));
  CHECK(d.is_symmetric());

  PolyMat c = PolyMat::constant(Matrix::Random(3, 2));
  CHECK(c.derivative().is_zero());
  CHECK(c.derivative().rows() == 3);

  // d/dtau of tau^3 I at 0.5 is 0.75 I
  std::vector<Matrix> cubic(4, Matrix::Zero(3, 3));
  cubic[3] = Matrix::Identity(3, 3);
  PolyMat t3(std::move(cubic), true);
  CHECK(t3.derivative().eval(0.5).isApprox(0.75 * Matrix::Identity(3, 3), 1e-15));
}

TEST_CASE("derivative matches central finite differences") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  const double h = 1e-5;
  for (int trial = 0; trial < 40; ++trial) {
    PolyMat p = random_poly(rng, 3, 1 + trial % 6);
    double tau = u(rng);
    Matrix fd = (p.eval(tau + h) - p.eval(tau - h)) / (2 * h);
    Matrix ex = p.derivative().eval(tau);
    double denom = std::max(1e-8, ex.norm());
    CHECK((fd - ex).norm() / denom <= 1e-6);
  }
}

TEST_CASE("gram realize") {
  SUBCASE("diagonal gram gives 1 + tau^2") {
    GramForm g(1, 1, Matrix::Identity(2, 2));
    PolyMat p = g.realize();
    CHECK(p.degree() == 2);
    CHECK(p.coeff(0)(0, 0) == 1.0);
    CHECK(p.coeff(1)(0, 0) == 0.0);
    CHECK(p.coeff(2)(0, 0) == 1.0);
  }
  SUBCASE("cross term gives tau") {
    Matrix m(2, 2);
    m << 0, 0.5, 0.5, 0;
    GramForm g(1, 1, m);
    PolyMat p = g.realize();
    CHECK(p.coeff(0)(0, 0) == 0.0);
    CHECK(p.coeff(1)(0, 0) == 1.0);
  }
  SUBCASE("degree zero is the gram itself") {
    Matrix g0(2, 2);
    g0 << 2, -1, -1, 3;
    GramForm g(0, 2, g0);
    PolyMat p = g.realize();
    CHECK(p.degree() == 0);
    CHECK(p.coeff(0).isApprox(g0, 0));
  }
  SUBCASE("size mismatch rejected") {
    CHECK_THROWS(GramForm(1, 2, Matrix::Identity(3, 3)));
    Matrix ns(2, 2);
    ns << 1, 2, 0, 1;
    CHECK_THROWS(GramForm(1, 1, ns));
  }
}

TEST_CASE("gram round trip stays psd") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    int q = 1 + trial % 3, m = 1 + trial % 3;
    int dim = q * (m + 1);
    Matrix r(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) r(i, j) = u(rng);
    Matrix psd = r * r.transpose();
    GramForm g(m, q, psd);
    PolyMat s = g.realize();
    for (int k = 0; k < 100; ++k) {
      double tau = 4.0 * u(rng);
      Eigen::SelfAdjointEigenSolver<Matrix> es(s.eval(tau), Eigen::EigenvaluesOnly);
      CHECK(es.eigenvalues().minCoeff() >= -1e-10);
      // quadratic-form evaluation agrees with the expanded polynomial
      Vector z(m + 1);
      double t = 1;
      for (int i = 0; i <= m; ++i, t *= tau) z[i] = t;
      Matrix zi = Matrix::Zero(dim, q);
      for (int i = 0; i <= m; ++i) zi.block(i * q, 0, q, q) = z[i] * Matrix::Identity(q, q);
      Matrix direct = zi.transpose() * psd * zi;
      CHECK((direct - s.eval(tau)).norm() <= 1e-12 * std::max(1.0, direct.norm()));
    }
  }
}

TEST_CASE("algebra under evaluation") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    PolyMat a = random_poly(rng, 2, 3), b = random_poly(rng, 2, 4), c = random_poly(rng, 2, 2);
    double tau = 2 * u(rng), s = u(rng);
    CHECK(((a + b) - (b + a)).eval(tau).norm() <= 1e-12);
    CHECK((((a + b) + c) - (a + (b + c))).eval(tau).norm() <= 1e-12);
    CHECK(((a * s).eval(tau) - s * a.eval(tau)).norm() <= 1e-12);
    CHECK(((a * b).eval(tau) - a.eval(tau) * b.eval(tau)).norm() <= 1e-10);
  }
}

TEST_CASE("normalization trims trailing zeros") {
  std::vector<Matrix> c = {Matrix::Identity(2, 2), Matrix::Zero(2, 2), Matrix::Zero(2, 2)};
  PolyMat p(std::move(c), true);
  CHECK(p.degree() == 0);
}

TEST_CASE("symmetric flag checked exactly") {
  Matrix ns(2, 2);
  ns << 1, 2, 2, 1;
  CHECK_NOTHROW(PolyMat({ns}, true));
  ns(1, 0) = 2 + 1e-12;
  CHECK_THROWS(PolyMat({ns}, true));
}

TEST_CASE("clock rescaling") {
  PolyMat p = example_p();
  PolyMat q = p.rescale_clock(0.5);  // q(t) = p(0.5 t)
  CHECK(q.eval(2.0).isApprox(p.eval(1.0), 1e-15));
}

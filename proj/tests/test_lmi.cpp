#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "clocklmi/lmi.hpp"

using namespace clocklmi;

namespace {

PolyMat scalar_poly(std::vector<double> cs) {
  std::vector<Matrix> ms;
  for (double c : cs) {
    Matrix m(1, 1);
    m << c;
    ms.push_back(m);
  }
  return PolyMat(std::move(ms), true);
}

SdpStatus relax_and_solve(const PolyMat& f, double a, double b, double eps,
                          int mult_degree) {
  SdpBuilder builder;
  relax_interval_negativity(builder, APolyMat::from_const(f), a, b, eps, mult_degree, "t");
  return solve(builder.take()).status;
}

}  // namespace

TEST_CASE("interval negativity: affine scalar cases") {
  // f = tau - 2 on [0,1]: max is -1 < -0.1
  CHECK(relax_and_solve(scalar_poly({-2, 1}), 0, 1, 0.1, 2) == SdpStatus::Feasible);
  // f = tau - 0.5 on [0,1]: f(1) = 0.5 > -0.1
  CHECK(relax_and_solve(scalar_poly({-0.5, 1}), 0, 1, 0.1, 2) == SdpStatus::Infeasible);
}

TEST_CASE("interval negativity: 2x2 with schur-style margin") {
  // F = [[tau-3, 1], [1, -1]]; negative definite on [0,1] iff -(tau-3) > 1
  Matrix c0(2, 2), c1(2, 2);
  c0 << -3, 1, 1, -1;
  c1 << 1, 0, 0, 0;
  PolyMat f({c0, c1}, true);

  // eigenvalue sweep oracle on a fine grid
  double worst = -1e30;
  for (int i = 0; i < 1000; ++i) {
    double tau = i / 999.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(f.eval(tau), Eigen::EigenvaluesOnly);
    worst = std::max(worst, es.eigenvalues().maxCoeff());
  }
  CHECK(worst < -0.01);

  CHECK(relax_and_solve(f, 0, 1, 0.01, 2) == SdpStatus::Feasible);
}

TEST_CASE("interval negativity parity handling") {
  // odd-degree data still compiles and certifies: f = -2 + tau^3 on [0,1]
  CHECK(relax_and_solve(scalar_poly({-2, 0, 0, 1}), 0, 1, 0.1, 2) == SdpStatus::Feasible);
  CHECK_THROWS(relax_and_solve(scalar_poly({-2}), 0, 1, 0.1, 1));   // odd multiplier
  CHECK_THROWS(relax_and_solve(scalar_poly({-2}), -1, 1, 0.1, 2));  // bad interval
}

TEST_CASE("analysis: scalar system with constant hand certificate") {
  PolyMat a = scalar_poly({-1});
  PolyMat aj = scalar_poly({0.5});
  AnalysisOptions opts;
  opts.x_degree = 2;
  AnalysisResult r = analyze_clock_lyapunov(a, aj, DwellTimeSpec(0.25, 1.0), opts);
  CHECK(r.status == SdpStatus::Feasible);
  CHECK(r.margin > 0);
  CHECK(r.grid.pass);
  // certificate must be positive on the whole interval
  for (double tau : {0.0, 0.3, 0.7, 1.0}) CHECK(r.certificate.eval(tau)(0, 0) > 0);
}

TEST_CASE("analysis: marginally stable jump map is rejected") {
  PolyMat a = scalar_poly({0.0});
  PolyMat aj = scalar_poly({1.0});
  AnalysisOptions opts;
  opts.x_degree = 6;
  opts.eps = 1e-3;
  AnalysisResult r = analyze_clock_lyapunov(a, aj, DwellTimeSpec(0.25, 1.0), opts);
  CHECK(r.status != SdpStatus::Feasible);
}

TEST_CASE("analysis feasibility flips near the contraction boundary") {
  // a = 1, c = 0.5: stable iff T_max < ln 2; degree-6 certificates get close
  PolyMat a = scalar_poly({1.0});
  PolyMat aj = scalar_poly({0.5});
  AnalysisOptions opts;
  opts.x_degree = 6;
  opts.eps = 1e-3;
  AnalysisResult lo = analyze_clock_lyapunov(a, aj, DwellTimeSpec(0.1, 0.60), opts);
  CHECK(lo.status == SdpStatus::Feasible);
  AnalysisResult hi = analyze_clock_lyapunov(a, aj, DwellTimeSpec(0.1, 0.70), opts);
  CHECK(hi.status != SdpStatus::Feasible);
}

TEST_CASE("analysis monotone in the upper dwell bound") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  AnalysisOptions opts;
  opts.x_degree = 4;
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Matrix a(2, 2), aj(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        a(i, j) = u(rng) - (i == j ? 1.2 : 0.0);
        aj(i, j) = 0.55 * u(rng) + (i == j ? 0.3 : 0.0);
      }
    PolyMat ap = PolyMat::constant(a), ajp = PolyMat::constant(aj);
    AnalysisResult wide = analyze_clock_lyapunov(ap, ajp, DwellTimeSpec(0.2, 1.0), opts);
    if (!wide.feasible()) continue;
    AnalysisResult narrow = analyze_clock_lyapunov(ap, ajp, DwellTimeSpec(0.2, 0.6), opts);
    CHECK(narrow.feasible());
    ++checked;
  }
  CHECK(checked >= 5);  // enough random systems exercised the implication
}

TEST_CASE("s-variable analysis on scalar and 2x2 systems") {
  Matrix a(1, 1), aj(1, 1);
  a << -1;
  aj << 0.5;
  AnalysisOptions opts;
  opts.x_degree = 2;
  AnalysisResult r = analyze_svariable(a, aj, DwellTimeSpec(0.25, 1.0), 0.1, opts);
  CHECK(r.status == SdpStatus::Feasible);
  CHECK(r.grid.pass);
  // implied plain analysis must agree
  AnalysisResult plain =
      analyze_clock_lyapunov(PolyMat::constant(a), PolyMat::constant(aj),
                             DwellTimeSpec(0.25, 1.0), opts);
  CHECK(plain.status == SdpStatus::Feasible);

  Matrix a2 = -Matrix::Identity(2, 2), aj2 = 0.9 * Matrix::Identity(2, 2);
  bool any = false;
  for (double rho : {0.01, 0.1, 1.0}) {
    AnalysisResult r2 = analyze_svariable(a2, aj2, DwellTimeSpec(0.25, 1.0), rho, opts);
    any = any || r2.feasible();
  }
  CHECK(any);
  AnalysisResult plain2 =
      analyze_clock_lyapunov(PolyMat::constant(a2), PolyMat::constant(aj2),
                             DwellTimeSpec(0.25, 1.0), opts);
  CHECK(plain2.feasible());
}

TEST_CASE("s-variable infeasible whenever the plain analysis is infeasible") {
  Matrix a = Matrix::Zero(1, 1), aj = Matrix::Identity(1, 1);
  AnalysisOptions opts;
  opts.x_degree = 4;
  opts.eps = 1e-3;
  for (double rho : default_rho_grid()) {
    AnalysisResult r = analyze_svariable(a, aj, DwellTimeSpec(0.25, 1.0), rho, opts);
    CHECK(r.status != SdpStatus::Feasible);
  }
}

TEST_CASE("rho sweep keeps a feasible result") {
  Matrix a(1, 1), aj(1, 1);
  a << -1;
  aj << 0.5;
  AnalysisOptions opts;
  opts.x_degree = 2;
  AnalysisResult r =
      analyze_svariable_sweep(a, aj, DwellTimeSpec(0.25, 1.0), default_rho_grid(), opts);
  CHECK(r.feasible());
  CHECK(r.rho > 0);
}

TEST_CASE("dwell spec validation") {
  CHECK_THROWS(DwellTimeSpec(0.0, 1.0));
  CHECK_THROWS(DwellTimeSpec(1.0, 1.0));
  CHECK_THROWS(DwellTimeSpec(2.0, 1.0));
  CHECK_NOTHROW(DwellTimeSpec(0.1, 0.2));
}

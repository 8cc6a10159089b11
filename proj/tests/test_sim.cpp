#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unsupported/Eigen/MatrixFunctions>

#include <random>
#include <sstream>

#include "clocklmi/sim.hpp"

using namespace clocklmi;

namespace {

ClockMatrixFn const_fn(const Matrix& m) {
  return {static_cast<int>(m.rows()), static_cast<int>(m.cols()),
          [m](double) { return m; }};
}

}  // namespace

TEST_CASE("dwell sampling") {
  SUBCASE("degenerate interval is near periodic") {
    DwellTimeSpec d(1.0 - 1e-9, 1.0);
    DwellSequence s = sample_dwell(d, 10.0, 42);
    for (double g : s.gaps) CHECK(g == doctest::Approx(1.0).epsilon(1e-8));
  }
  SUBCASE("fixed seed reproduces") {
    DwellTimeSpec d(0.25, 1.0);
    DwellSequence a = sample_dwell(d, 100.0, 7), b = sample_dwell(d, 100.0, 7);
    REQUIRE(a.gaps.size() == b.gaps.size());
    for (size_t i = 0; i < a.gaps.size(); ++i) CHECK(a.gaps[i] == b.gaps[i]);
  }
  SUBCASE("law of large numbers") {
    DwellTimeSpec d(0.25, 1.0);
    DwellSequence s = sample_dwell(d, 7000.0, 123);  // ~ 1.1e4 gaps
    REQUIRE(s.gaps.size() >= 10000);
    double mn = 1e30, mx = -1e30, mean = 0;
    for (double g : s.gaps) {
      mn = std::min(mn, g);
      mx = std::max(mx, g);
      mean += g;
    }
    mean /= static_cast<double>(s.gaps.size());
    CHECK(mn >= 0.25);
    CHECK(mx <= 1.0);
    CHECK(mean == doctest::Approx(0.625).epsilon(0.016));
  }
}

TEST_CASE("simulate: scalar exponential is exact to integrator order") {
  Matrix a(1, 1);
  a << -0.7;
  DwellSequence seq;
  seq.gaps = {5.0};
  Vector x0(1);
  x0 << 2.0;
  Trajectory tr = simulate(const_fn(a), const_fn(Matrix::Identity(1, 1)), x0, seq, 1e-3);
  double expect = 2.0 * std::exp(-0.7 * 5.0);
  // pre-jump sample is the final flow value
  double got = 0;
  for (size_t i = 0; i < tr.flags.size(); ++i)
    if (tr.flags[i] == -1) got = tr.states[i][0];
  CHECK(got == doctest::Approx(expect).epsilon(1e-8));
}

TEST_CASE("simulate: pure jump contraction") {
  Matrix a = Matrix::Zero(1, 1), c(1, 1);
  c << 0.5;
  DwellSequence seq;
  seq.gaps = {1.0, 1.0, 1.0};
  Vector x0(1);
  x0 << 8.0;
  Trajectory tr = simulate(const_fn(a), const_fn(c), x0, seq, 0.05);
  // after two full jumps the state is 0.25 x0; find the pre-jump value of gap 3
  int jumps = 0;
  double pre3 = 0;
  for (size_t i = 0; i < tr.flags.size(); ++i) {
    if (tr.flags[i] == -1 && jumps == 2) pre3 = tr.states[i][0];
    if (tr.flags[i] == 1) ++jumps;
  }
  CHECK(pre3 == doctest::Approx(2.0));  // 8 * 0.25
  CHECK(jumps == 3);
}

TEST_CASE("simulate: contraction sequence decays for gaps below the boundary") {
  Matrix a(1, 1), c(1, 1);
  a << 1.0;
  c << 0.5;
  DwellSequence seq;
  seq.gaps.assign(20, 0.6);
  Vector x0(1);
  x0 << 1.0;
  Trajectory tr = simulate(const_fn(a), const_fn(c), x0, seq, 0.002);
  std::vector<double> post;
  for (size_t i = 0; i < tr.flags.size(); ++i)
    if (tr.flags[i] == 1) post.push_back(std::abs(tr.states[i][0]));
  REQUIRE(post.size() == 20);
  for (size_t i = 1; i < post.size(); ++i) CHECK(post[i] < post[i - 1]);
  CHECK(post[1] / post[0] == doctest::Approx(0.5 * std::exp(0.6)).epsilon(1e-6));
}

TEST_CASE("jump bookkeeping: post state equals jump map applied to pre state") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  Matrix a(3, 3), cj(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      a(i, j) = u(rng);
      cj(i, j) = 0.4 * u(rng);
    }
  DwellSequence seq;
  seq.gaps = {0.4, 0.7, 0.9};
  Vector x0 = Vector::Ones(3);
  Trajectory tr = simulate(const_fn(a), const_fn(cj), x0, seq, 0.01);
  for (size_t i = 0; i + 1 < tr.flags.size(); ++i) {
    if (tr.flags[i] == -1 && tr.flags[i + 1] == 1) {
      Vector expect = cj * tr.states[i];
      CHECK((tr.states[i + 1] - expect).norm() == 0.0);
    }
  }
}

TEST_CASE("rk4 is fourth order against the matrix exponential") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(-1, 1);
  Matrix a(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = u(rng);
  Vector x0 = Vector::Ones(4);
  Matrix ref = (a * 1.0).exp();
  Vector xref = ref * x0;

  auto err_at = [&](double h) {
    DwellSequence seq;
    seq.gaps = {1.0};
    Trajectory tr = simulate(const_fn(a), const_fn(Matrix::Identity(4, 4)), x0, seq, h);
    Vector pre;
    for (size_t i = 0; i < tr.flags.size(); ++i)
      if (tr.flags[i] == -1) pre = tr.states[i];
    return (pre - xref).norm();
  };
  double e1 = err_at(0.05), e2 = err_at(0.025);
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.2));  // 16 +- ~3
}

TEST_CASE("estimate_decay") {
  SUBCASE("synthetic exponential") {
    Trajectory tr;
    for (int i = 0; i <= 200; ++i) {
      double t = i * 0.05;
      tr.times.push_back(t);
      Vector v(1);
      v << 3.0 * std::exp(-2.0 * t);
      tr.states.push_back(v);
      tr.flags.push_back(0);
    }
    DecayEstimate d = estimate_decay(tr);
    CHECK(d.gamma_hat == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(d.r2 == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("constant norm") {
    Trajectory tr;
    for (int i = 0; i <= 100; ++i) {
      tr.times.push_back(i * 0.1);
      tr.states.push_back(Vector::Ones(2));
      tr.flags.push_back(0);
    }
    DecayEstimate d = estimate_decay(tr);
    CHECK(std::abs(d.gamma_hat) <= 1e-6);
  }
  SUBCASE("underflowed trajectory reports convergence") {
    Trajectory tr;
    for (int i = 0; i <= 50; ++i) {
      tr.times.push_back(i * 1.0);
      Vector v(1);
      v << (i < 30 ? 1e-100 * std::pow(1e-8, i) : 0.0);
      tr.states.push_back(v);
      tr.flags.push_back(0);
    }
    DecayEstimate d = estimate_decay(tr);
    CHECK(d.converged_to_zero);
    CHECK(std::isinf(d.gamma_hat));
  }
  SUBCASE("random-gap scalar contraction decays over 100 seeds") {
    Matrix a(1, 1), c(1, 1);
    a << 1.0;
    c << 0.5;
    DwellTimeSpec dwell(0.1, 0.6);
    for (uint64_t seed = 0; seed < 100; ++seed) {
      DwellSequence seq = sample_dwell(dwell, 30.0, seed);
      Vector x0(1);
      x0 << 1.0;
      Trajectory tr = simulate(const_fn(a), const_fn(c), x0, seq, 0.002);
      DecayEstimate d = estimate_decay(tr);
      CHECK(d.gamma_hat > 0);
    }
  }
}

TEST_CASE("scalar oracle") {
  CHECK(scalar_oracle(1.0, 0.5, DwellTimeSpec(0.1, 0.6)));
  CHECK_FALSE(scalar_oracle(1.0, 0.5, DwellTimeSpec(0.1, 0.7)));
  CHECK(scalar_oracle(5.0, 0.0, DwellTimeSpec(0.1, 0.7)));
  CHECK(scalar_oracle(-1.0, 0.9, DwellTimeSpec(0.5, 2.0)));   // worst case at t_min
  CHECK_FALSE(scalar_oracle(-1.0, 1.7, DwellTimeSpec(0.5, 2.0)));
}

TEST_CASE("csv export schema") {
  Matrix a = Matrix::Zero(2, 2);
  DwellSequence seq;
  seq.gaps = {0.5};
  Vector x0(2);
  x0 << 1, 2;
  Trajectory tr = simulate(const_fn(a), const_fn(Matrix::Identity(2, 2)), x0, seq, 0.25);
  std::ostringstream os;
  write_csv(tr, os);
  std::string s = os.str();
  CHECK(s.rfind("time,pre_post_flag,x0,x1,norm\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == static_cast<long>(tr.times.size()) + 1);
}

TEST_CASE("mc decay over a stable loop") {
  Matrix a = -Matrix::Identity(2, 2);
  Matrix aj = 0.5 * Matrix::Identity(2, 2);
  ClosedLoop cl{2, const_fn(a), const_fn(aj), DwellTimeSpec(0.25, 1.0)};
  McDecayStats st = mc_decay(cl, 20, 10.0, 99);
  CHECK(st.all_decayed);
  CHECK(st.min_gamma > 0);
  CHECK(st.max_final_ratio < 1e-2);
}

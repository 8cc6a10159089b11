#include "clocklmi/lmi.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace clocklmi {

DwellTimeSpec::DwellTimeSpec(double tmin, double tmax) : t_min(tmin), t_max(tmax) {
  if (!(0 < tmin && tmin < tmax))
    throw std::invalid_argument("DwellTimeSpec: need 0 < t_min < t_max");
}

ClockMatrixFn to_fn(const PolyMat& p) {
  return {p.rows(), p.cols(), [p](double tau) { return p.eval(tau); }};
}

namespace {

int roundup_even(int v) { return v % 2 == 0 ? v : v + 1; }

double min_eig(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_eig(const Matrix& m) { return -min_eig(-m); }

PolyMat force_sym(const PolyMat& p) {
  std::vector<Matrix> cs;
  cs.reserve(static_cast<size_t>(p.degree()) + 1);
  for (int k = 0; k <= p.degree(); ++k) {
    Matrix c = p.coeff(k);
    cs.push_back(0.5 * (c + c.transpose()));
  }
  return PolyMat(std::move(cs), true);
}

// Realize the Gram quadratic form of an affine Gram matrix as an APolyMat.
APolyMat realize_gram(const AffMat& g, int m, int q) {
  std::vector<AffMat> c(static_cast<size_t>(2 * m) + 1, AffMat(q, q));
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m; ++j)
      for (int r = 0; r < q; ++r)
        for (int s = 0; s < q; ++s)
          c[static_cast<size_t>(i + j)](r, s) += g(i * q + r, j * q + s);
  return APolyMat(std::move(c));
}

}  // namespace

IntervalRelaxation relax_interval_negativity(SdpBuilder& builder, const APolyMat& f,
                                             double a, double b, double eps,
                                             int mult_degree, const std::string& label) {
  if (f.rows() != f.cols()) throw std::invalid_argument("relax: F not square");
  if (mult_degree < 0 || mult_degree % 2 != 0)
    throw std::invalid_argument("relax: multiplier degree must be even and >= 0");
  if (!(0 <= a && a < b)) throw std::invalid_argument("relax: bad interval");

  const int q = f.rows();

  // P = -F - eps I must equal S0 + g S1 coefficient by coefficient.
  APolyMat p = (-f).symmetrized();
  {
    AffMat shift = p.coeff(0);
    for (int i = 0; i < q; ++i) shift(i, i) += AffExpr(-eps);
    std::vector<AffMat> cs = p.coeffs();
    cs[0] = shift;
    p = APolyMat(std::move(cs));
  }

  // Degree bookkeeping: the target degree is even and at least the degree of
  // g*S1. The multiplier is widened so that g*S1 always reaches the target
  // degree; otherwise the top coefficient pins Gram corners across blocks
  // and the margin of the joint program degenerates to zero.
  int target = roundup_even(std::max(p.degree(), mult_degree + 2));
  int mult_eff = std::max(mult_degree, target - 2);
  const int m0 = target / 2;
  const int m1 = mult_eff / 2;

  IntervalRelaxation rel;
  rel.s0_basis_degree = m0;
  rel.s1_degree = mult_eff;

  // Interval multiplier S1 with a free Gram matrix.
  AffMat g1 = builder.new_sym(q * (m1 + 1));
  rel.gram1_block = builder.add_psd_block(g1, label + "/mult");
  APolyMat s1 = realize_gram(g1, m1, q);

  // g(tau) = (tau - a)(b - tau)
  std::vector<double> g = {-a * b, a + b, -1.0};
  APolyMat rem = p - s1.mul_scalar_poly(g);

  // Particular Gram solution: spread each coefficient evenly over its
  // antidiagonal, then add a basis of the homogeneous Gram space.
  const int gd = q * (m0 + 1);
  AffMat g0(gd, gd);
  for (int k = 0; k <= 2 * m0; ++k) {
    std::vector<std::pair<int, int>> pos;
    for (int i = 0; i <= m0; ++i) {
      int j = k - i;
      if (j >= i && j <= m0) pos.emplace_back(i, j);
    }
    if (pos.empty()) continue;
    AffMat ck = k <= rem.degree() ? rem.coeff(k).symmetrized() : AffMat(q, q);
    double w = 1.0 / static_cast<double>(pos.size());
    for (auto [i, j] : pos) {
      double scale = (i == j) ? w : 0.5 * w;
      for (int r = 0; r < q; ++r)
        for (int s = 0; s < q; ++s) {
          AffExpr v = ck(r, s) * scale;
          g0(i * q + r, j * q + s) += v;
          if (i != j) g0(j * q + s, i * q + r) += v;
        }
    }

    // homogeneous directions: symmetric transfers between consecutive
    // positions of the antidiagonal, and free antisymmetric parts of
    // off-diagonal positions
    for (size_t t = 0; t + 1 < pos.size(); ++t) {
      auto [i1, j1] = pos[t];
      auto [i2, j2] = pos[t + 1];
      for (int r = 0; r < q; ++r)
        for (int s = r; s < q; ++s) {
          AffExpr lam = AffExpr::variable(builder.new_var());
          auto insert = [&](int bi, int bj, double sign) {
            double sc = (bi == bj) ? sign : 0.5 * sign;
            g0(bi * q + r, bj * q + s) += lam * sc;
            if (r != s) g0(bi * q + s, bj * q + r) += lam * sc;
            if (bi != bj) {
              g0(bj * q + s, bi * q + r) += lam * sc;
              if (r != s) g0(bj * q + r, bi * q + s) += lam * sc;
            }
          };
          insert(i1, j1, +1.0);
          insert(i2, j2, -1.0);
        }
    }
    for (auto [i, j] : pos) {
      if (i == j) continue;
      for (int r = 0; r < q; ++r)
        for (int s = r + 1; s < q; ++s) {
          AffExpr lam = AffExpr::variable(builder.new_var());
          g0(i * q + r, j * q + s) += lam;
          g0(j * q + s, i * q + r) += lam;
          g0(i * q + s, j * q + r) -= lam;
          g0(j * q + r, i * q + s) -= lam;
        }
    }
  }
  rel.gram0_block = builder.add_psd_block(g0, label + "/base");
  return rel;
}

GridCheck grid_verify_lyapunov(const ClockMatrixFn& flow, const ClockMatrixFn& jump,
                               const std::function<Matrix(double)>& cert,
                               const std::function<Matrix(double)>& cert_dot,
                               const DwellTimeSpec& dwell, int grid_points, double eps) {
  GridCheck g;
  g.min_cert_eig = std::numeric_limits<double>::infinity();
  g.max_flow_eig = -std::numeric_limits<double>::infinity();
  g.max_jump_eig = -std::numeric_limits<double>::infinity();
  const int n = std::max(grid_points, 2);
  const Matrix x0 = cert(0.0);
  for (int i = 0; i < n; ++i) {
    double tau = dwell.t_max * i / (n - 1);
    Matrix x = cert(tau);
    Matrix a = flow(tau);
    g.min_cert_eig = std::min(g.min_cert_eig, min_eig(x));
    Matrix fl = cert_dot(tau) + a.transpose() * x + x * a;
    g.max_flow_eig = std::max(g.max_flow_eig, max_eig(fl));
  }
  for (int i = 0; i < n; ++i) {
    double tau = dwell.t_min + (dwell.t_max - dwell.t_min) * i / (n - 1);
    Matrix aj = jump(tau);
    Matrix jm = -cert(tau) + aj.transpose() * x0 * aj;
    g.max_jump_eig = std::max(g.max_jump_eig, max_eig(jm));
  }
  g.pass = g.min_cert_eig >= eps / 2 && g.max_flow_eig <= -eps / 2 &&
           g.max_jump_eig <= -eps / 2;
  return g;
}

namespace {

std::string weakest_label(const SdpProblem& p, const SdpSolution& s) {
  ResidualReport rep = check_residuals(p, s);
  if (rep.worst_block < 0) return "";
  return p.blocks[static_cast<size_t>(rep.worst_block)].label;
}

}  // namespace

AnalysisResult analyze_clock_lyapunov(const PolyMat& flow, const PolyMat& jump,
                                      const DwellTimeSpec& dwell,
                                      const AnalysisOptions& opts) {
  if (flow.rows() != flow.cols() || jump.rows() != jump.cols() ||
      flow.rows() != jump.rows())
    throw std::invalid_argument("analyze: dimension mismatch");
  const int n = flow.rows();
  const double T = dwell.t_max;

  // Work on the normalized clock s = tau / t_max.
  PolyMat a_s = flow.rescale_clock(T);
  PolyMat aj_s = jump.rescale_clock(T);

  SdpBuilder builder;
  APolyMat x = builder.new_sym_poly(n, opts.x_degree);

  relax_interval_negativity(builder, -x, 0.0, 1.0, opts.eps, opts.mult_degree, "positivity");
  APolyMat fl = x.derivative() * (1.0 / T) + a_s.transpose() * x + x * a_s;
  relax_interval_negativity(builder, fl.symmetrized(), 0.0, 1.0, opts.eps,
                            opts.mult_degree, "flow");
  APolyMat jm = -x + (aj_s.transpose() * x.at_zero()) * aj_s;
  relax_interval_negativity(builder, jm.symmetrized(), dwell.t_min / T, 1.0, opts.eps,
                            opts.mult_degree, "jump");

  SdpProblem prob = builder.take();
  SdpSolution sol = solve(prob, opts.solver);

  AnalysisResult res;
  res.status = sol.status;
  res.margin = sol.margin;
  res.weakest_condition = weakest_label(prob, sol);
  if (sol.status != SdpStatus::Feasible) return res;

  res.certificate = force_sym(x.eval_vars(sol.y)).rescale_clock(1.0 / T);

  PolyMat xdot = res.certificate.derivative();
  res.grid = grid_verify_lyapunov(
      to_fn(flow), to_fn(jump),
      [&](double t) { return res.certificate.eval(t); },
      [&](double t) { return xdot.eval(t); }, dwell, opts.verify_grid, opts.eps);
  if (!res.grid.pass) res.status = SdpStatus::NumericalFailure;
  return res;
}

AnalysisResult analyze_svariable(const Matrix& a, const Matrix& a_jump,
                                 const DwellTimeSpec& dwell, double rho,
                                 const AnalysisOptions& opts) {
  if (a.rows() != a.cols() || a_jump.rows() != a_jump.cols() || a.rows() != a_jump.rows())
    throw std::invalid_argument("analyze_svariable: dimension mismatch");
  if (!(rho > 0)) throw std::invalid_argument("analyze_svariable: rho must be positive");
  const int n = static_cast<int>(a.rows());
  const double T = dwell.t_max;

  SdpBuilder builder;
  APolyMat x = builder.new_sym_poly(n, opts.x_degree);
  AffMat g = builder.new_full(n, n);
  AffMat gj = builder.new_full(n, n);

  relax_interval_negativity(builder, -x, 0.0, 1.0, opts.eps, opts.mult_degree, "positivity");

  APolyMat ga = APolyMat::from_mat(g * a);       // G A
  APolyMat gat = ga.transpose();                 // A^T G^T
  APolyMat gsym = APolyMat::from_mat(g + g.transpose());
  APolyMat f11 = x.derivative() * (1.0 / T) + gat + ga;
  APolyMat f12 = x + gat * rho - APolyMat::from_mat(g);
  APolyMat flow = APolyMat::block2x2(f11, f12, f12.transpose(), gsym * (-rho));
  relax_interval_negativity(builder, flow.symmetrized(), 0.0, 1.0, opts.eps,
                            opts.mult_degree, "flow");

  APolyMat gja = APolyMat::from_mat(gj * a_jump);  // G_J A_J
  APolyMat j22 = x.at_zero() - APolyMat::from_mat(gj + gj.transpose());
  APolyMat jm = APolyMat::block2x2(-x, gja.transpose(), gja, j22);
  relax_interval_negativity(builder, jm.symmetrized(), dwell.t_min / T, 1.0, opts.eps,
                            opts.mult_degree, "jump");

  SdpProblem prob = builder.take();
  SdpSolution sol = solve(prob, opts.solver);

  AnalysisResult res;
  res.status = sol.status;
  res.margin = sol.margin;
  res.rho = rho;
  res.weakest_condition = weakest_label(prob, sol);
  if (sol.status != SdpStatus::Feasible) return res;

  res.certificate = force_sym(x.eval_vars(sol.y)).rescale_clock(1.0 / T);
  res.g_flow = g.eval(sol.y);
  res.g_jump = gj.eval(sol.y);

  // grid re-verification of the three conditions
  const int gp = opts.verify_grid;
  PolyMat xdot = res.certificate.derivative();
  GridCheck& gc = res.grid;
  gc.min_cert_eig = std::numeric_limits<double>::infinity();
  gc.max_flow_eig = -std::numeric_limits<double>::infinity();
  gc.max_jump_eig = -std::numeric_limits<double>::infinity();
  const Matrix x0 = res.certificate.eval(0.0);
  const Matrix& gf = res.g_flow;
  const Matrix& gjm = res.g_jump;
  for (int i = 0; i < gp; ++i) {
    double tau = dwell.t_max * i / (gp - 1);
    Matrix xt = res.certificate.eval(tau);
    gc.min_cert_eig = std::min(gc.min_cert_eig, min_eig(xt));
    Matrix f11v = xdot.eval(tau) + a.transpose() * gf.transpose() + gf * a;
    Matrix f12v = xt + rho * a.transpose() * gf.transpose() - gf;
    Matrix fl(2 * n, 2 * n);
    fl << f11v, f12v, f12v.transpose(), -rho * (gf + gf.transpose());
    gc.max_flow_eig = std::max(gc.max_flow_eig, max_eig(fl));
  }
  for (int i = 0; i < gp; ++i) {
    double tau = dwell.t_min + (dwell.t_max - dwell.t_min) * i / (gp - 1);
    Matrix xt = res.certificate.eval(tau);
    Matrix jmv(2 * n, 2 * n);
    jmv << -xt, a_jump.transpose() * gjm.transpose(), gjm * a_jump,
        x0 - gjm - gjm.transpose();
    gc.max_jump_eig = std::max(gc.max_jump_eig, max_eig(jmv));
  }
  gc.pass = gc.min_cert_eig >= opts.eps / 2 && gc.max_flow_eig <= -opts.eps / 2 &&
            gc.max_jump_eig <= -opts.eps / 2;
  if (!gc.pass) res.status = SdpStatus::NumericalFailure;
  return res;
}

AnalysisResult analyze_svariable_sweep(const Matrix& a, const Matrix& a_jump,
                                       const DwellTimeSpec& dwell,
                                       const std::vector<double>& rho_grid,
                                       const AnalysisOptions& opts) {
  if (rho_grid.empty()) throw std::invalid_argument("sweep: empty rho grid");
  AnalysisResult best;
  bool have = false;
  for (double rho : rho_grid) {
    AnalysisResult r = analyze_svariable(a, a_jump, dwell, rho, opts);
    if (!have || (r.feasible() && !best.feasible()) ||
        (r.feasible() == best.feasible() && r.margin > best.margin)) {
      best = r;
      have = true;
    }
  }
  return best;
}

std::vector<double> default_rho_grid() {
  std::vector<double> g;
  for (int k = 0; k <= 10; ++k) g.push_back(std::pow(10.0, -3.0 + 0.5 * k));
  return g;
}

}  // namespace clocklmi

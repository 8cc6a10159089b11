#include "clocklmi/synth.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace clocklmi {

namespace {

PolyMat force_sym(const PolyMat& p) {
  std::vector<Matrix> cs;
  cs.reserve(static_cast<size_t>(p.degree()) + 1);
  for (int k = 0; k <= p.degree(); ++k) {
    Matrix c = p.coeff(k);
    cs.push_back(0.5 * (c + c.transpose()));
  }
  return PolyMat(std::move(cs), true);
}

double cond_svd(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  double smin = svd.singularValues().minCoeff();
  if (smin <= 0) return std::numeric_limits<double>::infinity();
  return svd.singularValues().maxCoeff() / smin;
}

APolyMat aconst(const Matrix& m) { return APolyMat::from_const(PolyMat::constant(m)); }

// Integral of the trace over the normalized clock interval, as a linear
// functional of the decision variables.
void add_trace_weights(Vector& cost, const APolyMat& p) {
  for (int k = 0; k <= p.degree(); ++k) {
    const AffMat& ck = p.coeffs()[static_cast<size_t>(k)];
    for (int i = 0; i < p.rows(); ++i)
      for (const auto& [var, coef] : ck(i, i).terms())
        cost[var] += coef / static_cast<double>(k + 1);
  }
}

// Margin maximization finds feasibility but inflates the certificate scale,
// which ruins the conditioning of the completion used for controller
// recovery. A second solve fixes a healthy margin and minimizes the
// certificate size instead.
SdpSolution solve_polished(const SdpProblem& prob, const Vector& scale_cost,
                           const SolverOptions& so) {
  SdpSolution first = solve(prob, so);
  if (first.status != SdpStatus::Feasible) return first;
  double delta = std::min(1.0, first.margin / 2.0);
  SdpProblem shifted = prob;
  for (SdpBlock& b : shifted.blocks)
    b.f0.diagonal().array() -= delta;
  shifted.objective = scale_cost;
  SdpSolution polished = solve_min_cost(shifted, so);
  if (polished.status != SdpStatus::Feasible) return first;
  ResidualReport rep = check_residuals(prob, polished.y);
  if (!(rep.min_margin > 0)) return first;
  polished.status = SdpStatus::Feasible;
  polished.margin = rep.min_margin;
  polished.residuals = rep.margins;
  return polished;
}

// [[0, B], [I, 0]] and [[I, 0], [0, C]] of the closed-loop factorization
Matrix bbar_of(const Matrix& b, int n) {
  Matrix m = Matrix::Zero(2 * n, n + b.cols());
  m.topRightCorner(n, b.cols()) = b;
  m.bottomLeftCorner(n, n) = Matrix::Identity(n, n);
  return m;
}

Matrix cbar_of(const Matrix& c, int n) {
  Matrix m = Matrix::Zero(n + c.rows(), 2 * n);
  m.topRightCorner(n, n) = Matrix::Identity(n, n);
  m.bottomLeftCorner(c.rows(), n) = c;
  return m;
}

// natural cubic spline through uniform samples, evaluated entrywise
class MatrixSpline {
public:
  MatrixSpline() = default;
  MatrixSpline(std::vector<double> ts, std::vector<Matrix> samples)
      : ts_(std::move(ts)), y_(std::move(samples)) {
    const size_t n = ts_.size();
    rows_ = static_cast<int>(y_[0].rows());
    cols_ = static_cast<int>(y_[0].cols());
    m_.assign(n, Matrix::Zero(rows_, cols_));
    if (n < 3) return;
    // second derivatives from the tridiagonal natural-spline system
    const size_t in = n - 2;
    std::vector<double> h(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) h[i] = ts_[i + 1] - ts_[i];
    std::vector<double> a(in), bdiag(in), cup(in);
    std::vector<Matrix> rhs(in, Matrix::Zero(rows_, cols_));
    for (size_t i = 0; i < in; ++i) {
      a[i] = h[i];
      bdiag[i] = 2.0 * (h[i] + h[i + 1]);
      cup[i] = h[i + 1];
      rhs[i] = 6.0 * ((y_[i + 2] - y_[i + 1]) / h[i + 1] - (y_[i + 1] - y_[i]) / h[i]);
    }
    for (size_t i = 1; i < in; ++i) {
      double w = a[i] / bdiag[i - 1];
      bdiag[i] -= w * cup[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    m_[in] = rhs[in - 1] / bdiag[in - 1];
    for (size_t i = in - 1; i >= 1; --i) {
      m_[i] = (rhs[i - 1] - cup[i - 1] * m_[i + 1]) / bdiag[i - 1];
      if (i == 1) break;
    }
  }

  Matrix eval(double t) const {
    const size_t n = ts_.size();
    if (n == 1) return y_[0];
    size_t i = 0;
    if (t >= ts_[n - 2])
      i = n - 2;
    else if (t > ts_[0])
      i = static_cast<size_t>(std::upper_bound(ts_.begin(), ts_.end(), t) - ts_.begin()) - 1;
    double h = ts_[i + 1] - ts_[i];
    double ua = (ts_[i + 1] - t) / h, ub = (t - ts_[i]) / h;
    return ua * y_[i] + ub * y_[i + 1] +
           ((ua * ua * ua - ua) * m_[i] + (ub * ub * ub - ub) * m_[i + 1]) * (h * h / 6.0);
  }

private:
  std::vector<double> ts_;
  std::vector<Matrix> y_;
  std::vector<Matrix> m_;  // second derivatives, natural ends
  int rows_ = 0, cols_ = 0;
};

}  // namespace

Matrix kernel_basis(const Matrix& m) {
  const int cols = static_cast<int>(m.cols());
  if (m.rows() == 0 || m.size() == 0) return Matrix::Identity(cols, cols);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  double smax = sv.size() ? sv.maxCoeff() : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-10 * smax && sv[i] > 0) ++rank;
  if (smax == 0.0) rank = 0;
  return svd.matrixV().rightCols(cols - rank);
}

// ---------------------------------------------------------------------------
// Route 1
// ---------------------------------------------------------------------------

TransformDesign synth_transform_ltv(const ImpulsivePlant& plant, const SynthOptions& opts) {
  const int n = plant.n(), p = plant.p(), q = plant.q();
  const int pj = plant.p_jump(), qj = plant.q_jump();
  const double T = plant.dwell.t_max;
  const double smin = plant.dwell.t_min / T;

  SdpBuilder b;
  APolyMat x = b.new_sym_poly(n, opts.degree);
  APolyMat y = b.new_sym_poly(n, opts.degree);
  APolyMat k = b.new_full_poly(n, n, opts.degree);
  APolyMat l = b.new_full_poly(n, q, opts.degree);
  APolyMat m = b.new_full_poly(p, n, opts.degree);
  APolyMat nn = b.new_full_poly(p, q, opts.degree);
  APolyMat kj = b.new_full_poly(n, n, opts.degree);
  APolyMat lj = b.new_full_poly(n, qj, opts.degree);
  APolyMat mj = b.new_full_poly(pj, n, opts.degree);
  APolyMat nj = b.new_full_poly(pj, qj, opts.degree);

  APolyMat eye = aconst(Matrix::Identity(n, n));
  APolyMat xbig = APolyMat::block2x2(y, eye, eye, x);
  relax_interval_negativity(b, -xbig, 0.0, 1.0, opts.eps, opts.mult_degree, "coupling");

  // flow inequality in the transformed parameters
  APolyMat abold = APolyMat::block2x2(plant.a * y, aconst(plant.a),
                                      aconst(Matrix::Zero(n, n)), x * plant.a);
  APolyMat klmn = APolyMat::block2x2(k, l, m, nn);
  abold = abold + bbar_of(plant.b, n) * klmn * cbar_of(plant.c, n);
  APolyMat zbold = APolyMat::block2x2(-(y.derivative() * (1.0 / T)), aconst(Matrix::Zero(n, n)),
                                      aconst(Matrix::Zero(n, n)), x.derivative() * (1.0 / T));
  APolyMat flow = zbold + abold.transpose() + abold;
  relax_interval_negativity(b, flow.symmetrized(), 0.0, 1.0, opts.eps, opts.mult_degree,
                            "flow");

  // jump inequality couples the certificate at the jump clock and at zero
  APolyMat ajbold = APolyMat::block2x2(plant.a_jump * y, aconst(plant.a_jump),
                                       aconst(Matrix::Zero(n, n)), x.at_zero() * plant.a_jump);
  APolyMat klmn_j = APolyMat::block2x2(kj, lj, mj, nj);
  ajbold = ajbold + bbar_of(plant.b_jump, n) * klmn_j * cbar_of(plant.c_jump, n);
  APolyMat jm = APolyMat::block2x2(xbig, ajbold.transpose(), ajbold, xbig.at_zero());
  relax_interval_negativity(b, -jm.symmetrized(), smin, 1.0, opts.eps, opts.mult_degree,
                            "jump");

  SdpProblem prob = b.take();
  Vector scale_cost = Vector::Zero(prob.nvars);
  add_trace_weights(scale_cost, x);
  add_trace_weights(scale_cost, y);
  TransformDesign d;
  d.nvars = prob.nvars;
  SdpSolution sol = solve_polished(prob, scale_cost, opts.solver);
  d.status = sol.status;
  d.margin = sol.margin;
  if (sol.status != SdpStatus::Feasible) return d;

  auto unscale = [&](const APolyMat& v) { return v.eval_vars(sol.y).rescale_clock(1.0 / T); };
  d.vars.x = force_sym(x.eval_vars(sol.y)).rescale_clock(1.0 / T);
  d.vars.y = force_sym(y.eval_vars(sol.y)).rescale_clock(1.0 / T);
  d.vars.k = unscale(k);
  d.vars.l = unscale(l);
  d.vars.m = unscale(m);
  d.vars.n = unscale(nn);
  d.vars.k_j = unscale(kj);
  d.vars.l_j = unscale(lj);
  d.vars.m_j = unscale(mj);
  d.vars.n_j = unscale(nj);
  return d;
}

ClockController reconstruct_ltv_controller(const TransformVars& vars,
                                           const ImpulsivePlant& plant) {
  const int n = plant.n(), p = plant.p(), q = plant.q();
  const int pj = plant.p_jump(), qj = plant.q_jump();
  const PolyMat xdot = vars.x.derivative();
  const PolyMat ydot = vars.y.derivative();

  // the completion must stay comfortably invertible on both intervals
  for (int i = 0; i <= 400; ++i) {
    double tau = plant.dwell.t_max * i / 400.0;
    Matrix xm = vars.x.eval(tau), ym = vars.y.eval(tau);
    if (cond_svd(Matrix::Identity(n, n) - xm * ym) > 1e12)
      throw NearSingularCompletion("completion I - X Y near singular");
  }

  TransformVars v = vars;
  ImpulsivePlant pl = plant;
  auto flow = [v, pl, xdot, ydot, n, p, q](double tau) {
    Matrix xm = v.x.eval(tau), ym = v.y.eval(tau);
    Matrix xd = xdot.eval(tau);
    Matrix xinv = xm.ldlt().solve(Matrix::Identity(n, n));
    Matrix vm = xinv - ym;                       // V = X^{-1} - Y, symmetric
    Matrix udotvt = xd * vm.transpose();         // U = X, so Udot = Xdot
    Matrix mid(n + p, n + q);
    mid << v.k.eval(tau) - xm * pl.a * ym - xd * ym - udotvt, v.l.eval(tau), v.m.eval(tau),
        v.n.eval(tau);
    Matrix lhs(n + p, n + p);
    lhs << xm, xm * pl.b, Matrix::Zero(p, n), Matrix::Identity(p, p);
    Matrix rhs(n + q, n + q);
    rhs << vm.transpose(), Matrix::Zero(n, q), pl.c * ym, Matrix::Identity(q, q);
    Matrix theta = lhs.partialPivLu().solve(mid);
    return Matrix(rhs.transpose().partialPivLu().solve(theta.transpose()).transpose());
  };
  auto jump = [v, pl, n, pj, qj](double tau) {
    Matrix x0 = v.x.eval(0.0);
    Matrix ym = v.y.eval(tau);
    Matrix xinv = v.x.eval(tau).ldlt().solve(Matrix::Identity(n, n));
    Matrix vm = xinv - ym;
    Matrix mid(n + pj, n + qj);
    mid << v.k_j.eval(tau) - x0 * pl.a_jump * ym, v.l_j.eval(tau), v.m_j.eval(tau),
        v.n_j.eval(tau);
    Matrix lhs(n + pj, n + pj);
    lhs << x0, x0 * pl.b_jump, Matrix::Zero(pj, n), Matrix::Identity(pj, pj);
    Matrix rhs(n + qj, n + qj);
    rhs << vm.transpose(), Matrix::Zero(n, qj), pl.c_jump * ym, Matrix::Identity(qj, qj);
    Matrix theta = lhs.partialPivLu().solve(mid);
    return Matrix(rhs.transpose().partialPivLu().solve(theta.transpose()).transpose());
  };

  ClockController c;
  c.form = ClockController::Form::RationalClosedForm;
  c.order = n;
  c.p = p;
  c.q = q;
  c.p_jump = pj;
  c.q_jump = qj;
  c.flow_block = flow;
  c.jump_block = jump;
  return c;
}

// ---------------------------------------------------------------------------
// Route 2
// ---------------------------------------------------------------------------

ElimDesign synth_elim_ltv(const ImpulsivePlant& plant, const SynthOptions& opts,
                          const std::optional<KernelBases>& kernels) {
  const int n = plant.n();
  const double T = plant.dwell.t_max;
  const double smin = plant.dwell.t_min / T;

  KernelBases kb;
  if (kernels) {
    kb = *kernels;
  } else {
    kb.v = kernel_basis(plant.c);
    kb.u = kernel_basis(plant.b.transpose());
    kb.v_jump = kernel_basis(plant.c_jump);
    kb.u_jump = kernel_basis(plant.b_jump.transpose());
  }

  SdpBuilder b;
  APolyMat x = b.new_sym_poly(n, opts.degree);
  APolyMat y = b.new_sym_poly(n, opts.degree);

  APolyMat eye = aconst(Matrix::Identity(n, n));
  relax_interval_negativity(b, -APolyMat::block2x2(y, eye, eye, x), 0.0, 1.0, opts.eps,
                            opts.mult_degree, "coupling");

  if (kb.v.cols() > 0) {
    APolyMat f = x.derivative() * (1.0 / T) + plant.a.transpose() * x + x * plant.a;
    relax_interval_negativity(b, congruence(f, kb.v).symmetrized(), 0.0, 1.0, opts.eps,
                              opts.mult_degree, "flow/x");
  }
  if (kb.u.cols() > 0) {
    APolyMat f = plant.a * y + y * plant.a.transpose() - y.derivative() * (1.0 / T);
    relax_interval_negativity(b, congruence(f, kb.u).symmetrized(), 0.0, 1.0, opts.eps,
                              opts.mult_degree, "flow/y");
  }
  if (kb.v_jump.cols() > 0) {
    APolyMat f = -x + (plant.a_jump.transpose() * x.at_zero()) * plant.a_jump;
    relax_interval_negativity(b, congruence(f, kb.v_jump).symmetrized(), smin, 1.0, opts.eps,
                              opts.mult_degree, "jump/x");
  }
  if (kb.u_jump.cols() > 0) {
    APolyMat f = (plant.a_jump * y) * plant.a_jump.transpose() - y.at_zero();
    relax_interval_negativity(b, congruence(f, kb.u_jump).symmetrized(), smin, 1.0, opts.eps,
                              opts.mult_degree, "jump/y");
  }

  SdpProblem prob = b.take();
  Vector scale_cost = Vector::Zero(prob.nvars);
  add_trace_weights(scale_cost, x);
  add_trace_weights(scale_cost, y);
  ElimDesign d;
  d.nvars = prob.nvars;
  SdpSolution sol = solve_polished(prob, scale_cost, opts.solver);
  d.status = sol.status;
  d.margin = sol.margin;
  if (sol.status != SdpStatus::Feasible) return d;
  d.x = force_sym(x.eval_vars(sol.y)).rescale_clock(1.0 / T);
  d.y = force_sym(y.eval_vars(sol.y)).rescale_clock(1.0 / T);
  return d;
}

Completion make_completion(const PolyMat& x, const PolyMat& y) {
  return Completion{x, y, x.derivative(), y.derivative()};
}

Matrix Completion::eval(double tau) const {
  const int n = x.rows();
  Matrix xm = x.eval(tau), ym = y.eval(tau);
  Matrix xinv = xm.ldlt().solve(Matrix::Identity(n, n));
  Matrix v = 0.5 * ((xinv - ym) + (xinv - ym).transpose());
  Matrix vinv = v.ldlt().solve(Matrix::Identity(n, n));
  Matrix out(2 * n, 2 * n);
  out << xm, xm, xm, xm - vinv;
  return 0.5 * (out + out.transpose());
}

Matrix Completion::eval_dot(double tau) const {
  const int n = x.rows();
  Matrix xm = x.eval(tau), ym = y.eval(tau);
  Matrix xd = xdot.eval(tau), yd = ydot.eval(tau);
  Matrix xinv = xm.ldlt().solve(Matrix::Identity(n, n));
  Matrix v = 0.5 * ((xinv - ym) + (xinv - ym).transpose());
  Matrix vinv = v.ldlt().solve(Matrix::Identity(n, n));
  Matrix vdot = -xinv * xd * xinv - yd;
  Matrix d22 = xd + vinv * vdot * vinv;
  Matrix out(2 * n, 2 * n);
  out << xd, xd, xd, d22;
  return 0.5 * (out + out.transpose());
}

double Completion::completion_cond(double tau) const {
  const int n = x.rows();
  return cond_svd(Matrix::Identity(n, n) - x.eval(tau) * y.eval(tau));
}

std::optional<Matrix> min_norm_theta(const Matrix& psi, const Matrix& q, const Matrix& p,
                                     double delta, double theta_box) {
  const int tr = static_cast<int>(q.rows());
  const int tc = static_cast<int>(p.rows());
  const int dim = static_cast<int>(psi.rows());

  SdpBuilder b;
  AffMat theta = b.new_full(tr, tc);
  AffMat slack = b.new_sym(tr);

  // [[S, Theta], [Theta^T, I]] >= 0 bounds tr(S) >= |Theta|_F^2
  AffMat norm_block(tr + tc, tr + tc);
  norm_block.paste(0, 0, slack);
  norm_block.paste(0, tr, theta);
  norm_block.paste(tr, 0, theta.transpose());
  norm_block.paste(tr, tr, AffMat::from_const(Matrix::Identity(tc, tc)));
  b.add_psd_block(norm_block, "norm");

  AffMat lin = Matrix(q.transpose()) * theta * p;
  AffMat full = AffMat::from_const(-psi - delta * Matrix::Identity(dim, dim)) - lin - lin.transpose();
  b.add_psd_block(full.symmetrized(), "ineq");

  Vector cost = Vector::Zero(b.num_vars());
  // trace of S: its diagonal variables are the first of each row block
  // (recover indices from the AffMat directly)
  for (int i = 0; i < tr; ++i) {
    const AffExpr& e = slack(i, i);
    cost[e.terms()[0].first] = 1.0;
  }
  SdpProblem prob = b.take(cost);
  SolverOptions so;
  so.box_radius = theta_box;
  so.gap_tol = 1e-9;
  SdpSolution sol = solve_min_cost(prob, so);
  if (sol.status != SdpStatus::Feasible) return std::nullopt;
  return theta.eval(sol.y);
}

ClockController reconstruct_from_xy(const PolyMat& x, const PolyMat& y,
                                    const ImpulsivePlant& plant, const SynthOptions& opts,
                                    const ReconstructOptions& ropts) {
  const int n = plant.n(), p = plant.p(), q = plant.q();
  const int pj = plant.p_jump(), qj = plant.q_jump();
  Completion comp = make_completion(x, y);

  const Matrix bbar = bbar_of(plant.b, n);
  const Matrix cbar = cbar_of(plant.c, n);
  const Matrix bbar_j = bbar_of(plant.b_jump, n);
  const Matrix cbar_j = cbar_of(plant.c_jump, n);
  Matrix abar = Matrix::Zero(2 * n, 2 * n);
  abar.topLeftCorner(n, n) = plant.a;
  Matrix abar_j = Matrix::Zero(2 * n, 2 * n);
  abar_j.topLeftCorner(n, n) = plant.a_jump;

  const Matrix x0 = comp.eval(0.0);
  const std::vector<double> deltas = {opts.eps / 2, opts.eps / 8, opts.eps / 32,
                                      opts.eps / 128, 1e-9};

  auto solve_point = [&](const Matrix& psi, const Matrix& qm, const Matrix& pm) {
    for (double delta : deltas) {
      auto th = min_norm_theta(psi, qm, pm, delta, ropts.theta_box);
      if (th) return *th;
    }
    throw NearSingularCompletion("pointwise controller recovery infeasible");
  };

  const int g = std::max(ropts.grid_points, 4);
  std::vector<double> flow_ts(static_cast<size_t>(g)), jump_ts(static_cast<size_t>(g));
  std::vector<Matrix> flow_th, jump_th;
  flow_th.reserve(static_cast<size_t>(g));
  jump_th.reserve(static_cast<size_t>(g));
  for (int i = 0; i < g; ++i) {
    double tau = plant.dwell.t_max * i / (g - 1);
    flow_ts[static_cast<size_t>(i)] = tau;
    Matrix xc = comp.eval(tau);
    Matrix psi = comp.eval_dot(tau) + abar.transpose() * xc + xc * abar;
    Matrix qm = bbar.transpose() * xc;
    flow_th.push_back(solve_point(psi, qm, cbar));
  }
  for (int i = 0; i < g; ++i) {
    double tau =
        plant.dwell.t_min + (plant.dwell.t_max - plant.dwell.t_min) * i / (g - 1);
    jump_ts[static_cast<size_t>(i)] = tau;
    Matrix xc = comp.eval(tau);
    Matrix psi(4 * n, 4 * n);
    psi << -xc, abar_j.transpose() * x0, x0 * abar_j, -x0;
    Matrix qm(n + pj, 4 * n);
    qm << Matrix::Zero(n + pj, 2 * n), bbar_j.transpose() * x0;
    Matrix pm(n + qj, 4 * n);
    pm << cbar_j, Matrix::Zero(n + qj, 2 * n);
    jump_th.push_back(solve_point(psi, qm, pm));
  }

  MatrixSpline flow_sp(flow_ts, flow_th), jump_sp(jump_ts, jump_th);
  ClockController c;
  c.form = ClockController::Form::GridInterpolated;
  c.order = n;
  c.p = p;
  c.q = q;
  c.p_jump = pj;
  c.q_jump = qj;
  c.flow_block = [flow_sp](double tau) { return flow_sp.eval(tau); };
  c.jump_block = [jump_sp](double tau) { return jump_sp.eval(tau); };
  return c;
}

// ---------------------------------------------------------------------------
// Route 3
// ---------------------------------------------------------------------------

LtiDesign synth_lti(const ImpulsivePlant& plant, double rho, const SynthOptions& opts) {
  if (!(rho > 0)) throw std::invalid_argument("synth_lti: rho must be positive");
  const int n = plant.n(), p = plant.p(), q = plant.q();
  const int pj = plant.p_jump(), qj = plant.q_jump();
  const double T = plant.dwell.t_max;
  const double smin = plant.dwell.t_min / T;

  SdpBuilder b;
  APolyMat xbig = b.new_sym_poly(2 * n, opts.degree);
  AffMat g = b.new_full(n, n);
  AffMat h = b.new_full(n, n);
  AffMat s = b.new_full(n, n);
  AffMat gj = b.new_full(n, n);
  AffMat sj = b.new_full(n, n);
  AffMat k = b.new_full(n, n), l = b.new_full(n, q), m = b.new_full(p, n),
         nmat = b.new_full(p, q);
  AffMat kj = b.new_full(n, n), lj = b.new_full(n, qj), mj = b.new_full(pj, n),
         nj = b.new_full(pj, qj);

  relax_interval_negativity(b, -xbig, 0.0, 1.0, opts.eps, opts.mult_degree, "positivity");

  AffMat ident = AffMat::from_const(Matrix::Identity(n, n));
  AffMat gbold = AffMat::block2x2(h, ident, s, g);
  AffMat gbold_j = AffMat::block2x2(h, ident, sj, gj);

  AffMat abold = AffMat::block2x2(plant.a * h, AffMat::from_const(plant.a),
                                  AffMat(n, n), g * plant.a);
  AffMat klmn = AffMat::block2x2(k, l, m, nmat);
  abold = abold + Matrix(bbar_of(plant.b, n)) * klmn * Matrix(cbar_of(plant.c, n));

  AffMat ajbold = AffMat::block2x2(plant.a_jump * h, AffMat::from_const(plant.a_jump),
                                   AffMat(n, n), gj * plant.a_jump);
  AffMat klmn_j = AffMat::block2x2(kj, lj, mj, nj);
  ajbold = ajbold +
           Matrix(bbar_of(plant.b_jump, n)) * klmn_j * Matrix(cbar_of(plant.c_jump, n));

  APolyMat f11 = xbig.derivative() * (1.0 / T) + APolyMat::from_mat(abold + abold.transpose());
  APolyMat f12 = xbig + APolyMat::from_mat(abold.transpose() * rho - gbold);
  APolyMat f22 = APolyMat::from_mat((gbold + gbold.transpose()) * (-rho));
  APolyMat flow = APolyMat::block2x2(f11, f12, f12.transpose(), f22);
  relax_interval_negativity(b, flow.symmetrized(), 0.0, 1.0, opts.eps, opts.mult_degree,
                            "flow");

  APolyMat j22 = xbig.at_zero() - APolyMat::from_mat(gbold_j + gbold_j.transpose());
  APolyMat jm = APolyMat::block2x2(-xbig, APolyMat::from_mat(ajbold.transpose()),
                                   APolyMat::from_mat(ajbold), j22);
  relax_interval_negativity(b, jm.symmetrized(), smin, 1.0, opts.eps, opts.mult_degree,
                            "jump");

  SdpProblem prob = b.take();
  Vector scale_cost = Vector::Zero(prob.nvars);
  add_trace_weights(scale_cost, xbig);
  LtiDesign d;
  d.nvars = prob.nvars;
  SdpSolution sol = solve_polished(prob, scale_cost, opts.solver);
  d.status = sol.status;
  d.margin = sol.margin;
  d.vars.rho = rho;
  if (sol.status != SdpStatus::Feasible) return d;

  d.vars.x_big = force_sym(xbig.eval_vars(sol.y)).rescale_clock(1.0 / T);
  d.vars.g = g.eval(sol.y);
  d.vars.h = h.eval(sol.y);
  d.vars.s = s.eval(sol.y);
  d.vars.g_jump = gj.eval(sol.y);
  d.vars.s_jump = sj.eval(sol.y);
  d.vars.k = k.eval(sol.y);
  d.vars.l = l.eval(sol.y);
  d.vars.m = m.eval(sol.y);
  d.vars.n = nmat.eval(sol.y);
  d.vars.k_j = kj.eval(sol.y);
  d.vars.l_j = lj.eval(sol.y);
  d.vars.m_j = mj.eval(sol.y);
  d.vars.n_j = nj.eval(sol.y);
  return d;
}

LtiDesign synth_lti_sweep(const ImpulsivePlant& plant, const std::vector<double>& rho_grid,
                          const SynthOptions& opts, bool first_feasible) {
  if (rho_grid.empty()) throw std::invalid_argument("synth_lti_sweep: empty grid");
  LtiDesign best;
  bool have = false;
  for (double rho : rho_grid) {
    LtiDesign d = synth_lti(plant, rho, opts);
    if (!have || (d.feasible() && !best.feasible()) ||
        (d.feasible() == best.feasible() && d.margin > best.margin)) {
      best = d;
      have = true;
    }
    if (first_feasible && best.feasible()) break;
  }
  return best;
}

LtiController reconstruct_lti_controller(const LtiVars& vars, const ImpulsivePlant& plant) {
  const int n = plant.n(), p = plant.p(), q = plant.q();
  const int pj = plant.p_jump(), qj = plant.q_jump();
  if (cond_svd(vars.h) > 1e12) throw SingularReconstruction("H near singular");
  Matrix hinv = vars.h.partialPivLu().solve(Matrix::Identity(n, n));
  Matrix v = vars.h.transpose();
  Matrix u = vars.s * hinv - vars.g;
  Matrix uj = vars.s_jump * hinv - vars.g_jump;
  if (cond_svd(u) > 1e12 || cond_svd(uj) > 1e12)
    throw SingularReconstruction("completion factor near singular");

  auto recover = [&](const Matrix& uu, const Matrix& gg, const Matrix& aa, const Matrix& bb,
                     const Matrix& cc, const Matrix& kk, const Matrix& ll, const Matrix& mm,
                     const Matrix& nn2, int pc, int qc) {
    Matrix lhs(n + pc, n + pc);
    lhs << uu, gg * bb, Matrix::Zero(pc, n), Matrix::Identity(pc, pc);
    Matrix mid(n + pc, n + qc);
    mid << kk - gg * aa * vars.h, ll, mm, nn2;
    Matrix rhs(n + qc, n + qc);
    rhs << v.transpose(), Matrix::Zero(n, qc), cc * vars.h, Matrix::Identity(qc, qc);
    Matrix th = lhs.partialPivLu().solve(mid);
    return Matrix(rhs.transpose().partialPivLu().solve(th.transpose()).transpose());
  };

  Matrix th = recover(u, vars.g, plant.a, plant.b, plant.c, vars.k, vars.l, vars.m, vars.n,
                      p, q);
  Matrix thj = recover(uj, vars.g_jump, plant.a_jump, plant.b_jump, plant.c_jump, vars.k_j,
                       vars.l_j, vars.m_j, vars.n_j, pj, qj);

  LtiController c;
  c.ac = th.topLeftCorner(n, n);
  c.bc = th.topRightCorner(n, q);
  c.cc = th.bottomLeftCorner(p, n);
  c.dc = th.bottomRightCorner(p, q);
  c.ac_jump = thj.topLeftCorner(n, n);
  c.bc_jump = thj.topRightCorner(n, qj);
  c.cc_jump = thj.bottomLeftCorner(pj, n);
  c.dc_jump = thj.bottomRightCorner(pj, qj);
  return c;
}

LtiCertificate lti_closed_loop_certificate(const LtiVars& vars, const ImpulsivePlant& plant) {
  const int n = plant.n();
  Matrix hinv = vars.h.partialPivLu().solve(Matrix::Identity(n, n));
  // Y = [[H, I], [V^T, 0]] with V = H^T
  Matrix ybig(2 * n, 2 * n);
  ybig << vars.h, Matrix::Identity(n, n), vars.h, Matrix::Zero(n, n);
  Matrix yinv = ybig.partialPivLu().solve(Matrix::Identity(2 * n, 2 * n));

  LtiCertificate lc;
  lc.cert = force_sym(congruence(vars.x_big, yinv));
  Matrix shinv = vars.s * hinv;
  Matrix sjhinv = vars.s_jump * hinv;
  Matrix hit = hinv.transpose();
  lc.g_flow = Matrix(2 * n, 2 * n);
  lc.g_flow << vars.g, shinv - vars.g, hit - vars.g, vars.g - shinv;
  lc.g_jump = Matrix(2 * n, 2 * n);
  lc.g_jump << vars.g_jump, sjhinv - vars.g_jump, hit - vars.g_jump, vars.g_jump - sjhinv;
  return lc;
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

VerificationReport verify_certificate(const ClosedLoop& cl,
                                      const std::function<Matrix(double)>& cert,
                                      const std::function<Matrix(double)>& cert_dot,
                                      int grid_points, double eps) {
  VerificationReport r;
  r.grid = grid_verify_lyapunov(cl.flow, cl.jump, cert, cert_dot, cl.dwell, grid_points, eps);
  r.pass = r.grid.pass;
  return r;
}

VerificationReport verify_certificate(const ClosedLoop& cl, const PolyMat& cert,
                                      int grid_points, double eps) {
  PolyMat d = cert.derivative();
  return verify_certificate(
      cl, [cert](double t) { return cert.eval(t); }, [d](double t) { return d.eval(t); },
      grid_points, eps);
}

}  // namespace clocklmi

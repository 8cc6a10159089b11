#include "clocklmi/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace clocklmi {

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Feasible: return "Feasible";
    case SdpStatus::Infeasible: return "Infeasible";
    case SdpStatus::MaxIterations: return "MaxIterations";
    case SdpStatus::NumericalFailure: return "NumericalFailure";
  }
  return "?";
}

void SdpBlock::add_entry(int var, int r, int c, double v) {
  if (v == 0.0) return;
  if (r > c) std::swap(r, c);
  auto it = std::lower_bound(vars.begin(), vars.end(), var);
  size_t pos = static_cast<size_t>(it - vars.begin());
  if (it == vars.end() || *it != var) {
    vars.insert(it, var);
    entries.insert(entries.begin() + static_cast<std::ptrdiff_t>(pos),
                   std::vector<SdpEntry>{});
  }
  for (SdpEntry& e : entries[pos]) {
    if (e.r == r && e.c == c) {
      e.v += v;
      return;
    }
  }
  entries[pos].push_back({r, c, v});
}

Matrix SdpBlock::value(const Vector& y) const {
  Matrix m = f0;
  if (diagonal) m = f0.diagonal().asDiagonal();
  for (size_t k = 0; k < vars.size(); ++k) {
    double yk = y[vars[k]];
    for (const SdpEntry& e : entries[k]) {
      m(e.r, e.c) += yk * e.v;
      if (e.r != e.c) m(e.c, e.r) += yk * e.v;
    }
  }
  return m;
}

double SdpBlock::min_eig(const Vector& y) const {
  Matrix m = value(y);
  if (diagonal) return m.diagonal().minCoeff();
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

int SdpProblem::total_dim() const {
  int d = 0;
  for (const SdpBlock& b : blocks) d += b.dim;
  return d;
}

AffMat SdpBuilder::new_sym(int n) {
  AffMat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      AffExpr v = AffExpr::variable(new_var());
      m(i, j) = v;
      m(j, i) = v;
    }
  return m;
}

AffMat SdpBuilder::new_full(int rows, int cols) {
  AffMat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = AffExpr::variable(new_var());
  return m;
}

APolyMat SdpBuilder::new_sym_poly(int n, int degree) {
  std::vector<AffMat> c;
  c.reserve(static_cast<size_t>(degree) + 1);
  for (int k = 0; k <= degree; ++k) c.push_back(new_sym(n));
  return APolyMat(std::move(c));
}

APolyMat SdpBuilder::new_full_poly(int rows, int cols, int degree) {
  std::vector<AffMat> c;
  c.reserve(static_cast<size_t>(degree) + 1);
  for (int k = 0; k <= degree; ++k) c.push_back(new_full(rows, cols));
  return APolyMat(std::move(c));
}

int SdpBuilder::add_psd_block(const AffMat& f, std::string label) {
  if (f.rows() != f.cols()) throw std::invalid_argument("add_psd_block: not square");
  SdpBlock b;
  b.dim = f.rows();
  b.f0 = Matrix::Zero(b.dim, b.dim);
  b.label = std::move(label);
  for (int i = 0; i < b.dim; ++i)
    for (int j = i; j < b.dim; ++j) {
      const AffExpr& e = f(i, j);
      b.f0(i, j) = e.constant();
      b.f0(j, i) = e.constant();
      for (const auto& [var, coef] : e.terms()) b.add_entry(var, i, j, coef);
    }
  blocks_.push_back(std::move(b));
  return static_cast<int>(blocks_.size()) - 1;
}

SdpProblem SdpBuilder::take(Vector objective) {
  SdpProblem p;
  p.nvars = nvars_;
  p.blocks = std::move(blocks_);
  p.objective = std::move(objective);
  blocks_.clear();
  nvars_ = 0;
  return p;
}

// ---------------------------------------------------------------------------
// Interior-point solver: infeasible-start Mehrotra predictor-corrector with
// Nesterov-Todd scaling on the pair
//   min c^T x  s.t.  Z_b = sum_k x_k F_{k,b} - B_b >= 0
//   max sum_b <B_b, D_b>  s.t.  sum_b <F_{k,b}, D_b> = c_k,  D_b >= 0.
// Margin solves append a variable t with F_t = -I on every client block plus
// box and cap bounds, and minimize -t.
// ---------------------------------------------------------------------------

namespace {

struct IBlock {
  int dim = 0;
  bool diagonal = false;
  int source = -1;  // index into the client problem, -1 for box/cap
  Matrix b0;        // dense constant part (Z = sum x F - b0... stored as b0 = -f0)
  Vector b0_diag;
  std::vector<int> vars;
  std::vector<std::vector<SdpEntry>> entries;

  // iterate state
  Matrix Z, Xd;
  Vector z_diag, xd_diag;
  // NT scaling
  Matrix E, Einv, W;
  Vector d;         // scaled spectrum (dense) or elementwise v-hat (diag)
  Vector w_diag;

  // directions
  Matrix dZ, dXd, dZa, dXda;
  Vector dz_diag, dxd_diag, dza_diag, dxda_diag;
};

struct Workspace {
  std::vector<IBlock> blocks;
  int m = 0;  // internal variable count
  Vector c;
  int total_dim = 0;
};

double sym_dot(const std::vector<SdpEntry>& es, const Matrix& t) {
  double s = 0;
  for (const SdpEntry& e : es) s += e.v * (e.r == e.c ? t(e.r, e.r) : 2.0 * t(e.r, e.c));
  return s;
}

void scatter_add(Matrix& m, const std::vector<SdpEntry>& es, double a) {
  for (const SdpEntry& e : es) {
    m(e.r, e.c) += a * e.v;
    if (e.r != e.c) m(e.c, e.r) += a * e.v;
  }
}

// Largest step a with S + a dS psd; returns +inf when dS >= 0.
double max_step(const Matrix& s, const Matrix& ds) {
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success) return 0.0;
  Matrix l = llt.matrixL();
  Matrix a = l.triangularView<Eigen::Lower>().solve(ds);
  a = l.triangularView<Eigen::Lower>().solve(a.transpose().eval());
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  double lmin = es.eigenvalues().minCoeff();
  if (lmin >= 0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

double max_step_diag(const Vector& s, const Vector& ds) {
  double a = std::numeric_limits<double>::infinity();
  for (int i = 0; i < s.size(); ++i)
    if (ds[i] < 0) a = std::min(a, -s[i] / ds[i]);
  return a;
}

class Ipm {
public:
  Ipm(const SdpProblem& p, const SolverOptions& opts, bool margin_mode)
      : prob_(p), opts_(opts), margin_(margin_mode) {
    build();
  }

  SdpSolution run();

private:
  void build();
  void residuals();
  bool scale();
  void rhs_and_solve(bool corrector, double sigma_mu);
  void directions_from_dx(const Vector& dx, bool affine);
  void steps(bool affine, double& ap, double& ad) const;

  SdpSolution classify(const Vector& x_best) const;

  const SdpProblem& prob_;
  SolverOptions opts_;
  bool margin_;

  Workspace w_;
  Vector x_;
  Vector rd_;                    // c - A^*(Xd)
  std::vector<Matrix> rp_;       // P(x) - Z per dense block
  std::vector<Vector> rp_diag_;
  double mu_ = 0, gap_ = 0, rp_norm_ = 0, rd_norm_ = 0;
  double pobj_ = 0, dobj_ = 0;
  Eigen::LDLT<Matrix> schur_;
  Vector dx_;
  int iters_ = 0;
  bool numerical_trouble_ = false;
};

void Ipm::build() {
  const int nu = prob_.nvars;
  w_.m = nu + (margin_ ? 1 : 0);
  const int t_var = nu;  // margin variable index, margin mode only

  for (size_t i = 0; i < prob_.blocks.size(); ++i) {
    const SdpBlock& src = prob_.blocks[i];
    IBlock b;
    b.dim = src.dim;
    b.diagonal = src.diagonal;
    b.source = static_cast<int>(i);
    if (b.diagonal) {
      b.b0_diag = -src.f0.diagonal();
    } else {
      b.b0 = -src.f0;
    }
    b.vars = src.vars;
    b.entries = src.entries;
    if (margin_) {
      b.vars.push_back(t_var);
      std::vector<SdpEntry> id(static_cast<size_t>(b.dim));
      for (int r = 0; r < b.dim; ++r) id[static_cast<size_t>(r)] = {r, r, -1.0};
      b.entries.push_back(std::move(id));
    }
    w_.blocks.push_back(std::move(b));
  }

  // box on the client variables plus the margin cap, one diagonal block
  {
    IBlock box;
    box.diagonal = true;
    box.dim = 2 * nu + (margin_ ? 1 : 0);
    if (box.dim > 0) {
      box.b0_diag = Vector::Constant(box.dim, -opts_.box_radius);
      for (int k = 0; k < nu; ++k) {
        box.vars.push_back(k);
        box.entries.push_back({{k, k, -1.0}, {nu + k, nu + k, +1.0}});
      }
      if (margin_) {
        box.b0_diag[2 * nu] = -opts_.margin_cap;
        box.vars.push_back(t_var);
        box.entries.push_back({{2 * nu, 2 * nu, -1.0}});
      }
      w_.blocks.push_back(std::move(box));
    }
  }

  w_.c = Vector::Zero(w_.m);
  if (margin_) {
    w_.c[t_var] = -1.0;  // maximize t
  } else if (prob_.objective.size() == prob_.nvars) {
    w_.c.head(nu) = prob_.objective;
  }
  for (const IBlock& b : w_.blocks) w_.total_dim += b.dim;

  // initial point
  x_ = Vector::Zero(w_.m);
  double t0 = opts_.margin_cap;
  if (margin_) {
    for (const SdpBlock& b : prob_.blocks) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(
          b.diagonal ? Matrix(b.f0.diagonal().asDiagonal()) : b.f0, Eigen::EigenvaluesOnly);
      t0 = std::min(t0, es.eigenvalues().minCoeff());
    }
    t0 -= 1.0;
    x_[t_var] = t0;
  }

  double scale = 1.0;
  for (IBlock& b : w_.blocks) {
    if (b.diagonal) {
      Vector z = -b.b0_diag;
      for (size_t k = 0; k < b.vars.size(); ++k)
        for (const SdpEntry& e : b.entries[k]) z[e.r] += x_[b.vars[k]] * e.v;
      if (!margin_) z = z.cwiseMax(1.0) + Vector::Constant(b.dim, 1.0);
      b.z_diag = z;
      scale = std::max(scale, z.maxCoeff());
    } else {
      Matrix z = -b.b0;
      for (size_t k = 0; k < b.vars.size(); ++k) scatter_add(z, b.entries[k], x_[b.vars[k]]);
      if (!margin_) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(z, Eigen::EigenvaluesOnly);
        double lm = es.eigenvalues().minCoeff();
        z += (std::max(0.0, -lm) + 1.0 + 0.1 * z.norm()) * Matrix::Identity(b.dim, b.dim);
      }
      b.Z = z;
      scale = std::max(scale, z.norm());
    }
  }
  // centered dual start Xd = mu0 * Z^{-1}
  double mu0 = std::max(10.0, scale);
  for (IBlock& b : w_.blocks) {
    if (b.diagonal) {
      b.xd_diag = mu0 * b.z_diag.cwiseInverse();
    } else {
      b.Xd = mu0 * b.Z.llt().solve(Matrix::Identity(b.dim, b.dim));
      b.Xd = 0.5 * (b.Xd + b.Xd.transpose()).eval();
    }
  }

  rp_.resize(w_.blocks.size());
  rp_diag_.resize(w_.blocks.size());
}

void Ipm::residuals() {
  rd_ = w_.c;
  gap_ = 0;
  rp_norm_ = 0;
  pobj_ = w_.c.dot(x_);
  dobj_ = 0;
  for (size_t bi = 0; bi < w_.blocks.size(); ++bi) {
    IBlock& b = w_.blocks[bi];
    if (b.diagonal) {
      Vector p = -b.b0_diag;
      for (size_t k = 0; k < b.vars.size(); ++k)
        for (const SdpEntry& e : b.entries[k]) p[e.r] += x_[b.vars[k]] * e.v;
      rp_diag_[bi] = p - b.z_diag;
      rp_norm_ = std::max(rp_norm_, rp_diag_[bi].cwiseAbs().maxCoeff() /
                                        (1.0 + b.b0_diag.cwiseAbs().maxCoeff()));
      gap_ += b.xd_diag.dot(b.z_diag);
      dobj_ += b.b0_diag.dot(b.xd_diag);
      for (size_t k = 0; k < b.vars.size(); ++k) {
        double s = 0;
        for (const SdpEntry& e : b.entries[k]) s += e.v * b.xd_diag[e.r];
        rd_[b.vars[k]] -= s;
      }
    } else {
      Matrix p = -b.b0;
      for (size_t k = 0; k < b.vars.size(); ++k) scatter_add(p, b.entries[k], x_[b.vars[k]]);
      rp_[bi] = p - b.Z;
      rp_norm_ = std::max(rp_norm_, rp_[bi].norm() / (1.0 + b.b0.norm()));
      gap_ += (b.Xd.array() * b.Z.array()).sum();
      dobj_ += (b.b0.array() * b.Xd.array()).sum();
      for (size_t k = 0; k < b.vars.size(); ++k) rd_[b.vars[k]] -= sym_dot(b.entries[k], b.Xd);
    }
  }
  mu_ = gap_ / w_.total_dim;
  rd_norm_ = rd_.cwiseAbs().maxCoeff() / (1.0 + w_.c.cwiseAbs().maxCoeff());
}

bool Ipm::scale() {
  for (IBlock& b : w_.blocks) {
    if (b.diagonal) {
      b.w_diag = (b.xd_diag.cwiseQuotient(b.z_diag)).cwiseSqrt();
      b.d = (b.xd_diag.cwiseProduct(b.z_diag)).cwiseSqrt();
      continue;
    }
    Eigen::LLT<Matrix> lltx(b.Xd), lltz(b.Z);
    if (lltx.info() != Eigen::Success || lltz.info() != Eigen::Success) return false;
    Matrix lx = lltx.matrixL(), lz = lltz.matrixL();
    Eigen::JacobiSVD<Matrix> svd(lz.transpose() * lx, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Vector dv = svd.singularValues();
    if (dv.minCoeff() <= 0) return false;
    Matrix lxv = lx * svd.matrixV();
    b.E = lxv * dv.cwiseSqrt().cwiseInverse().asDiagonal();
    // E^{-1} = D^{1/2} V^T Lx^{-1}
    Matrix q = lx.triangularView<Eigen::Lower>().solve(Matrix::Identity(b.dim, b.dim));
    b.Einv = dv.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() * q;
    b.W = b.E * b.E.transpose();
    b.d = dv;
  }
  return true;
}

// Assembles the Schur system and solves for dx; fills dZ/dXd.
// For the corrector, sigma_mu and the stored affine directions are used.
void Ipm::rhs_and_solve(bool corrector, double sigma_mu) {
  const int m = w_.m;
  Vector q = -rd_;

  // Schur matrix is reused between predictor and corrector.
  static thread_local Matrix M;
  if (!corrector) {
    M = Matrix::Zero(m, m);
    for (IBlock& b : w_.blocks) {
      size_t nv = b.vars.size();
      if (b.diagonal) {
        Vector w2 = b.w_diag.cwiseProduct(b.w_diag);
        for (size_t k = 0; k < nv; ++k)
          for (size_t l = k; l < nv; ++l) {
            double s = 0;
            // diagonal entries are sorted sparse; merge on position
            for (const SdpEntry& ek : b.entries[k])
              for (const SdpEntry& el : b.entries[l])
                if (ek.r == el.r) s += ek.v * el.v * w2[ek.r];
            if (s != 0.0) M(b.vars[k], b.vars[l]) += s;
          }
      } else {
        std::vector<Matrix> t(nv);
        for (size_t k = 0; k < nv; ++k) {
          Matrix fk = Matrix::Zero(b.dim, b.dim);
          scatter_add(fk, b.entries[k], 1.0);
          t[k] = b.W * fk * b.W;
        }
        for (size_t k = 0; k < nv; ++k)
          for (size_t l = k; l < nv; ++l)
            M(b.vars[k], b.vars[l]) += sym_dot(b.entries[k], t[l]);
      }
    }
    M = M.selfadjointView<Eigen::Upper>();
    schur_.compute(M);
    if (schur_.info() != Eigen::Success) {
      numerical_trouble_ = true;
      return;
    }
  }

  for (size_t bi = 0; bi < w_.blocks.size(); ++bi) {
    IBlock& b = w_.blocks[bi];
    if (b.diagonal) {
      Vector rc;
      if (!corrector) {
        rc = -b.xd_diag;
      } else {
        Vector dxa = b.dxda_diag.cwiseQuotient(b.w_diag);
        Vector dza = b.dza_diag.cwiseProduct(b.w_diag);
        Vector t = Vector::Constant(b.dim, sigma_mu) - b.d.cwiseProduct(b.d) -
                   dxa.cwiseProduct(dza);
        rc = b.w_diag.cwiseProduct(t.cwiseQuotient(b.d));
      }
      b.dz_diag = rc;  // stash rc in dz for reuse below
      Vector tmp = rc - b.w_diag.cwiseProduct(b.w_diag).cwiseProduct(rp_diag_[bi]);
      for (size_t k = 0; k < b.vars.size(); ++k) {
        double s = 0;
        for (const SdpEntry& e : b.entries[k]) s += e.v * tmp[e.r];
        q[b.vars[k]] += s;
      }
    } else {
      Matrix rc;
      if (!corrector) {
        rc = -b.Xd;
      } else {
        Matrix dxa = b.Einv * b.dXda * b.Einv.transpose();
        Matrix dza = b.E.transpose() * b.dZa * b.E;
        Matrix t = -0.5 * (dxa * dza + dza * dxa);
        t.diagonal().array() += sigma_mu;
        t -= Matrix(b.d.cwiseProduct(b.d).asDiagonal());
        Matrix rhat(b.dim, b.dim);
        for (int i = 0; i < b.dim; ++i)
          for (int j = 0; j < b.dim; ++j) rhat(i, j) = 2.0 * t(i, j) / (b.d[i] + b.d[j]);
        rc = b.E * rhat * b.E.transpose();
        rc = 0.5 * (rc + rc.transpose()).eval();
      }
      b.dZ = rc;  // stash
      Matrix tmp = rc - b.W * rp_[bi] * b.W;
      for (size_t k = 0; k < b.vars.size(); ++k) q[b.vars[k]] += sym_dot(b.entries[k], tmp);
    }
  }

  dx_ = schur_.solve(q);
  if (!dx_.allFinite()) numerical_trouble_ = true;
}

void Ipm::directions_from_dx(const Vector& dx, bool affine) {
  for (size_t bi = 0; bi < w_.blocks.size(); ++bi) {
    IBlock& b = w_.blocks[bi];
    if (b.diagonal) {
      Vector rc = b.dz_diag;  // stashed
      Vector dz = rp_diag_[bi];
      for (size_t k = 0; k < b.vars.size(); ++k)
        for (const SdpEntry& e : b.entries[k]) dz[e.r] += dx[b.vars[k]] * e.v;
      Vector dxd = rc - b.w_diag.cwiseProduct(b.w_diag).cwiseProduct(dz);
      b.dz_diag = dz;
      b.dxd_diag = dxd;
      if (affine) {
        b.dza_diag = dz;
        b.dxda_diag = dxd;
      }
    } else {
      Matrix rc = b.dZ;  // stashed
      Matrix dz = rp_[bi];
      for (size_t k = 0; k < b.vars.size(); ++k) scatter_add(dz, b.entries[k], dx[b.vars[k]]);
      Matrix dxd = rc - b.W * dz * b.W;
      dxd = 0.5 * (dxd + dxd.transpose()).eval();
      b.dZ = dz;
      b.dXd = dxd;
      if (affine) {
        b.dZa = dz;
        b.dXda = dxd;
      }
    }
  }
}

void Ipm::steps(bool affine, double& ap, double& ad) const {
  ap = ad = std::numeric_limits<double>::infinity();
  for (const IBlock& b : w_.blocks) {
    if (b.diagonal) {
      ad = std::min(ad, max_step_diag(b.z_diag, affine ? b.dza_diag : b.dz_diag));
      ap = std::min(ap, max_step_diag(b.xd_diag, affine ? b.dxda_diag : b.dxd_diag));
    } else {
      ad = std::min(ad, max_step(b.Z, affine ? b.dZa : b.dZ));
      ap = std::min(ap, max_step(b.Xd, affine ? b.dXda : b.dXd));
    }
  }
}

SdpSolution Ipm::classify(const Vector& x) const {
  SdpSolution sol;
  sol.iterations = iters_;
  sol.y = x.head(prob_.nvars);
  ResidualReport rep = check_residuals(prob_, sol.y);
  sol.residuals = rep.margins;
  sol.margin = rep.min_margin;
  if (prob_.objective.size() == prob_.nvars)
    sol.objective_value = prob_.objective.dot(sol.y);

  const bool converged = rp_norm_ <= 1e-8 && rd_norm_ <= 1e-8 &&
                         gap_ / (1.0 + std::abs(pobj_) + std::abs(dobj_)) <= 1e2 * opts_.gap_tol;

  if (margin_) {
    if (rep.min_margin > 0) {
      sol.status = SdpStatus::Feasible;
      return sol;
    }
    // Margin <= 0: attach the normalized improving-ray certificate from the
    // dual iterate and report it as infeasible if the run settled.
    double tr = 0;
    for (const IBlock& b : w_.blocks)
      if (b.source >= 0) tr += b.diagonal ? b.xd_diag.sum() : b.Xd.trace();
    if (tr > 0) {
      sol.dual_blocks.resize(prob_.blocks.size());
      double val = 0, res = 0;
      Vector atd = Vector::Zero(prob_.nvars);
      for (const IBlock& b : w_.blocks) {
        if (b.source < 0) continue;
        Matrix dmat = b.diagonal ? Matrix(b.xd_diag.asDiagonal()) : b.Xd;
        dmat /= tr;
        const SdpBlock& src = prob_.blocks[static_cast<size_t>(b.source)];
        if (src.diagonal)
          val += src.f0.diagonal().dot(dmat.diagonal());
        else
          val += (src.f0.array() * dmat.array()).sum();
        for (size_t k = 0; k < src.vars.size(); ++k)
          atd[src.vars[k]] += sym_dot(src.entries[k], dmat);
        sol.dual_blocks[static_cast<size_t>(b.source)] = dmat;
      }
      res = atd.size() ? atd.cwiseAbs().maxCoeff() : 0.0;
      sol.dual_value = val;
      sol.dual_residual = res;
    }
    if (converged || (numerical_trouble_ == false && iters_ < opts_.max_iter)) {
      sol.status = SdpStatus::Infeasible;
    } else if (numerical_trouble_) {
      sol.status = SdpStatus::NumericalFailure;
    } else {
      sol.status = SdpStatus::MaxIterations;
    }
    return sol;
  }

  // objective mode
  if (rep.min_margin >= -opts_.feas_tol && converged) {
    sol.status = SdpStatus::Feasible;
  } else if (numerical_trouble_) {
    sol.status = SdpStatus::NumericalFailure;
  } else if (iters_ >= opts_.max_iter) {
    sol.status = SdpStatus::MaxIterations;
  } else {
    sol.status = rep.min_margin >= -opts_.feas_tol ? SdpStatus::Feasible
                                                   : SdpStatus::Infeasible;
  }
  return sol;
}

SdpSolution Ipm::run() {
  residuals();
  double best_q = std::numeric_limits<double>::infinity();
  Vector x_best = x_;
  int slow = 0;

  for (iters_ = 0; iters_ < opts_.max_iter; ++iters_) {
    double relgap = gap_ / (1.0 + std::abs(pobj_) + std::abs(dobj_));
    double quality = std::max({rp_norm_, rd_norm_, relgap});
    if (quality < best_q) {
      best_q = quality;
      x_best = x_;
    }
    if (opts_.verbose)
      std::printf("it %3d  mu %9.2e  rp %9.2e  rd %9.2e  gap %9.2e  pobj %12.5e\n",
                  iters_, mu_, rp_norm_, rd_norm_, relgap, pobj_);
    if (rp_norm_ <= 1e-10 && rd_norm_ <= 1e-10 && relgap <= opts_.gap_tol) break;

    if (!scale()) {
      numerical_trouble_ = true;
      break;
    }
    rhs_and_solve(false, 0.0);
    if (numerical_trouble_) break;
    directions_from_dx(dx_, true);

    double ap, ad;
    steps(true, ap, ad);
    double apa = std::min(1.0, opts_.step_frac * ap);
    double ada = std::min(1.0, opts_.step_frac * ad);

    // Mehrotra centering parameter from the affine trial point
    double gap_aff = 0;
    for (const IBlock& b : w_.blocks) {
      if (b.diagonal)
        gap_aff += (b.xd_diag + apa * b.dxda_diag).dot(b.z_diag + ada * b.dza_diag);
      else
        gap_aff += ((b.Xd + apa * b.dXda).array() * (b.Z + ada * b.dZa).array()).sum();
    }
    double sigma = std::pow(std::max(0.0, gap_aff / gap_), 3);
    sigma = std::clamp(sigma, 1e-10, 1.0);

    rhs_and_solve(true, sigma * mu_);
    if (numerical_trouble_) break;
    directions_from_dx(dx_, false);
    steps(false, ap, ad);
    double a1 = std::min(1.0, opts_.step_frac * ad);  // (x, Z)
    double a2 = std::min(1.0, opts_.step_frac * ap);  // Xd

    x_ += a1 * dx_;
    for (IBlock& b : w_.blocks) {
      if (b.diagonal) {
        b.z_diag += a1 * b.dz_diag;
        b.xd_diag += a2 * b.dxd_diag;
      } else {
        b.Z += a1 * b.dZ;
        b.Xd += a2 * b.dXd;
      }
    }

    slow = (a1 < 1e-3 && a2 < 1e-3) ? slow + 1 : 0;
    residuals();
    if (slow >= 3 || mu_ < 1e-14) break;
    if (!x_.allFinite()) {
      numerical_trouble_ = true;
      break;
    }
  }

  double relgap = gap_ / (1.0 + std::abs(pobj_) + std::abs(dobj_));
  double quality = std::max({rp_norm_, rd_norm_, relgap});
  return classify(quality <= best_q ? x_ : x_best);
}

void validate(const SdpProblem& p, const SolverOptions& opts) {
  if (p.blocks.empty()) throw std::invalid_argument("solve: empty problem");
  if (p.total_dim() > opts.dim_cap)
    throw std::invalid_argument("solve: total block dimension exceeds cap");
  for (const SdpBlock& b : p.blocks)
    for (int v : b.vars)
      if (v < 0 || v >= p.nvars) throw std::invalid_argument("solve: variable out of range");
}

}  // namespace

SdpSolution solve(const SdpProblem& p, const SolverOptions& opts) {
  validate(p, opts);
  Ipm ipm(p, opts, /*margin=*/true);
  return ipm.run();
}

SdpSolution solve_min_cost(const SdpProblem& p, const SolverOptions& opts) {
  validate(p, opts);
  if (p.nvars == 0) {
    SdpSolution s;
    s.y = Vector();
    ResidualReport rep = check_residuals(p, Vector());
    s.residuals = rep.margins;
    s.margin = rep.min_margin;
    s.status = rep.min_margin >= -opts.feas_tol ? SdpStatus::Feasible : SdpStatus::Infeasible;
    return s;
  }
  Ipm ipm(p, opts, /*margin=*/false);
  return ipm.run();
}

ResidualReport check_residuals(const SdpProblem& p, const Vector& y) {
  ResidualReport r;
  r.margins = Vector(p.blocks.size());
  r.min_margin = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < p.blocks.size(); ++i) {
    double m = p.blocks[i].min_eig(y);
    r.margins[static_cast<Eigen::Index>(i)] = m;
    if (m < r.min_margin) {
      r.min_margin = m;
      r.worst_block = static_cast<int>(i);
    }
  }
  return r;
}

ResidualReport check_residuals(const SdpProblem& p, const SdpSolution& s) {
  if (s.y.size() != p.nvars)
    throw std::invalid_argument("check_residuals: solution length mismatch");
  return check_residuals(p, s.y);
}

}  // namespace clocklmi

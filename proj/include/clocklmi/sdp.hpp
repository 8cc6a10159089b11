#pragma once

#include <string>
#include <vector>

#include "clocklmi/affine.hpp"
#include "clocklmi/polymat.hpp"

namespace clocklmi {

enum class SdpStatus { Feasible, Infeasible, MaxIterations, NumericalFailure };

const char* to_string(SdpStatus s);

/// One matrix entry of a per-variable coefficient, upper triangle only;
/// off-diagonal entries apply symmetrically at (r,c) and (c,r).
struct SdpEntry {
  int r = 0, c = 0;
  double v = 0.0;
};

/// Affine symmetric-matrix-valued constraint  F0 + sum_i y_i F_i >= 0.
struct SdpBlock {
  int dim = 0;
  bool diagonal = false;
  Matrix f0;  // dim x dim symmetric; for diagonal blocks only the diagonal is used
  std::vector<int> vars;                       // variables touching this block, ascending
  std::vector<std::vector<SdpEntry>> entries;  // parallel to `vars`
  std::string label;

  void add_entry(int var, int r, int c, double v);
  Matrix value(const Vector& y) const;
  double min_eig(const Vector& y) const;
};

/// Block-diagonal semidefinite feasibility program over a shared decision
/// vector, with an optional linear objective (zero for pure feasibility).
struct SdpProblem {
  int nvars = 0;
  std::vector<SdpBlock> blocks;
  Vector objective;  // empty or length nvars

  int total_dim() const;
};

struct SolverOptions {
  double feas_tol = 1e-8;   // accepted residual for the Feasible contract
  double gap_tol = 1e-9;    // relative duality gap target
  int max_iter = 200;
  double box_radius = 1e4;  // |y_i| bound that keeps margin problems bounded
  double margin_cap = 10.0; // cap on the feasibility margin t
  double step_frac = 0.98;  // fraction-to-boundary
  int dim_cap = 2000;       // total block dimension guard
  bool verbose = false;
};

struct SdpSolution {
  Vector y;
  SdpStatus status = SdpStatus::NumericalFailure;
  double margin = 0.0;   // min over blocks of lambda_min(F(y)); > 0 iff Feasible
  Vector residuals;      // per-block minimum eigenvalue at y
  int iterations = 0;
  double objective_value = 0.0;

  // Improving-ray certificate attached on Infeasible: normalized dual
  // matrices per block with sum of traces 1, <F_i, D> ~ 0 and <F0, D> < 0.
  std::vector<Matrix> dual_blocks;
  double dual_value = 0.0;
  double dual_residual = 0.0;
};

struct ResidualReport {
  Vector margins;  // per-block minimum eigenvalue
  double min_margin = 0.0;
  int worst_block = -1;
};

/// Feasibility solve: maximizes the common margin t with F_b(y) >= t I on
/// every block, |y_i| <= box_radius and t <= margin_cap. Feasible iff the
/// recomputed margin at the returned y is strictly positive.
SdpSolution solve(const SdpProblem& p, const SolverOptions& opts = {});

/// Minimizes p.objective over the constraint blocks (no margin variable).
SdpSolution solve_min_cost(const SdpProblem& p, const SolverOptions& opts = {});

/// Recomputes per-block minimum eigenvalues independently of the solver.
ResidualReport check_residuals(const SdpProblem& p, const SdpSolution& s);
ResidualReport check_residuals(const SdpProblem& p, const Vector& y);

/// Sparse SDPA ".dat-s" text, 17 significant digits, bit-exact round trip.
std::string export_sdpa(const SdpProblem& p);
SdpProblem import_sdpa(const std::string& text);

/// Incremental construction of an SdpProblem from affine matrix expressions.
class SdpBuilder {
public:
  int new_var() { return nvars_++; }
  int num_vars() const { return nvars_; }

  /// Fresh symmetric matrix variable (entries above the diagonal shared).
  AffMat new_sym(int n);
  AffMat new_full(int rows, int cols);
  APolyMat new_sym_poly(int n, int degree);
  APolyMat new_full_poly(int rows, int cols, int degree);

  /// Adds the block F >= 0 (F must be square; only the upper triangle of
  /// each affine entry is read, so pass a symmetrized expression).
  int add_psd_block(const AffMat& f, std::string label);

  SdpProblem take(Vector objective = Vector());

private:
  int nvars_ = 0;
  std::vector<SdpBlock> blocks_;
};

}  // namespace clocklmi

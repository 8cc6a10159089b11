#pragma once

#include <functional>
#include <string>
#include <vector>

#include "clocklmi/sdp.hpp"

namespace clocklmi {

/// Admissible range for the gap between consecutive jump instants.
struct DwellTimeSpec {
  double t_min = 0, t_max = 0;
  DwellTimeSpec(double tmin, double tmax);
};

/// Matrix-valued map of the clock, with explicit dimensions.
struct ClockMatrixFn {
  int rows = 0, cols = 0;
  std::function<Matrix(double)> f;
  Matrix operator()(double tau) const { return f(tau); }
};

ClockMatrixFn to_fn(const PolyMat& p);

/// Bookkeeping for one compiled interval constraint.
struct IntervalRelaxation {
  int gram0_block = -1;
  int gram1_block = -1;
  int s0_basis_degree = 0;  // Gram basis degree of the base term
  int s1_degree = 0;        // polynomial degree of the interval multiplier
};

/// Encodes F(tau) <= -eps I for all tau in [a, b] (0 <= a < b) through the
/// identity  -F(tau) - eps I = S0(tau) + (tau-a)(b-tau) S1(tau)  with
/// Gram-parameterized S0, S1. Coefficient matching is exact: S0's Gram
/// matrix is a particular solution in the free coefficients plus a basis of
/// the Gram homogeneous space, so no equality constraints reach the solver.
IntervalRelaxation relax_interval_negativity(SdpBuilder& builder, const APolyMat& f,
                                             double a, double b, double eps,
                                             int mult_degree, const std::string& label);

/// Pointwise margins of the stability conditions on a uniform grid.
struct GridCheck {
  double min_cert_eig = 0;   // min over grid of lambda_min(X(tau))
  double max_flow_eig = 0;   // max over grid of lambda_max(flow condition)
  double max_jump_eig = 0;   // max over grid of lambda_max(jump condition)
  bool pass = false;         // margins clear +-eps/2
};

GridCheck grid_verify_lyapunov(const ClockMatrixFn& flow, const ClockMatrixFn& jump,
                               const std::function<Matrix(double)>& cert,
                               const std::function<Matrix(double)>& cert_dot,
                               const DwellTimeSpec& dwell, int grid_points, double eps);

struct AnalysisResult {
  SdpStatus status = SdpStatus::NumericalFailure;
  PolyMat certificate;       // X as a function of the physical clock
  double margin = 0;         // solver minimum-eigenvalue slack
  std::string weakest_condition;
  GridCheck grid;            // filled when status is Feasible

  // s-variable auxiliaries (present only for that analysis)
  Matrix g_flow, g_jump;
  double rho = 0;

  bool feasible() const { return status == SdpStatus::Feasible; }
};

struct AnalysisOptions {
  int x_degree = 4;
  int mult_degree = 2;
  double eps = 0.1;
  int verify_grid = 1000;
  SolverOptions solver;
};

/// Clock-dependent Lyapunov stability test for an impulsive system with
/// flow map `flow` on [0, t_max] and jump map `jump` on [t_min, t_max].
AnalysisResult analyze_clock_lyapunov(const PolyMat& flow, const PolyMat& jump,
                                      const DwellTimeSpec& dwell,
                                      const AnalysisOptions& opts = {});

/// Slack-variable variant for constant system matrices; rho stays fixed
/// because it multiplies the decision variables.
AnalysisResult analyze_svariable(const Matrix& a, const Matrix& a_jump,
                                 const DwellTimeSpec& dwell, double rho,
                                 const AnalysisOptions& opts = {});

/// Runs analyze_svariable over a grid of rho values, keeping the best margin.
AnalysisResult analyze_svariable_sweep(const Matrix& a, const Matrix& a_jump,
                                       const DwellTimeSpec& dwell,
                                       const std::vector<double>& rho_grid,
                                       const AnalysisOptions& opts = {});

/// Logarithmic default grid 1e-3 .. 1e2, 11 points.
std::vector<double> default_rho_grid();

}  // namespace clocklmi

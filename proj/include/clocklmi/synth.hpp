#pragma once

#include <optional>
#include <stdexcept>

#include "clocklmi/system.hpp"

namespace clocklmi {

/// Orthonormal null-space basis via singular value decomposition
/// (threshold 1e-10 relative to the largest singular value); a matrix with
/// zero columns when the kernel is trivial.
Matrix kernel_basis(const Matrix& m);

struct SynthOptions {
  int degree = 4;       // degree of the decision polynomial matrices
  int mult_degree = 2;  // interval multiplier degree
  double eps = 0.1;     // strictness shift of every inequality
  int verify_grid = 1000;
  SolverOptions solver;
};

/// Raised when the certificate completion I - X(tau) Y(tau) is too close to
/// singular for a trustworthy controller reconstruction.
struct NearSingularCompletion : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when the constant-controller recovery hits a singular factor.
struct SingularReconstruction : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Route 1: convexifying parameter transformation (clock-dependent controller)
// ---------------------------------------------------------------------------

struct TransformVars {
  PolyMat x, y;                // symmetric, defined on [0, t_max]
  PolyMat k, l, m, n;          // flow parameters on [0, t_max]
  PolyMat k_j, l_j, m_j, n_j;  // jump parameters on [t_min, t_max]
};

struct TransformDesign {
  SdpStatus status = SdpStatus::NumericalFailure;
  double margin = 0;
  TransformVars vars;
  int nvars = 0;
  bool feasible() const { return status == SdpStatus::Feasible; }
};

TransformDesign synth_transform_ltv(const ImpulsivePlant& plant,
                                    const SynthOptions& opts = {});

/// Recovers the clock-dependent controller from the transformed parameters
/// with the completion U = X, V = X^{-1} - Y. The controller maps are
/// rational in the clock and exposed as evaluation procedures.
ClockController reconstruct_ltv_controller(const TransformVars& vars,
                                           const ImpulsivePlant& plant);

// ---------------------------------------------------------------------------
// Route 2: variable elimination (clock-dependent controller, fewer variables)
// ---------------------------------------------------------------------------

struct KernelBases {
  Matrix v;       // basis of ker(C)
  Matrix u;       // basis of ker(B^T)
  Matrix v_jump;  // basis of ker(C_J)
  Matrix u_jump;  // basis of ker(B_J^T)
};

struct ElimDesign {
  SdpStatus status = SdpStatus::NumericalFailure;
  double margin = 0;
  PolyMat x, y;  // symmetric certificates on [0, t_max]
  int nvars = 0;
  bool feasible() const { return status == SdpStatus::Feasible; }
};

ElimDesign synth_elim_ltv(const ImpulsivePlant& plant, const SynthOptions& opts = {},
                          const std::optional<KernelBases>& kernels = std::nullopt);

/// Completion of the full-order certificate from the reduced pair (X, Y):
///   cert(tau) = [[X, X], [X, X - inv(V)]],  V = X^{-1} - Y.
struct Completion {
  PolyMat x, y, xdot, ydot;
  Matrix eval(double tau) const;
  Matrix eval_dot(double tau) const;
  double completion_cond(double tau) const;  // cond(I - X(tau) Y(tau))
};

Completion make_completion(const PolyMat& x, const PolyMat& y);

struct ReconstructOptions {
  int grid_points = 201;
  double theta_box = 1e6;  // variable bound for the pointwise solves
};

/// Pointwise controller recovery on a uniform clock grid: at each grid value
/// the affine inequality in the controller parameter block is solved for the
/// minimum-Frobenius-norm feasible block, and the samples are joined by
/// cubic-spline interpolation.
ClockController reconstruct_from_xy(const PolyMat& x, const PolyMat& y,
                                    const ImpulsivePlant& plant,
                                    const SynthOptions& opts = {},
                                    const ReconstructOptions& ropts = {});

/// Minimum-norm solution of  Psi + Q^T Theta P + P^T Theta^T Q <= -delta I
/// (Theta sized q_rows x p_rows from the shapes of Q and P). Used by
/// reconstruct_from_xy; exposed for testing.
std::optional<Matrix> min_norm_theta(const Matrix& psi, const Matrix& q, const Matrix& p,
                                     double delta, double theta_box = 1e6);

// ---------------------------------------------------------------------------
// Route 3: slack-variable design (constant controller, sufficient only)
// ---------------------------------------------------------------------------

struct LtiVars {
  PolyMat x_big;  // symmetric 2n certificate on [0, t_max]
  Matrix g, h, s, g_jump, s_jump;
  Matrix k, l, m, n;
  Matrix k_j, l_j, m_j, n_j;
  double rho = 0;
};

struct LtiDesign {
  SdpStatus status = SdpStatus::NumericalFailure;
  double margin = 0;
  LtiVars vars;
  int nvars = 0;
  bool feasible() const { return status == SdpStatus::Feasible; }
};

LtiDesign synth_lti(const ImpulsivePlant& plant, double rho,
                    const SynthOptions& opts = {});

/// Sweeps rho keeping the best-margin feasible design; with `first_feasible`
/// the sweep stops at the first feasible rho (used by bisection probes).
LtiDesign synth_lti_sweep(const ImpulsivePlant& plant, const std::vector<double>& rho_grid,
                          const SynthOptions& opts = {}, bool first_feasible = false);

LtiController reconstruct_lti_controller(const LtiVars& vars, const ImpulsivePlant& plant);

/// Certificate for the constant-controller closed loop as a polynomial,
/// together with the slack matrices entering the verification conditions.
struct LtiCertificate {
  PolyMat cert;  // Yinv^T Xbig(tau) Yinv
  Matrix g_flow, g_jump;
};

LtiCertificate lti_closed_loop_certificate(const LtiVars& vars, const ImpulsivePlant& plant);

// ---------------------------------------------------------------------------
// Independent re-verification
// ---------------------------------------------------------------------------

struct VerificationReport {
  bool pass = false;
  GridCheck grid;

  // Monte-Carlo decay statistics, filled by the simulation layer.
  int sim_runs = 0;
  double min_gamma = 0;
  double max_final_ratio = 0;
  bool sims_pass = true;
};

VerificationReport verify_certificate(const ClosedLoop& cl,
                                      const std::function<Matrix(double)>& cert,
                                      const std::function<Matrix(double)>& cert_dot,
                                      int grid_points, double eps);
VerificationReport verify_certificate(const ClosedLoop& cl, const PolyMat& cert,
                                      int grid_points, double eps);

}  // namespace clocklmi

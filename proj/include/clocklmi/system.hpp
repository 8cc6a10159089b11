#pragma once

#include <functional>

#include "clocklmi/lmi.hpp"

namespace clocklmi {

/// Open-loop impulsive plant: between jumps the state flows with input u and
/// measurement y; at a jump the state resets with its own input/measurement
/// pair. No feedthrough in either channel.
struct ImpulsivePlant {
  Matrix a, b, c;           // flow: dx = A x + B u, y = C x
  Matrix a_jump, b_jump, c_jump;  // jump: x+ = A_J x- + B_J u_J, y_J = C_J x-
  DwellTimeSpec dwell;

  ImpulsivePlant(Matrix a_, Matrix b_, Matrix c_, Matrix aj, Matrix bj, Matrix cj,
                 DwellTimeSpec dw);

  int n() const { return static_cast<int>(a.rows()); }
  int p() const { return static_cast<int>(b.cols()); }
  int q() const { return static_cast<int>(c.rows()); }
  int p_jump() const { return static_cast<int>(b_jump.cols()); }
  int q_jump() const { return static_cast<int>(c_jump.rows()); }
};

/// Dynamic output-feedback controller of plant order with clock-dependent
/// system matrices; flow maps live on [0, t_max], jump maps on
/// [t_min, t_max]. The blocks stack as [[Ac, Bc], [Cc, Dc]].
struct ClockController {
  enum class Form { RationalClosedForm, GridInterpolated };

  Form form = Form::RationalClosedForm;
  int order = 0;  // controller state dimension (= plant order)
  int p = 0, q = 0, p_jump = 0, q_jump = 0;
  std::function<Matrix(double)> flow_block;  // (order+p) x (order+q)
  std::function<Matrix(double)> jump_block;  // (order+p_jump) x (order+q_jump)
};

/// Constant-coefficient impulsive controller of plant order.
struct LtiController {
  Matrix ac, bc, cc, dc;
  Matrix ac_jump, bc_jump, cc_jump, dc_jump;
};

struct ClosedLoop {
  int dim = 0;
  ClockMatrixFn flow;   // defined on [0, t_max]
  ClockMatrixFn jump;   // defined on [t_min, t_max]
  DwellTimeSpec dwell;
};

ClosedLoop close_loop(const ImpulsivePlant& plant, const ClockController& ctrl);
ClosedLoop close_loop(const ImpulsivePlant& plant, const LtiController& ctrl);

/// Closed-loop matrices from a controller parameter block
/// Theta = [[Ac, Bc], [Cc, Dc]]:  Abar + Bbar Theta Cbar.
Matrix assemble_closed_flow(const ImpulsivePlant& plant, const Matrix& theta);
Matrix assemble_closed_jump(const ImpulsivePlant& plant, const Matrix& theta_jump);

}  // namespace clocklmi

#include "clocklmi/system.hpp"

#include <stdexcept>

namespace clocklmi {

ImpulsivePlant::ImpulsivePlant(Matrix a_, Matrix b_, Matrix c_, Matrix aj, Matrix bj,
                               Matrix cj, DwellTimeSpec dw)
    : a(std::move(a_)),
      b(std::move(b_)),
      c(std::move(c_)),
      a_jump(std::move(aj)),
      b_jump(std::move(bj)),
      c_jump(std::move(cj)),
      dwell(dw) {
  const int nn = n();
  if (a.rows() != a.cols()) throw std::invalid_argument("plant: A not square");
  if (b.rows() != nn) throw std::invalid_argument("plant: B row count");
  if (c.cols() != nn) throw std::invalid_argument("plant: C column count");
  if (a_jump.rows() != nn || a_jump.cols() != nn)
    throw std::invalid_argument("plant: A_J shape");
  if (b_jump.rows() != nn) throw std::invalid_argument("plant: B_J row count");
  if (c_jump.cols() != nn) throw std::invalid_argument("plant: C_J column count");
}

Matrix assemble_closed_flow(const ImpulsivePlant& pl, const Matrix& theta) {
  const int n = pl.n(), p = pl.p(), q = pl.q();
  if (theta.rows() != n + p || theta.cols() != n + q)
    throw std::invalid_argument("closed flow: controller block shape");
  Matrix abar = Matrix::Zero(2 * n, 2 * n);
  abar.topLeftCorner(n, n) = pl.a;
  Matrix bbar = Matrix::Zero(2 * n, n + p);
  bbar.topRightCorner(n, p) = pl.b;
  bbar.bottomLeftCorner(n, n) = Matrix::Identity(n, n);
  Matrix cbar = Matrix::Zero(n + q, 2 * n);
  cbar.topRightCorner(n, n) = Matrix::Identity(n, n);
  cbar.bottomLeftCorner(q, n) = pl.c;
  return abar + bbar * theta * cbar;
}

Matrix assemble_closed_jump(const ImpulsivePlant& pl, const Matrix& theta) {
  const int n = pl.n(), p = pl.p_jump(), q = pl.q_jump();
  if (theta.rows() != n + p || theta.cols() != n + q)
    throw std::invalid_argument("closed jump: controller block shape");
  Matrix abar = Matrix::Zero(2 * n, 2 * n);
  abar.topLeftCorner(n, n) = pl.a_jump;
  Matrix bbar = Matrix::Zero(2 * n, n + p);
  bbar.topRightCorner(n, p) = pl.b_jump;
  bbar.bottomLeftCorner(n, n) = Matrix::Identity(n, n);
  Matrix cbar = Matrix::Zero(n + q, 2 * n);
  cbar.topRightCorner(n, n) = Matrix::Identity(n, n);
  cbar.bottomLeftCorner(q, n) = pl.c_jump;
  return abar + bbar * theta * cbar;
}

ClosedLoop close_loop(const ImpulsivePlant& plant, const ClockController& ctrl) {
  if (ctrl.order != plant.n() || ctrl.p != plant.p() || ctrl.q != plant.q() ||
      ctrl.p_jump != plant.p_jump() || ctrl.q_jump != plant.q_jump())
    throw std::invalid_argument("close_loop: controller/plant dimension mismatch");
  ClosedLoop cl{2 * plant.n(), {}, {}, plant.dwell};
  ImpulsivePlant pl = plant;
  auto flow = ctrl.flow_block;
  auto jump = ctrl.jump_block;
  cl.flow = {cl.dim, cl.dim, [pl, flow](double tau) {
               return assemble_closed_flow(pl, flow(tau));
             }};
  cl.jump = {cl.dim, cl.dim, [pl, jump](double tau) {
               return assemble_closed_jump(pl, jump(tau));
             }};
  return cl;
}

ClosedLoop close_loop(const ImpulsivePlant& plant, const LtiController& ctrl) {
  const int n = plant.n();
  Matrix theta(n + plant.p(), n + plant.q());
  theta << ctrl.ac, ctrl.bc, ctrl.cc, ctrl.dc;
  Matrix theta_j(n + plant.p_jump(), n + plant.q_jump());
  theta_j << ctrl.ac_jump, ctrl.bc_jump, ctrl.cc_jump, ctrl.dc_jump;
  Matrix fl = assemble_closed_flow(plant, theta);
  Matrix jm = assemble_closed_jump(plant, theta_j);
  ClosedLoop cl{2 * n, {}, {}, plant.dwell};
  cl.flow = {cl.dim, cl.dim, [fl](double) { return fl; }};
  cl.jump = {cl.dim, cl.dim, [jm](double) { return jm; }};
  return cl;
}

}  // namespace clocklmi

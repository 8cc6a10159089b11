#include "clocklmi/sim.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

namespace clocklmi {

std::vector<double> DwellSequence::jump_times() const {
  std::vector<double> t;
  t.reserve(gaps.size());
  double acc = 0;
  for (double g : gaps) t.push_back(acc += g);
  return t;
}

double DwellSequence::total() const {
  double acc = 0;
  for (double g : gaps) acc += g;
  return acc;
}

DwellSequence sample_dwell(const DwellTimeSpec& dwell, double horizon, uint64_t seed) {
  if (!(horizon > 0)) throw std::invalid_argument("sample_dwell: horizon must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(dwell.t_min, dwell.t_max);
  DwellSequence seq;
  double acc = 0;
  while (acc < horizon) {
    double g = u(rng);
    seq.gaps.push_back(g);
    acc += g;
  }
  return seq;
}

Trajectory simulate(const ClockMatrixFn& flow, const ClockMatrixFn& jump, const Vector& x0,
                    const DwellSequence& seq, double step) {
  if (!(step > 0)) throw std::invalid_argument("simulate: step must be positive");
  Trajectory tr;
  Vector x = x0;
  double t = 0;
  tr.times.push_back(0.0);
  tr.states.push_back(x);
  tr.flags.push_back(0);

  auto rk4 = [&](const Vector& xin, double theta, double h) {
    Vector k1 = flow(theta) * xin;
    Vector k2 = flow(theta + 0.5 * h) * (xin + 0.5 * h * k1);
    Vector k3 = flow(theta + 0.5 * h) * (xin + 0.5 * h * k2);
    Vector k4 = flow(theta + h) * (xin + h * k3);
    return Vector(xin + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4));
  };

  for (double gap : seq.gaps) {
    double theta = 0;
    while (theta < gap) {
      double h = std::min(step, gap - theta);
      x = rk4(x, theta, h);
      theta += h;
      t += h;
      if (!x.allFinite()) {
        tr.diverged = true;
        return tr;
      }
      tr.times.push_back(t);
      tr.states.push_back(x);
      tr.flags.push_back(theta >= gap ? -1 : 0);
    }
    // jump with the completed gap as the clock left-limit
    x = jump(gap) * x;
    tr.times.push_back(t);
    tr.states.push_back(x);
    tr.flags.push_back(+1);
    if (!x.allFinite()) {
      tr.diverged = true;
      return tr;
    }
  }
  return tr;
}

DecayEstimate estimate_decay(const Trajectory& traj) {
  const size_t n = traj.states.size();
  if (n < 20) throw std::invalid_argument("estimate_decay: need at least 20 samples");
  if (traj.diverged) throw std::invalid_argument("estimate_decay: trajectory diverged");
  if (traj.states[0].norm() == 0)
    throw std::invalid_argument("estimate_decay: zero initial state");

  DecayEstimate d;
  const size_t start = n / 5;  // final 80%
  for (size_t i = start; i < n; ++i) {
    if (traj.norm(i) < 1e-300) {
      d.converged_to_zero = true;
      d.gamma_hat = std::numeric_limits<double>::infinity();
      d.r2 = 1.0;
      return d;
    }
  }
  double st = 0, sy = 0, stt = 0, sty = 0, syy = 0;
  const double m = static_cast<double>(n - start);
  for (size_t i = start; i < n; ++i) {
    double ti = traj.times[i], yi = std::log(traj.norm(i));
    st += ti;
    sy += yi;
    stt += ti * ti;
    sty += ti * yi;
    syy += yi * yi;
  }
  double denom = m * stt - st * st;
  double slope = denom != 0 ? (m * sty - st * sy) / denom : 0.0;
  double inter = (sy - slope * st) / m;
  d.gamma_hat = -slope;
  d.m_hat = std::exp(inter);
  double sse = 0, ssy = syy - sy * sy / m;
  for (size_t i = start; i < n; ++i) {
    double e = std::log(traj.norm(i)) - (inter + slope * traj.times[i]);
    sse += e * e;
  }
  d.r2 = ssy > 0 ? 1.0 - sse / ssy : 1.0;
  return d;
}

bool scalar_oracle(double a, double c, const DwellTimeSpec& dwell) {
  double t_worst = a >= 0 ? dwell.t_max : dwell.t_min;
  return std::abs(c) * std::exp(a * t_worst) < 1.0;
}

void write_csv(const Trajectory& traj, std::ostream& os) {
  os << "time,pre_post_flag";
  const int dim = traj.states.empty() ? 0 : static_cast<int>(traj.states[0].size());
  for (int i = 0; i < dim; ++i) os << ",x" << i;
  os << ",norm\n";
  for (size_t i = 0; i < traj.times.size(); ++i) {
    os << traj.times[i] << "," << traj.flags[i];
    for (int k = 0; k < dim; ++k) os << "," << traj.states[i][k];
    os << "," << traj.norm(i) << "\n";
  }
}

McDecayStats mc_decay(const ClosedLoop& cl, int runs, double horizon_mult, uint64_t seed0,
                      double step) {
  McDecayStats st;
  st.runs = runs;
  st.min_gamma = std::numeric_limits<double>::infinity();
  st.max_final_ratio = 0;
  st.all_decayed = true;
  if (step <= 0) step = cl.dwell.t_min / 50.0;
  const double horizon = horizon_mult * cl.dwell.t_max;
  std::mt19937_64 mix(seed0);
  for (int r = 0; r < runs; ++r) {
    DwellSequence seq = sample_dwell(cl.dwell, horizon, mix());
    Vector x0 = Vector::Zero(cl.dim);
    // deterministic spread of initial directions
    x0[r % cl.dim] = 1.0;
    if (cl.dim > 1) x0[(r + 1) % cl.dim] = 0.5;
    Trajectory tr = simulate(cl.flow, cl.jump, x0, seq, step);
    if (tr.diverged) {
      st.all_decayed = false;
      st.min_gamma = -std::numeric_limits<double>::infinity();
      st.max_final_ratio = std::numeric_limits<double>::infinity();
      continue;
    }
    DecayEstimate d = estimate_decay(tr);
    st.min_gamma = std::min(st.min_gamma, d.gamma_hat);
    if (!(d.gamma_hat > 0)) st.all_decayed = false;
    double ratio = tr.norm(tr.states.size() - 1) / tr.norm(0);
    st.max_final_ratio = std::max(st.max_final_ratio, ratio);
  }
  return st;
}

}  // namespace clocklmi

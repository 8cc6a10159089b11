#pragma once

#include <cstdint>
#include <iosfwd>

#include "clocklmi/system.hpp"

namespace clocklmi {

/// Realized gaps between consecutive jump instants, each within the dwell
/// range; jump instants are the prefix sums.
struct DwellSequence {
  std::vector<double> gaps;
  std::vector<double> jump_times() const;
  double total() const;
};

/// I.i.d. uniform gaps until the cumulative time reaches the horizon;
/// deterministic under a fixed seed.
DwellSequence sample_dwell(const DwellTimeSpec& dwell, double horizon, uint64_t seed);

/// Sampled state history. At each jump instant both the pre-jump and the
/// post-jump state are recorded (flag -1 / +1, 0 for interior samples).
struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<int> flags;
  bool diverged = false;

  double norm(size_t i) const { return states[i].norm(); }
};

/// Classical fourth-order Runge-Kutta at fixed step within each inter-jump
/// interval (the final partial step lands exactly on the jump instant),
/// then the jump map applied with the completed gap as its clock argument.
Trajectory simulate(const ClockMatrixFn& flow, const ClockMatrixFn& jump, const Vector& x0,
                    const DwellSequence& seq, double step);

struct DecayEstimate {
  double gamma_hat = 0;  // fitted exponential rate, 1/seconds
  double m_hat = 0;      // fitted amplitude
  double r2 = 0;
  bool converged_to_zero = false;  // norms underflowed; gamma_hat is +inf
};

/// Least squares of log |x(t)| against t over the final 80% of samples.
DecayEstimate estimate_decay(const Trajectory& traj);

/// Worst-case contraction of the scalar jump-to-jump map: true iff
/// sup over T in the dwell range of |c| e^{aT} stays below one.
bool scalar_oracle(double a, double c, const DwellTimeSpec& dwell);

/// Columns: time, pre_post_flag, state components, norm.
void write_csv(const Trajectory& traj, std::ostream& os);

struct McDecayStats {
  int runs = 0;
  double min_gamma = 0;
  double max_final_ratio = 0;  // max over runs of |x(end)| / |x(0)|
  bool all_decayed = false;    // every run: gamma_hat > 0
};

/// Seeded Monte-Carlo decay study of a closed loop over `runs` dwell
/// sequences with horizon `horizon_mult * t_max`.
McDecayStats mc_decay(const ClosedLoop& cl, int runs, double horizon_mult, uint64_t seed0,
                      double step = 0);

}  // namespace clocklmi

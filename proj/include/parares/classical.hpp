// Classical counterpart: the chirp-driven Duffing oscillator and its
// resonant slow flow.
//
// Full equation of motion (u = dx/dt):
//   d2x/dt2 + (1 + eps cos(phi(t))) x + beta x^3 = 0,
// integrated with a fixed-step 8th-order Runge-Kutta so ensembles are
// bit-reproducible while holding ~1e-12 accuracy per period.
//
// Averaging x = a cos(theta) over the fast phase and rescaling A = sqrt(p2) a
// gives the autoresonance slow flow on tau = sqrt(alpha) t:
//   dA/dtau   = 2 p1 A sin(psi),
//   dpsi/dtau = A^2 - tau + 4 p1 cos(psi),
// whose phase-locked solutions track A^2 ~ tau (the frequency-matching
// condition (3/8) beta a^2 = alpha t / 2). Thermal initial amplitudes are
// Rayleigh with sigma^2 = p2 T, the image of x0, u0 ~ N(0, T).
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "parares/params.hpp"

namespace parares {

inline constexpr double kClassicalStep = 2.0 * 3.14159265358979323846 / 200.0;

struct ClassicalState {
  double x = 0.0;
  double u = 0.0;
  double t = 0.0;
};

// Energy of the unmodulated oscillator, u^2/2 + x^2/2 + beta x^4/4.
double unmodulated_energy(const ClassicalState& s, const OscillatorParams& p);

// n_traj draws from the thermal phase-space density
// f(x0, u0) = (2 pi T)^-1 exp[-(x0^2 + u0^2) / (2T)], placed at time t0.
// Trajectory i always receives substream (seed, i) regardless of threading.
std::vector<ClassicalState> sample_thermal(double temperature, int n_traj, std::uint64_t seed,
                                           double t0);

struct DuffingTrajectory {
  std::vector<double> times, xs, us;
  ClassicalState final_state() const;
};

// Fixed-step integration from s0.t to t_final, keeping samples every
// sample_interval time units (0 keeps endpoints only).
DuffingTrajectory integrate_duffing(const ClassicalState& s0, const OscillatorParams& p,
                                    double t_final, double step = kClassicalStep,
                                    double sample_interval = 0.0);

// Parallel map over initial conditions; results are ordered like the input
// and identical for any worker count.
std::vector<DuffingTrajectory> evolve_ensemble(std::span<const ClassicalState> initial,
                                               const OscillatorParams& p, double t_final,
                                               double step = kClassicalStep,
                                               double sample_interval = 0.0, int n_threads = 0);

struct EnsembleSummary {
  std::vector<double> times;
  std::vector<double> mean_energy;
  std::vector<double> std_error;
};

// Pointwise ensemble mean of the unmodulated energy with its standard error;
// all trajectories must share one sample grid.
EnsembleSummary ensemble_mean_energy(const std::vector<DuffingTrajectory>& ensemble,
                                     const OscillatorParams& p);

// ---- averaged slow flow ---------------------------------------------------

struct AveragedState {
  double amp = 0.0;    // A = sqrt(p2) * a >= 0
  double phase = 0.0;  // psi = 2 theta - phi, the slow phase mismatch
  double tau = 0.0;
};

struct AveragedOptions {
  double step = 1e-3;
  double sample_interval = 0.0;  // slow-time units; 0 keeps endpoints only
  // Coefficient of -tau in dpsi/dtau. 1 is the value consistent with the
  // frequency-matching lock A^2 ~ tau and with full-Duffing capture
  // statistics; 2 reproduces the commonly quoted (but inconsistent) form.
  double detuning_slope = 1.0;
};

struct AveragedTrajectory {
  std::vector<double> times, amps, phases;
  AveragedState final_state() const;
};

// Rayleigh amplitudes with sigma^2 = p2 * T and uniform slow phase, the
// thermal ensemble mapped into averaged variables at tau0.
std::vector<AveragedState> sample_averaged_thermal(double temperature,
                                                   const DimensionlessParams& dp, int n_traj,
                                                   std::uint64_t seed);

AveragedTrajectory integrate_averaged(const AveragedState& s0, const DimensionlessParams& dp,
                                      double tau_final, const AveragedOptions& opt = {});

std::vector<AveragedTrajectory> evolve_averaged_ensemble(std::span<const AveragedState> initial,
                                                         const DimensionlessParams& dp,
                                                         double tau_final,
                                                         const AveragedOptions& opt = {},
                                                         int n_threads = 0);

}  // namespace parares

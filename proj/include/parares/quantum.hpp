// Level-amplitude dynamics of the driven anharmonic oscillator.
//
// Lab frame, amplitudes c_n over the harmonic basis:
//   i dc_n/dt = E_n c_n
//             + (eps/4) cos(phi) [ sqrt(Q_{n-1}) c_{n-2} + (2n+1) c_n + sqrt(Q_{n+1}) c_{n+2} ],
// with Q_m = m(m+1) and phi the accumulated modulation phase.
//
// Rotating frame, slow amplitudes B_n on tau = sqrt(alpha) t (same
// populations, diagonal phases removed):
//   i dB_n/dtau = Gamma_n B_n + p1 [ sqrt(Q_{n+1}) B_{n+2} + sqrt(Q_{n-1}) B_{n-2} ],
//   Gamma_n = (n/2) (p2 (n+1) - tau).
//
// The rotating form is the workhorse: slow chirps (alpha ~ 1e-6) span lab
// times ~1e8 that are not worth integrating directly.
#pragma once

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "parares/params.hpp"

namespace parares {

enum class Frame { lab, rotating };

struct QuantumState {
  std::vector<std::complex<double>> amplitudes;
  Frame frame = Frame::rotating;
  double time = 0.0;   // t in the lab frame, tau in the rotating frame
  double time0 = 0.0;  // run start; phase reference when mapping frames

  int n_levels() const { return static_cast<int>(amplitudes.size()); }
  double norm_sq() const;
};

QuantumState ground_state(int n_levels, Frame frame, double time0);
QuantumState fock_state(int n, int n_levels, Frame frame, double time0);

enum class StepMethod { rk4_fixed, dp54_adaptive };

struct IntegratorConfig {
  StepMethod method = StepMethod::dp54_adaptive;
  double rel_tol = 1e-9;
  double abs_tol = 1e-9;
  double step = 1e-3;              // fixed-step size; initial step when adaptive
  double sample_stride = 0.05;     // spacing of retained samples (slow-time units)
  double truncation_guard = 1e-6;  // population limit on the top two levels
};

enum class RunStatus { ok, truncation_guard_triggered };

struct QuantumTrajectory {
  Frame frame = Frame::rotating;
  DimensionlessParams dp;
  std::optional<OscillatorParams> lab_params;  // present for lab-frame runs
  std::vector<double> times;
  std::vector<std::vector<std::complex<double>>> states;
  RunStatus status = RunStatus::ok;
  std::string message;
  double max_norm_drift_rate = 0.0;  // max |d norm^2 / dt| seen between samples

  QuantumState state_at(std::size_t i) const;
  QuantumState final_state() const;
};

// Integrate from initial.time to the requested end time (either direction).
// If the truncation guard trips, the trajectory ends at the offending sample
// with status = truncation_guard_triggered.
QuantumTrajectory evolve_lab(const QuantumState& initial, const OscillatorParams& p,
                             double t_final, const IntegratorConfig& config);
QuantumTrajectory evolve_rotating(const QuantumState& initial, const DimensionlessParams& dp,
                                  double tau_final, const IntegratorConfig& config);

std::vector<double> level_populations(const QuantumState& state);
double mean_level(const QuantumState& state);
double mean_energy(const QuantumState& state, const OscillatorParams& p);

// Map a rotating-frame state to lab amplitudes at the same physical instant
// by reattaching the diagonal phases the frame change removed:
//   c_n = B_n exp(-i [ (n/2) phi(t) + (1/2 + 3 beta/16) t ]),  t = tau / sqrt(alpha),
// with phi the accumulated modulation phase. Populations are untouched; a
// lab-frame input comes back unchanged.
QuantumState to_lab_frame(const QuantumState& state, const OscillatorParams& p);

// First time |B_{n+2}|^2 exceeds |B_n|^2 for each even n, skipping pairs that
// never hold real population (combined population below noise_floor).
// Requires a rotating-frame trajectory sampled at least every 0.1 * p2.
std::vector<std::pair<int, double>> detect_transition_times(const QuantumTrajectory& traj,
                                                            double noise_floor = 1e-3);

}  // namespace parares

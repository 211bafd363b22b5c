// Capture statistics: probabilities, S-curves over drive strength, threshold
// fits (50% crossing and inverse slope), and the logarithmic threshold-vs-
// temperature regression.
//
// Capture is decided against a strongly-driven reference: a run at drive well
// above threshold locks into resonance and marks where locked trajectories
// sit at the evaluation time. Quantum runs count population at or above
// n_cut = ceil(n_lock / 2); classical trajectories count as captured when
// their final energy reaches half the reference lock energy. Half the locked
// level cleanly splits the bimodal final distribution (uncaptured population
// stays near the bottom of the well).
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "parares/classical.hpp"
#include "parares/params.hpp"
#include "parares/quantum.hpp"
#include "parares/theory.hpp"

namespace parares {

struct SCurvePoint {
  double drive = 0.0;        // modulation depth eps (or p1, see drive_label)
  double probability = 0.0;  // capture estimate in [0, 1]
  double stderr_ = 0.0;      // binomial for ensembles, 0 for deterministic mixtures
};

struct SCurve {
  std::vector<SCurvePoint> points;  // strictly increasing in drive
  std::string drive_label = "eps";
  std::uint64_t seed = 0;
  int n_traj = 0;        // per-point ensemble size (0 for quantum mixtures)
  bool quantum = false;
};

enum class FitMethod { logistic_fit, bisection };

struct ThresholdResult {
  double threshold = 0.0;         // drive at 50% capture
  double width = 0.0;             // 4*Delta, the inverse slope at the midpoint
  double fit_residual = 0.0;      // RMS misfit of the logistic model
  double threshold_stderr = 0.0;  // from the fit covariance (0 for bisection)
  FitMethod method = FitMethod::logistic_fit;
};

// ---- quantum capture -------------------------------------------------------

// Rotating-frame run from level k0 that enlarges the basis by x1.5 whenever
// the truncation guard trips, up to max_levels. Locked wavepackets driven
// well above threshold spread past any fixed basis eventually; growing the
// basis keeps the guard honest instead of loosening it.
QuantumTrajectory evolve_rotating_autosized(int k0, const DimensionlessParams& dp,
                                            double tau_final, const IntegratorConfig& config,
                                            int n_levels, int max_levels = 1024);

struct QuantumCutoff {
  int n_lock = 0;        // locked level of the reference run at tau_final
  int n_cut = 0;         // ceil(n_lock / 2)
  double reference_p1 = 0.0;
  int n_levels_used = 0;
};

// Ground-start reference run at reference_p1 (choose ~2x the strongest
// scanned drive, at least 1). Throws CalibrationFailureError when the
// reference does not lock (n_lock < 2) or outgrows max_levels.
QuantumCutoff calibrate_quantum_cutoff(const DimensionlessParams& dp, double tau_final,
                                       double reference_p1, int n_levels,
                                       const IntegratorConfig& config, int max_levels = 1024);

// Population at or above n_cut. The state must be a rotating-frame state at
// tau_final; tau_final at or before the first ladder crossing 3 p2 throws
// UndefinedCaptureError.
double quantum_capture_probability(const QuantumState& final_state,
                                   const DimensionlessParams& dp, double tau_final, int n_cut);

// Boltzmann weights over the oscillator levels, w_k ~ exp(-(E_k - E_0)/T),
// truncated once the kept weight reaches 1 - tail and renormalized.
// temperature = 0 collapses to the ground state.
std::vector<double> thermal_level_weights(double temperature, const OscillatorParams& p,
                                          double tail = 1e-3, int max_levels = 64);

struct QuantumScanSpec {
  OscillatorParams base;           // alpha, beta fix p2 and the eps -> p1 map
  std::vector<double> eps_grid;    // strictly increasing modulation depths
  double temperature = 0.0;        // initial Boltzmann mixture
  double tau0 = -10.0;
  double tau_final = 30.0;
  int n_levels = 250;
  int max_levels = 1024;
  double reference_p1 = 0.0;       // 0 = auto: max(2 * max scanned p1, 1)
  double weight_tail = 1e-3;
  IntegratorConfig integrator{};   // sample_stride also sets guard granularity
};

// Capture probability per grid point: thermal mixture of deterministic
// rotating-frame runs, all sharing one calibrated cutoff.
SCurve scan_quantum_scurve(const QuantumScanSpec& spec, int n_threads = 0);

// ---- classical capture -----------------------------------------------------

// Median final energy of a thermal reference ensemble run at the given
// (already scaled-up) drive. Throws CalibrationFailureError when the median
// does not clear the thermal background (4 * max(T, 0.5)).
double classical_lock_energy(const OscillatorParams& reference, double temperature, int n_traj,
                             std::uint64_t seed, double t_final, double step = kClassicalStep,
                             int n_threads = 0);

struct CaptureEstimate {
  double probability = 0.0;
  double stderr_ = 0.0;
};

// Fraction of final energies at or above e_lock / 2, with binomial stderr.
CaptureEstimate classical_capture_fraction(std::span<const double> final_energies, double e_lock);

struct ClassicalCaptureSpec {
  OscillatorParams params;     // epsilon = the scanned drive
  double temperature = 0.5;
  int n_traj = 300;            // >= 30
  std::uint64_t seed = 1;
  double tau_final = 30.0;     // slow time; lab t_final = tau_final / sqrt(alpha)
  double step = kClassicalStep;
  double reference_scale = 2.0;
  int n_threads = 0;
};

// One-shot estimate: thermal ensemble at params.epsilon judged against a
// reference ensemble (same seeds) at reference_scale * epsilon.
CaptureEstimate classical_capture_probability(const ClassicalCaptureSpec& spec);

struct ClassicalScanSpec {
  OscillatorParams base;         // epsilon ignored; grid supplies it
  std::vector<double> eps_grid;  // strictly increasing
  double temperature = 0.5;
  int n_traj = 300;
  std::uint64_t seed = 1;
  double tau_final = 30.0;
  double step = kClassicalStep;
  double reference_scale = 2.0;  // reference drive = scale * max grid drive
};

// Common random numbers across the grid: every drive value reuses the same
// thermal draws, and one reference calibration serves the whole curve.
SCurve scan_classical_scurve(const ClassicalScanSpec& spec, int n_threads = 0);

// ---- fitting ----------------------------------------------------------------

// Least-squares logistic fit P(d) = 1 / (1 + exp(-(d - threshold)/Delta)),
// width = 4 Delta. Falls back to interpolated bisection between the
// bracketing grid points when the logistic misfit exceeds 0.1 RMS (width then
// reports the local grid resolution). Throws NeedsWiderScanError (with
// suggested bounds) when the curve does not span P < 0.25 and P > 0.75 or
// the fitted threshold escapes the scanned range.
ThresholdResult fit_threshold(const SCurve& curve);

// Scanner callback for rescan loops: builds an S-curve on [lo, hi] with
// n_points entries.
using GridScanner = std::function<SCurve(double lo, double hi, int n_points)>;

// fit_threshold with automatic widening: on NeedsWiderScanError the grid is
// rebuilt on the suggested bounds, up to max_rounds times.
std::pair<SCurve, ThresholdResult> scan_until_bracketed(const GridScanner& scan, double lo,
                                                        double hi, int n_points,
                                                        int max_rounds = 3);

// Ordinary least squares for threshold(T) = a - b ln T; with saturated set,
// the regressor is ln t_eff(T) instead (form chooses the t_eff map).
// Requires >= 4 strictly positive temperatures spanning a decade.
ScalingCoefficients fit_log_scaling(std::span<const double> temperatures,
                                    std::span<const double> thresholds, bool saturated = false,
                                    TeffForm form = TeffForm::half_coth_half_inv_t);

}  // namespace parares

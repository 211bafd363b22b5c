#include "parares/capture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "parares/errors.hpp"
#include "parares/numerics.hpp"
#include "parares/parallel.hpp"

namespace parares {

namespace {

double median(std::vector<double> v) {
  const std::size_t n = v.size();
  std::sort(v.begin(), v.end());
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void check_grid(const std::vector<double>& grid) {
  if (grid.size() < 5) throw InvalidParameterError("scan: need at least 5 grid points");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw InvalidParameterError("scan: drive grid must be strictly increasing");
}

// Theoretical autoresonance threshold in eps for the given system, used as a
// floor so reference runs stay locked even when the probed drive is tiny.
double theory_eps_floor(const OscillatorParams& p, double temperature) {
  const auto kappa = ScalingCoefficients::kappa_from_classical_fit(
      kClassicalEpsFit.intercept, kClassicalEpsFit.slope, 1e-4, 0.075);
  const double p2 = to_dimensionless(p).p2;
  const double p1_cr = par_threshold_p1(p2, std::max(temperature, 0.05), kappa);
  return 8.0 * std::sqrt(p.alpha) * p1_cr;
}

std::vector<double> final_energies(const std::vector<DuffingTrajectory>& ensemble,
                                   const OscillatorParams& p) {
  std::vector<double> e(ensemble.size());
  for (std::size_t i = 0; i < ensemble.size(); ++i)
    e[i] = unmodulated_energy(ensemble[i].final_state(), p);
  return e;
}

}  // namespace

// ---- quantum ----------------------------------------------------------------

QuantumTrajectory evolve_rotating_autosized(int k0, const DimensionlessParams& dp,
                                            double tau_final, const IntegratorConfig& config,
                                            int n_levels, int max_levels) {
  if (k0 < 0 || n_levels <= k0 + 2)
    throw InvalidParameterError("evolve_rotating_autosized: starting level outside basis");
  int n = n_levels;
  for (;;) {
    const QuantumState init = fock_state(k0, n, Frame::rotating, dp.tau0);
    QuantumTrajectory traj = evolve_rotating(init, dp, tau_final, config);
    if (traj.status == RunStatus::ok || n >= max_levels) return traj;
    n = std::min(max_levels, (3 * n / 2 + 1) / 2 * 2);
  }
}

QuantumCutoff calibrate_quantum_cutoff(const DimensionlessParams& dp, double tau_final,
                                       double reference_p1, int n_levels,
                                       const IntegratorConfig& config, int max_levels) {
  if (reference_p1 <= 0.0)
    throw InvalidParameterError("calibrate_quantum_cutoff: reference drive must be positive");
  DimensionlessParams ref = dp;
  ref.p1 = reference_p1;
  const QuantumTrajectory traj =
      evolve_rotating_autosized(0, ref, tau_final, config, n_levels, max_levels);
  if (traj.status != RunStatus::ok)
    throw CalibrationFailureError(
        "reference run keeps hitting the truncation guard at " +
        std::to_string(traj.final_state().n_levels()) + " levels; " + traj.message);
  QuantumCutoff cut;
  cut.reference_p1 = reference_p1;
  cut.n_levels_used = traj.final_state().n_levels();
  cut.n_lock = static_cast<int>(std::lround(mean_level(traj.final_state())));
  if (cut.n_lock < 2)
    throw CalibrationFailureError("reference run did not lock: mean level " +
                                  std::to_string(cut.n_lock) + " at tau = " +
                                  std::to_string(tau_final));
  cut.n_cut = (cut.n_lock + 1) / 2;
  return cut;
}

double quantum_capture_probability(const QuantumState& final_state,
                                   const DimensionlessParams& dp, double tau_final, int n_cut) {
  if (final_state.frame != Frame::rotating)
    throw InvalidParameterError("quantum_capture_probability: expects a rotating-frame state");
  if (std::abs(final_state.time - tau_final) > 1e-6)
    throw InvalidParameterError("quantum_capture_probability: state is not at tau_final");
  if (n_cut < 1) throw InvalidParameterError("quantum_capture_probability: n_cut must be >= 1");
  if (tau_final <= crossing_time(0, dp.p2))
    throw UndefinedCaptureError("capture undefined before the first ladder crossing at tau = " +
                                std::to_string(crossing_time(0, dp.p2)));
  std::vector<double> high;
  high.reserve(final_state.amplitudes.size());
  for (int n = n_cut; n < final_state.n_levels(); ++n)
    high.push_back(std::norm(final_state.amplitudes[n]));
  const double p = high.empty() ? 0.0 : pairwise_sum(high);
  return std::clamp(p, 0.0, 1.0);
}

std::vector<double> thermal_level_weights(double temperature, const OscillatorParams& p,
                                          double tail, int max_levels) {
  if (temperature < 0.0 || !std::isfinite(temperature))
    throw InvalidParameterError("thermal_level_weights: temperature must be >= 0");
  if (temperature == 0.0) return {1.0};
  const double e0 = energy_level(0, p);
  std::vector<double> w(max_levels);
  for (int k = 0; k < max_levels; ++k)
    w[k] = std::exp(-(energy_level(k, p) - e0) / temperature);
  const double total = pairwise_sum(w);
  double kept = 0.0;
  std::size_t n_keep = w.size();
  for (std::size_t k = 0; k < w.size(); ++k) {
    kept += w[k];
    if (kept >= (1.0 - tail) * total) {
      n_keep = k + 1;
      break;
    }
  }
  w.resize(n_keep);
  for (double& x : w) x /= kept;
  return w;
}

SCurve scan_quantum_scurve(const QuantumScanSpec& spec, int n_threads) {
  check_grid(spec.eps_grid);
  validate(spec.base);
  const DimensionlessParams base_dp = to_dimensionless(spec.base);
  const double sa = std::sqrt(spec.base.alpha);
  const int n_pts = static_cast<int>(spec.eps_grid.size());

  std::vector<double> p1s(n_pts);
  for (int i = 0; i < n_pts; ++i) p1s[i] = spec.eps_grid[i] / (8.0 * sa);

  double ref_p1 = spec.reference_p1;
  if (ref_p1 <= 0.0) ref_p1 = std::max(2.0 * p1s.back(), 1.0);
  DimensionlessParams dp{0.0, base_dp.p2, spec.tau0};
  const QuantumCutoff cut = calibrate_quantum_cutoff(dp, spec.tau_final, ref_p1, spec.n_levels,
                                                     spec.integrator, spec.max_levels);

  const std::vector<double> weights =
      thermal_level_weights(spec.temperature, spec.base, spec.weight_tail);
  const int n_init = static_cast<int>(weights.size());

  std::vector<double> caps(static_cast<std::size_t>(n_pts) * n_init, 0.0);
  parallel_for(static_cast<std::size_t>(n_pts) * n_init, n_threads, [&](std::size_t job_u) {
    const int job = static_cast<int>(job_u);
    const int i = job / n_init, k = job % n_init;
    DimensionlessParams run_dp{p1s[i], base_dp.p2, spec.tau0};
    const QuantumTrajectory traj = evolve_rotating_autosized(
        k, run_dp, spec.tau_final, spec.integrator, spec.n_levels, spec.max_levels);
    if (traj.status != RunStatus::ok)
      throw Error("scan point eps = " + std::to_string(spec.eps_grid[i]) + ", level " +
                  std::to_string(k) + " trips the truncation guard even at " +
                  std::to_string(traj.final_state().n_levels()) + " levels");
    caps[job] =
        quantum_capture_probability(traj.final_state(), run_dp, spec.tau_final, cut.n_cut);
  });

  SCurve curve;
  curve.quantum = true;
  curve.drive_label = "eps";
  for (int i = 0; i < n_pts; ++i) {
    double p = 0.0;
    for (int k = 0; k < n_init; ++k) p += weights[k] * caps[static_cast<std::size_t>(i) * n_init + k];
    curve.points.push_back({spec.eps_grid[i], std::clamp(p, 0.0, 1.0), 0.0});
  }
  return curve;
}

// ---- classical --------------------------------------------------------------

double classical_lock_energy(const OscillatorParams& reference, double temperature, int n_traj,
                             std::uint64_t seed, double t_final, double step, int n_threads) {
  validate(reference);
  if (n_traj < 30) throw InvalidParameterError("classical_lock_energy: need >= 30 trajectories");
  const auto initial = sample_thermal(temperature, n_traj, seed, reference.t0);
  const auto ensemble = evolve_ensemble(initial, reference, t_final, step, 0.0, n_threads);
  const double e_lock = median(final_energies(ensemble, reference));
  const double background = 4.0 * std::max(temperature, 0.5);
  if (e_lock < background)
    throw CalibrationFailureError("reference ensemble not captured: median final energy " +
                                  std::to_string(e_lock) + " below background " +
                                  std::to_string(background));
  return e_lock;
}

CaptureEstimate classical_capture_fraction(std::span<const double> final_energies_in,
                                           double e_lock) {
  if (final_energies_in.empty())
    throw InvalidParameterError("classical_capture_fraction: empty ensemble");
  if (!(e_lock > 0.0)) throw InvalidParameterError("classical_capture_fraction: e_lock <= 0");
  const double n = static_cast<double>(final_energies_in.size());
  double count = 0.0;
  for (double e : final_energies_in)
    if (e >= 0.5 * e_lock) count += 1.0;
  CaptureEstimate est;
  est.probability = count / n;
  est.stderr_ = std::sqrt(est.probability * (1.0 - est.probability) / n);
  return est;
}

CaptureEstimate classical_capture_probability(const ClassicalCaptureSpec& spec) {
  validate(spec.params);
  if (spec.n_traj < 30)
    throw InvalidParameterError("classical_capture_probability: need >= 30 trajectories");
  const double sa = std::sqrt(spec.params.alpha);
  const double t_final = spec.tau_final / sa;

  OscillatorParams ref = spec.params;
  ref.epsilon = std::max(spec.reference_scale * spec.params.epsilon,
                         spec.reference_scale * theory_eps_floor(spec.params, spec.temperature));
  const double e_lock = classical_lock_energy(ref, spec.temperature, spec.n_traj, spec.seed,
                                              t_final, spec.step, spec.n_threads);

  const auto initial = sample_thermal(spec.temperature, spec.n_traj, spec.seed, spec.params.t0);
  const auto ensemble =
      evolve_ensemble(initial, spec.params, t_final, spec.step, 0.0, spec.n_threads);
  return classical_capture_fraction(final_energies(ensemble, spec.params), e_lock);
}

SCurve scan_classical_scurve(const ClassicalScanSpec& spec, int n_threads) {
  check_grid(spec.eps_grid);
  validate(spec.base);
  if (spec.n_traj < 30) throw InvalidParameterError("scan: need >= 30 trajectories");
  if (!(spec.temperature > 0.0)) throw InvalidParameterError("scan: temperature must be > 0");
  const double sa = std::sqrt(spec.base.alpha);
  const double t_final = spec.tau_final / sa;

  OscillatorParams ref = spec.base;
  ref.epsilon = std::max(spec.reference_scale * spec.eps_grid.back(),
                         spec.reference_scale * theory_eps_floor(spec.base, spec.temperature));
  const double e_lock = classical_lock_energy(ref, spec.temperature, spec.n_traj, spec.seed,
                                              t_final, spec.step, n_threads);

  // Common random numbers: one set of thermal draws serves every drive value.
  const auto initial =
      sample_thermal(spec.temperature, spec.n_traj, spec.seed, spec.base.t0);

  SCurve curve;
  curve.seed = spec.seed;
  curve.n_traj = spec.n_traj;
  curve.drive_label = "eps";
  for (double eps : spec.eps_grid) {
    OscillatorParams p = spec.base;
    p.epsilon = eps;
    const auto ensemble = evolve_ensemble(initial, p, t_final, spec.step, 0.0, n_threads);
    const CaptureEstimate est = classical_capture_fraction(final_energies(ensemble, p), e_lock);
    curve.points.push_back({eps, est.probability, est.stderr_});
  }
  return curve;
}

// ---- fitting ----------------------------------------------------------------

namespace {

struct Logistic {
  double c = 0.0;      // threshold
  double log_d = 0.0;  // ln Delta
};

double sse_of(const SCurve& curve, const Logistic& q) {
  double sse = 0.0;
  const double delta = std::exp(q.log_d);
  for (const auto& pt : curve.points) {
    const double f = 1.0 / (1.0 + std::exp(-(pt.drive - q.c) / delta));
    sse += (pt.probability - f) * (pt.probability - f);
  }
  return sse;
}

}  // namespace

ThresholdResult fit_threshold(const SCurve& curve) {
  const auto& pts = curve.points;
  if (pts.size() < 5) throw InvalidParameterError("fit_threshold: need >= 5 points");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].probability < 0.0 || pts[i].probability > 1.0)
      throw InvalidParameterError("fit_threshold: probability outside [0,1]");
    if (i > 0 && !(pts[i].drive > pts[i - 1].drive))
      throw InvalidParameterError("fit_threshold: drives must be strictly increasing");
  }
  const double lo = pts.front().drive, hi = pts.back().drive, span = hi - lo;
  double pmin = 1.0, pmax = 0.0;
  for (const auto& pt : pts) {
    pmin = std::min(pmin, pt.probability);
    pmax = std::max(pmax, pt.probability);
  }
  if (!(pmin < 0.25) || !(pmax > 0.75)) {
    const double s_lo = (pmin >= 0.25) ? lo - span : lo;
    const double s_hi = (pmax <= 0.75) ? hi + span : hi;
    throw NeedsWiderScanError("fit_threshold: curve spans [" + std::to_string(pmin) + ", " +
                                  std::to_string(pmax) + "], not the 0.25..0.75 transition",
                              s_lo, s_hi);
  }

  double h_min = span;
  for (std::size_t i = 1; i < pts.size(); ++i)
    h_min = std::min(h_min, pts[i].drive - pts[i - 1].drive);

  // Initial guesses: point nearest the midline, slope of the transition band.
  Logistic q;
  double best = 2.0;
  for (const auto& pt : pts)
    if (std::abs(pt.probability - 0.5) < best) {
      best = std::abs(pt.probability - 0.5);
      q.c = pt.drive;
    }
  std::vector<double> xs, ys;
  for (const auto& pt : pts)
    if (pt.probability > 0.1 && pt.probability < 0.9) {
      xs.push_back(pt.drive);
      ys.push_back(pt.probability);
    }
  double delta0 = h_min;
  if (xs.size() >= 2) {
    const LineFit lf = fit_line(xs, ys);
    if (lf.slope > 0.0) delta0 = 1.0 / (4.0 * lf.slope);
  }
  q.log_d = std::log(std::clamp(delta0, h_min / 8.0, span));
  const double log_d_floor = std::log(h_min / 8.0);

  // Damped Gauss-Newton on (c, ln Delta).
  double lambda = 1e-3, sse = sse_of(curve, q);
  double jtj00 = 0, jtj01 = 0, jtj11 = 0;
  for (int iter = 0; iter < 200; ++iter) {
    const double delta = std::exp(q.log_d);
    double g0 = 0, g1 = 0;
    jtj00 = jtj01 = jtj11 = 0;
    for (const auto& pt : pts) {
      const double u = (pt.drive - q.c) / delta;
      const double f = 1.0 / (1.0 + std::exp(-u));
      const double fp = f * (1.0 - f);
      const double jc = -fp / delta;  // df/dc
      const double jd = -fp * u;      // df/d(ln Delta)
      const double r = pt.probability - f;
      g0 += jc * r;
      g1 += jd * r;
      jtj00 += jc * jc;
      jtj01 += jc * jd;
      jtj11 += jd * jd;
    }
    bool moved = false;
    for (int tries = 0; tries < 12; ++tries) {
      const double a00 = jtj00 + lambda, a11 = jtj11 + lambda;
      const double det = a00 * a11 - jtj01 * jtj01;
      if (det == 0.0) break;
      const double dc = (a11 * g0 - jtj01 * g1) / det;
      const double dd = (a00 * g1 - jtj01 * g0) / det;
      Logistic trial{std::clamp(q.c + dc, lo - span, hi + span),
                     std::max(q.log_d + dd, log_d_floor)};
      const double trial_sse = sse_of(curve, trial);
      if (trial_sse <= sse) {
        if (std::abs(trial.c - q.c) < 1e-14 * std::max(1.0, std::abs(q.c)) &&
            std::abs(trial.log_d - q.log_d) < 1e-12)
          iter = 200;
        q = trial;
        sse = trial_sse;
        lambda = std::max(lambda / 3.0, 1e-12);
        moved = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!moved) break;
  }

  ThresholdResult out;
  out.threshold = q.c;
  out.width = 4.0 * std::exp(q.log_d);
  out.fit_residual = std::sqrt(sse / static_cast<double>(pts.size()));
  const double det = jtj00 * jtj11 - jtj01 * jtj01;
  if (det > 0.0 && pts.size() > 2) {
    const double sigma2 = sse / static_cast<double>(pts.size() - 2);
    out.threshold_stderr = std::sqrt(std::max(0.0, sigma2 * jtj11 / det));
  }

  if (out.fit_residual > 0.1) {
    // Interpolated bisection between the grid points bracketing the midline.
    std::vector<std::size_t> crossings;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
      if ((pts[i].probability - 0.5) * (pts[i + 1].probability - 0.5) <= 0.0 &&
          pts[i].probability != pts[i + 1].probability)
        crossings.push_back(i);
    if (crossings.empty())
      throw NeedsWiderScanError("fit_threshold: no grid interval brackets 50%", lo - span,
                                hi + span);
    const std::size_t i = crossings[crossings.size() / 2];
    const double f = (0.5 - pts[i].probability) / (pts[i + 1].probability - pts[i].probability);
    out.threshold = pts[i].drive + f * (pts[i + 1].drive - pts[i].drive);
    out.width = pts[i + 1].drive - pts[i].drive;
    out.threshold_stderr = 0.0;
    out.method = FitMethod::bisection;
  }

  if (out.threshold < lo || out.threshold > hi)
    throw NeedsWiderScanError("fit_threshold: threshold " + std::to_string(out.threshold) +
                                  " escapes the scanned range",
                              out.threshold - span, out.threshold + span);
  return out;
}

std::pair<SCurve, ThresholdResult> scan_until_bracketed(const GridScanner& scan, double lo,
                                                        double hi, int n_points, int max_rounds) {
  if (!(hi > lo)) throw InvalidParameterError("scan_until_bracketed: hi must exceed lo");
  for (int round = 0;; ++round) {
    const SCurve curve = scan(lo, hi, n_points);
    try {
      ThresholdResult fit = fit_threshold(curve);
      return {curve, fit};
    } catch (const NeedsWiderScanError& e) {
      if (round + 1 >= max_rounds) throw;
      lo = std::max(e.suggested_lo, 0.0);
      hi = e.suggested_hi;
    }
  }
}

ScalingCoefficients fit_log_scaling(std::span<const double> temperatures,
                                    std::span<const double> thresholds, bool saturated,
                                    TeffForm form) {
  if (temperatures.size() != thresholds.size() || temperatures.size() < 4)
    throw InvalidParameterError("fit_log_scaling: need >= 4 matching (T, threshold) pairs");
  double t_min = temperatures[0], t_max = temperatures[0];
  for (double t : temperatures) {
    if (!(t > 0.0)) throw InvalidParameterError("fit_log_scaling: temperatures must be > 0");
    t_min = std::min(t_min, t);
    t_max = std::max(t_max, t);
  }
  if (t_max / t_min < 10.0)
    throw InvalidParameterError("fit_log_scaling: temperatures must span at least a decade");
  std::vector<double> x(temperatures.size());
  for (std::size_t i = 0; i < temperatures.size(); ++i) {
    const double t = saturated ? effective_temperature(temperatures[i], form) : temperatures[i];
    x[i] = -std::log(t);
  }
  const LineFit lf = fit_line(x, thresholds);
  return ScalingCoefficients{lf.intercept, lf.slope};
}

}  // namespace parares

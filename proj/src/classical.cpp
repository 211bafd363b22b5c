#include "parares/classical.hpp"

#include <cmath>
#include <numbers>

#include "parares/errors.hpp"
#include "parares/numerics.hpp"
#include "parares/ode.hpp"
#include "parares/parallel.hpp"
#include "parares/rng.hpp"

namespace parares {

double unmodulated_energy(const ClassicalState& s, const OscillatorParams& p) {
  const double x2 = s.x * s.x;
  return 0.5 * s.u * s.u + 0.5 * x2 + 0.25 * p.beta * x2 * x2;
}

std::vector<ClassicalState> sample_thermal(double temperature, int n_traj, std::uint64_t seed,
                                           double t0) {
  if (!(temperature > 0.0)) throw InvalidParameterError("temperature must be positive");
  if (n_traj < 1) throw InvalidParameterError("need at least one trajectory");
  const double sigma = std::sqrt(temperature);
  std::vector<ClassicalState> states(n_traj);
  for (int i = 0; i < n_traj; ++i) {
    TrajectoryRng rng(seed, static_cast<std::uint64_t>(i));
    states[i] = ClassicalState{sigma * rng.gaussian(), sigma * rng.gaussian(), t0};
  }
  return states;
}

ClassicalState DuffingTrajectory::final_state() const {
  if (times.empty()) throw Error("empty trajectory");
  return ClassicalState{xs.back(), us.back(), times.back()};
}

DuffingTrajectory integrate_duffing(const ClassicalState& s0, const OscillatorParams& p,
                                    double t_final, double step, double sample_interval) {
  validate(p);
  auto rhs = [&p](double t, const std::vector<double>& y, std::vector<double>& dy) {
    const double x = y[0];
    dy[0] = y[1];
    dy[1] = -(1.0 + p.epsilon * std::cos(modulation_phase(t, p.alpha))) * x - p.beta * x * x * x;
  };
  ode::Workspace<double> w;
  auto stepper = [&w](auto& f, double t, double h, std::vector<double>& y) {
    ode::dop853_step(f, t, h, y, w);
  };
  DuffingTrajectory traj;
  auto obs = [&traj](double t, const std::vector<double>& y) {
    traj.times.push_back(t);
    traj.xs.push_back(y[0]);
    traj.us.push_back(y[1]);
    return true;
  };
  std::vector<double> y{s0.x, s0.u};
  ode::integrate_fixed(rhs, stepper, y, s0.t, t_final, step, sample_interval, obs);
  return traj;
}

std::vector<DuffingTrajectory> evolve_ensemble(std::span<const ClassicalState> initial,
                                               const OscillatorParams& p, double t_final,
                                               double step, double sample_interval,
                                               int n_threads) {
  std::vector<DuffingTrajectory> out(initial.size());
  parallel_for(initial.size(), n_threads, [&](std::size_t i) {
    out[i] = integrate_duffing(initial[i], p, t_final, step, sample_interval);
  });
  return out;
}

EnsembleSummary ensemble_mean_energy(const std::vector<DuffingTrajectory>& ensemble,
                                     const OscillatorParams& p) {
  if (ensemble.empty()) throw InvalidParameterError("empty ensemble");
  const std::size_t n_times = ensemble.front().times.size();
  for (const auto& tr : ensemble)
    if (tr.times.size() != n_times || tr.times != ensemble.front().times)
      throw InvalidParameterError("ensemble trajectories do not share a sample grid");
  const auto n_traj = ensemble.size();
  EnsembleSummary s;
  s.times = ensemble.front().times;
  s.mean_energy.resize(n_times);
  s.std_error.resize(n_times);
  std::vector<double> e(n_traj);
  for (std::size_t k = 0; k < n_times; ++k) {
    for (std::size_t i = 0; i < n_traj; ++i)
      e[i] = unmodulated_energy({ensemble[i].xs[k], ensemble[i].us[k], s.times[k]}, p);
    const double m = pairwise_sum(e) / static_cast<double>(n_traj);
    double var = 0.0;
    for (double ei : e) var += (ei - m) * (ei - m);
    var /= n_traj > 1 ? static_cast<double>(n_traj - 1) : 1.0;
    s.mean_energy[k] = m;
    s.std_error[k] = std::sqrt(var / static_cast<double>(n_traj));
  }
  return s;
}

// ---- averaged slow flow ---------------------------------------------------

AveragedState AveragedTrajectory::final_state() const {
  if (times.empty()) throw Error("empty trajectory");
  return AveragedState{amps.back(), phases.back(), times.back()};
}

std::vector<AveragedState> sample_averaged_thermal(double temperature,
                                                   const DimensionlessParams& dp, int n_traj,
                                                   std::uint64_t seed) {
  if (!(temperature > 0.0)) throw InvalidParameterError("temperature must be positive");
  if (!(dp.p2 > 0.0)) throw InvalidParameterError("p2 must be positive");
  if (n_traj < 1) throw InvalidParameterError("need at least one trajectory");
  const double sigma = std::sqrt(dp.p2 * temperature);
  std::vector<AveragedState> states(n_traj);
  for (int i = 0; i < n_traj; ++i) {
    TrajectoryRng rng(seed, static_cast<std::uint64_t>(i));
    states[i] = AveragedState{rng.rayleigh(sigma),
                              rng.uniform(0.0, 2.0 * std::numbers::pi), dp.tau0};
  }
  return states;
}

AveragedTrajectory integrate_averaged(const AveragedState& s0, const DimensionlessParams& dp,
                                      double tau_final, const AveragedOptions& opt) {
  if (s0.amp < 0.0) throw InvalidParameterError("amplitude must be >= 0");
  auto rhs = [&](double tau, const std::vector<double>& y, std::vector<double>& dy) {
    const double a = y[0];
    const double psi = y[1];
    dy[0] = 2.0 * dp.p1 * a * std::sin(psi);
    dy[1] = a * a - opt.detuning_slope * tau + 4.0 * dp.p1 * std::cos(psi);
  };
  ode::Workspace<double> w;
  auto stepper = [&w](auto& f, double t, double h, std::vector<double>& y) {
    ode::rk4_step(f, t, h, y, w);
  };
  AveragedTrajectory traj;
  auto obs = [&traj](double tau, const std::vector<double>& y) {
    traj.times.push_back(tau);
    traj.amps.push_back(y[0]);
    traj.phases.push_back(y[1]);
    return true;
  };
  std::vector<double> y{s0.amp, s0.phase};
  ode::integrate_fixed(rhs, stepper, y, s0.tau, tau_final, opt.step, opt.sample_interval, obs);
  return traj;
}

std::vector<AveragedTrajectory> evolve_averaged_ensemble(std::span<const AveragedState> initial,
                                                         const DimensionlessParams& dp,
                                                         double tau_final,
                                                         const AveragedOptions& opt,
                                                         int n_threads) {
  std::vector<AveragedTrajectory> out(initial.size());
  parallel_for(initial.size(), n_threads, [&](std::size_t i) {
    out[i] = integrate_averaged(initial[i], dp, tau_final, opt);
  });
  return out;
}

}  // namespace parares

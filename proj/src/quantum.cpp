#include "parares/quantum.hpp"

#include <cmath>

#include "parares/errors.hpp"
#include "parares/ode.hpp"

namespace parares {

namespace {

using Cvec = std::vector<std::complex<double>>;
constexpr std::complex<double> kMinusI{0.0, -1.0};

void check_levels(int n_levels) {
  if (n_levels < 4 || n_levels % 2 != 0)
    throw InvalidParameterError("level count must be even and >= 4");
}

// Ladder couplings to n-2 and n+2: qdn[n] = sqrt(Q_{n-1}), qup[n] = sqrt(Q_{n+1}).
struct LadderTables {
  std::vector<double> qdn, qup;
  explicit LadderTables(int n_levels) : qdn(n_levels), qup(n_levels) {
    for (int n = 0; n < n_levels; ++n) {
      qdn[n] = n >= 2 ? std::sqrt(static_cast<double>(n - 1) * n) : 0.0;
      qup[n] = std::sqrt(static_cast<double>(n + 1) * (n + 2));
    }
  }
};

struct RunAccumulator {
  QuantumTrajectory traj;
  double guard = 1e-6;
  double prev_norm = 1.0;
  double prev_time = 0.0;
  bool first = true;

  bool observe(double t, const Cvec& y) {
    const std::size_t n = y.size();
    traj.times.push_back(t);
    traj.states.push_back(y);
    double norm = 0.0;
    for (const auto& c : y) norm += std::norm(c);
    if (!first && t != prev_time) {
      const double rate = std::abs(norm - prev_norm) / std::abs(t - prev_time);
      traj.max_norm_drift_rate = std::max(traj.max_norm_drift_rate, rate);
    }
    first = false;
    prev_norm = norm;
    prev_time = t;
    const double top = std::norm(y[n - 1]) + std::norm(y[n - 2]);
    if (top >= guard) {
      traj.status = RunStatus::truncation_guard_triggered;
      traj.message = "top-two-level population " + std::to_string(top) + " at t = " +
                     std::to_string(t) + " exceeds the truncation guard";
      return false;
    }
    return true;
  }
};

template <class Rhs>
void drive(Rhs&& rhs, Cvec& y, double t0, double t1, const IntegratorConfig& config,
           RunAccumulator& acc) {
  auto obs = [&acc](double t, const Cvec& v) { return acc.observe(t, v); };
  if (config.method == StepMethod::dp54_adaptive) {
    ode::AdaptiveOptions opt;
    opt.rel_tol = config.rel_tol;
    opt.abs_tol = config.abs_tol;
    opt.initial_step = config.step;
    ode::integrate_adaptive(rhs, y, t0, t1, opt, config.sample_stride, obs);
  } else {
    ode::Workspace<std::complex<double>> w;
    auto step = [&w](auto& f, double t, double h, Cvec& v) { ode::rk4_step(f, t, h, v, w); };
    ode::integrate_fixed(rhs, step, y, t0, t1, config.step, config.sample_stride, obs);
  }
}

}  // namespace

double QuantumState::norm_sq() const {
  double s = 0.0;
  for (const auto& c : amplitudes) s += std::norm(c);
  return s;
}

QuantumState ground_state(int n_levels, Frame frame, double time0) {
  return fock_state(0, n_levels, frame, time0);
}

QuantumState fock_state(int n, int n_levels, Frame frame, double time0) {
  check_levels(n_levels);
  if (n < 0 || n >= n_levels) throw InvalidParameterError("fock index outside level range");
  QuantumState s;
  s.amplitudes.assign(n_levels, {0.0, 0.0});
  s.amplitudes[n] = 1.0;
  s.frame = frame;
  s.time = time0;
  s.time0 = time0;
  return s;
}

QuantumState QuantumTrajectory::state_at(std::size_t i) const {
  QuantumState s;
  s.amplitudes = states.at(i);
  s.frame = frame;
  s.time = times.at(i);
  s.time0 = times.front();
  return s;
}

QuantumState QuantumTrajectory::final_state() const {
  if (states.empty()) throw Error("empty trajectory");
  return state_at(states.size() - 1);
}

QuantumTrajectory evolve_lab(const QuantumState& initial, const OscillatorParams& p,
                             double t_final, const IntegratorConfig& config) {
  validate(p);
  if (initial.frame != Frame::lab) throw InvalidParameterError("initial state is not lab-frame");
  const int n_levels = initial.n_levels();
  check_levels(n_levels);

  LadderTables lt(n_levels);
  std::vector<double> energy(n_levels);
  for (int n = 0; n < n_levels; ++n) energy[n] = energy_level(n, p);
  const double drive_amp = 0.25 * p.epsilon;

  auto rhs = [&](double t, const Cvec& c, Cvec& dc) {
    const double cosphi = std::cos(modulation_phase(t, p.alpha));
    for (int n = 0; n < n_levels; ++n) {
      std::complex<double> h = (energy[n] + drive_amp * cosphi * (2.0 * n + 1.0)) * c[n];
      if (n >= 2) h += drive_amp * cosphi * lt.qdn[n] * c[n - 2];
      if (n + 2 < n_levels) h += drive_amp * cosphi * lt.qup[n] * c[n + 2];
      dc[n] = kMinusI * h;
    }
  };

  RunAccumulator acc;
  acc.guard = config.truncation_guard;
  acc.traj.frame = Frame::lab;
  acc.traj.dp = to_dimensionless(p);
  acc.traj.lab_params = p;
  Cvec y = initial.amplitudes;
  drive(rhs, y, initial.time, t_final, config, acc);
  return std::move(acc.traj);
}

QuantumTrajectory evolve_rotating(const QuantumState& initial, const DimensionlessParams& dp,
                                  double tau_final, const IntegratorConfig& config) {
  if (initial.frame != Frame::rotating)
    throw InvalidParameterError("initial state is not rotating-frame");
  if (!(dp.p1 >= 0.0) || !(dp.p2 >= 0.0))
    throw InvalidParameterError("p1 and p2 must be >= 0");
  const int n_levels = initial.n_levels();
  check_levels(n_levels);

  LadderTables lt(n_levels);
  auto rhs = [&](double tau, const Cvec& b, Cvec& db) {
    for (int n = 0; n < n_levels; ++n) {
      const double gamma_n = 0.5 * n * (dp.p2 * (n + 1.0) - tau);
      std::complex<double> h = gamma_n * b[n];
      if (n >= 2) h += dp.p1 * lt.qdn[n] * b[n - 2];
      if (n + 2 < n_levels) h += dp.p1 * lt.qup[n] * b[n + 2];
      db[n] = kMinusI * h;
    }
  };

  RunAccumulator acc;
  acc.guard = config.truncation_guard;
  acc.traj.frame = Frame::rotating;
  acc.traj.dp = dp;
  Cvec y = initial.amplitudes;
  drive(rhs, y, initial.time, tau_final, config, acc);
  return std::move(acc.traj);
}

std::vector<double> level_populations(const QuantumState& state) {
  std::vector<double> p(state.amplitudes.size());
  for (std::size_t n = 0; n < p.size(); ++n) p[n] = std::norm(state.amplitudes[n]);
  return p;
}

double mean_level(const QuantumState& state) {
  double s = 0.0;
  for (std::size_t n = 0; n < state.amplitudes.size(); ++n)
    s += static_cast<double>(n) * std::norm(state.amplitudes[n]);
  return s;
}

double mean_energy(const QuantumState& state, const OscillatorParams& p) {
  double s = 0.0;
  for (std::size_t n = 0; n < state.amplitudes.size(); ++n)
    s += energy_level(static_cast<int>(n), p) * std::norm(state.amplitudes[n]);
  return s;
}

QuantumState to_lab_frame(const QuantumState& state, const OscillatorParams& p) {
  if (state.frame == Frame::lab) return state;
  const double t = state.time / std::sqrt(p.alpha);
  QuantumState out = state;
  out.frame = Frame::lab;
  out.time = t;
  out.time0 = state.time0 / std::sqrt(p.alpha);
  // The map is local in time: level n rides at half the modulation phase,
  // plus one global zero-point factor. (Anything else would need a complex
  // coupling in the rotating equation: the n-dependent pieces of S_n must
  // telescope to exactly -phi across each n -> n+2 rung.)
  const double half_phi = 0.5 * modulation_phase(t, p.alpha);
  const double zero_point = (0.5 + 3.0 * p.beta / 16.0) * t;
  for (int n = 0; n < state.n_levels(); ++n)
    out.amplitudes[n] *= std::polar(1.0, -n * half_phi - zero_point);
  return out;
}

std::vector<std::pair<int, double>> detect_transition_times(const QuantumTrajectory& traj,
                                                            double noise_floor) {
  if (traj.frame != Frame::rotating)
    throw InvalidParameterError("transition detection expects a rotating-frame trajectory");
  if (traj.times.size() < 2) throw InvalidParameterError("trajectory too short");
  const double max_gap = 0.1 * traj.dp.p2;
  for (std::size_t i = 1; i < traj.times.size(); ++i) {
    if (traj.times[i] - traj.times[i - 1] > max_gap * (1.0 + 1e-9))
      throw InvalidParameterError("trajectory sampled coarser than 0.1 * p2");
  }
  const int n_levels = static_cast<int>(traj.states.front().size());
  std::vector<std::pair<int, double>> out;
  for (int n = 0; n + 2 < n_levels; n += 2) {
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      const double lower = std::norm(traj.states[i][n]);
      const double upper = std::norm(traj.states[i][n + 2]);
      if (upper > lower && lower + upper >= noise_floor) {
        out.emplace_back(n, traj.times[i]);
        break;
      }
    }
  }
  return out;
}

}  // namespace parares

#include "parares/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "parares/capture.hpp"
#include "parares/classical.hpp"
#include "parares/errors.hpp"
#include "parares/numerics.hpp"
#include "parares/parallel.hpp"
#include "parares/quantum.hpp"
#include "parares/theory.hpp"
#include "parares/wigner.hpp"

#ifndef PARARES_VERSION
#define PARARES_VERSION "0.0.0"
#endif

namespace parares {

namespace {

const std::set<std::string> kKnownKeys = {
    "experiment",
    "params.alpha", "params.beta", "params.epsilon", "params.t0",
    "dimensionless.p1", "dimensionless.p2", "dimensionless.tau0",
    "thermal.temperature", "thermal.teff_form",
    "ensemble.n_traj", "ensemble.seed",
    "integrator.method", "integrator.rel_tol", "integrator.abs_tol", "integrator.step",
    "integrator.sample_stride", "integrator.truncation_guard",
    "run.tau_final", "run.tau0", "run.n_levels", "run.max_levels", "run.snapshot_tau",
    "run.detuning_slope",
    "grid.n_x", "grid.half_width",
    "scan.kind", "scan.lo", "scan.hi", "scan.n_points", "scan.temperatures", "scan.p2_values",
    "scan.auto_widen", "scan.reference_scale",
    "output.dir", "output.format", "output.gnuplot",
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void config_error(const ExperimentConfig& c, const std::string& key,
                               const std::string& what) {
  const int line = c.lines.count(key) ? c.lines.at(key) : 0;
  throw InvalidParameterError(c.source + ":" + std::to_string(line) + ": " + what);
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1.0);
  return v;
}

std::string slug(std::string s) {
  for (char& ch : s)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '.' && ch != '-' && ch != '+')
      ch = '_';
  if (s.size() > 24) s.resize(24);
  return s;
}

}  // namespace

// ---- config ------------------------------------------------------------------

std::string ExperimentConfig::get_string(const std::string& key,
                                         const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str() || *end != '\0')
    config_error(*this, key, "'" + key + "' is not a number: '" + it->second + "'");
  return v;
}

int ExperimentConfig::get_int(const std::string& key, int fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  char* end = nullptr;
  const long v = std::strtol(it->second.c_str(), &end, 10);
  if (end == it->second.c_str() || *end != '\0')
    config_error(*this, key, "'" + key + "' is not an integer: '" + it->second + "'");
  return static_cast<int>(v);
}

bool ExperimentConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  const std::string v = it->second;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  config_error(*this, key, "'" + key + "' is not a boolean: '" + v + "'");
}

std::uint64_t ExperimentConfig::get_seed(const std::string& key, std::uint64_t fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  try {
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    config_error(*this, key, "'" + key + "' is not a seed: '" + it->second + "'");
  }
}

std::vector<double> ExperimentConfig::get_list(const std::string& key,
                                               const std::vector<double>& fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  std::vector<double> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0')
      config_error(*this, key, "'" + key + "' has a non-numeric entry: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) config_error(*this, key, "'" + key + "' is empty");
  return out;
}

std::string ExperimentConfig::canonical() const {
  std::string s;
  for (const auto& [k, v] : values) s += k + " = " + v + "\n";
  return s;
}

std::uint64_t ExperimentConfig::hash() const { return io::fnv1a64(canonical()); }

ExperimentConfig parse_config(const std::string& text, const std::string& source_name) {
  ExperimentConfig cfg;
  cfg.source = source_name;
  std::istringstream in(text);
  std::string raw, section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (const auto hash_pos = line.find('#'); hash_pos != std::string::npos)
      line.resize(hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw InvalidParameterError(source_name + ":" + std::to_string(lineno) +
                                    ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidParameterError(source_name + ":" + std::to_string(lineno) +
                                  ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw InvalidParameterError(source_name + ":" + std::to_string(lineno) +
                                  ": empty key or value");
    if (key != "experiment" && key.find('.') == std::string::npos && !section.empty())
      key = section + "." + key;
    if (!kKnownKeys.count(key))
      throw InvalidParameterError(source_name + ":" + std::to_string(lineno) +
                                  ": unknown key '" + key + "'");
    if (cfg.values.count(key))
      throw InvalidParameterError(source_name + ":" + std::to_string(lineno) +
                                  ": duplicate key '" + key + "'");
    cfg.values[key] = value;
    cfg.lines[key] = lineno;
  }
  cfg.experiment = cfg.get_string("experiment", "");
  if (!cfg.experiment.empty()) {
    const bool known = std::any_of(std::begin(kExperimentNames), std::end(kExperimentNames),
                                   [&](const char* n) { return cfg.experiment == n; });
    if (!known)
      config_error(cfg, "experiment", "unknown experiment '" + cfg.experiment + "'");
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InvalidParameterError("cannot open config file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), file.filename().string());
}

void apply_override(ExperimentConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw InvalidParameterError("override must look like key=value: '" + assignment + "'");
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (!kKnownKeys.count(key))
    throw InvalidParameterError("override names unknown key '" + key + "'");
  if (key.empty() || value.empty())
    throw InvalidParameterError("override has empty key or value: '" + assignment + "'");
  config.values[key] = value;
  config.lines[key] = 0;
  if (key == "experiment") {
    config.experiment = value;
    const bool known = std::any_of(std::begin(kExperimentNames), std::end(kExperimentNames),
                                   [&](const char* n) { return config.experiment == n; });
    if (!known) throw InvalidParameterError("unknown experiment '" + value + "'");
  }
}

// ---- shared resolution helpers -------------------------------------------------

namespace {

struct RunContext {
  const ExperimentConfig& cfg;
  std::filesystem::path dir;
  int threads = 0;
  io::json summary;
  std::vector<std::string> artifacts;
};

// Physical parameters with experiment-specific defaults; dimensionless input
// takes over when explicit p1/p2 keys are present.
OscillatorParams resolve_params(const ExperimentConfig& c, const OscillatorParams& def,
                                double tau0) {
  OscillatorParams p = def;
  p.alpha = c.get_double("params.alpha", def.alpha);
  p.beta = c.get_double("params.beta", def.beta);
  p.epsilon = c.get_double("params.epsilon", def.epsilon);
  if (c.has("dimensionless.p1") || c.has("dimensionless.p2")) {
    DimensionlessParams dp = to_dimensionless(p);
    dp.p1 = c.get_double("dimensionless.p1", dp.p1);
    dp.p2 = c.get_double("dimensionless.p2", dp.p2);
    p = from_dimensionless(dp, p.alpha);
  }
  p.t0 = c.get_double("params.t0", tau0 / std::sqrt(p.alpha));
  validate(p);
  return p;
}

IntegratorConfig resolve_integrator(const ExperimentConfig& c, double default_stride) {
  IntegratorConfig ic;
  const std::string method = c.get_string("integrator.method", "dp54");
  if (method == "dp54")
    ic.method = StepMethod::dp54_adaptive;
  else if (method == "rk4")
    ic.method = StepMethod::rk4_fixed;
  else
    config_error(c, "integrator.method", "integrator.method must be dp54 or rk4");
  ic.rel_tol = c.get_double("integrator.rel_tol", ic.rel_tol);
  ic.abs_tol = c.get_double("integrator.abs_tol", ic.abs_tol);
  ic.step = c.get_double("integrator.step", ic.step);
  ic.sample_stride = c.get_double("integrator.sample_stride", default_stride);
  ic.truncation_guard = c.get_double("integrator.truncation_guard", ic.truncation_guard);
  return ic;
}

TeffForm resolve_teff_form(const ExperimentConfig& c) {
  const std::string form = c.get_string("thermal.teff_form", "half-coth-half-inv-t");
  if (form == "half-coth-half-inv-t") return TeffForm::half_coth_half_inv_t;
  if (form == "half-coth-inv-t") return TeffForm::half_coth_inv_t;
  config_error(c, "thermal.teff_form",
               "thermal.teff_form must be half-coth-half-inv-t or half-coth-inv-t");
}

void write_gnuplot(RunContext& ctx, const std::string& script) {
  if (!ctx.cfg.get_bool("output.gnuplot", false)) return;
  std::ofstream out(ctx.dir / "plot.plt");
  out << "set datafile separator ','\nset key autotitle columnhead\n" << script;
  ctx.artifacts.push_back("plot.plt");
}

void write_curve_artifacts(RunContext& ctx, const SCurve& curve, const io::json& fit_info) {
  std::vector<io::Column> cols(3);
  cols[0].name = curve.drive_label;
  cols[1].name = "probability";
  cols[2].name = "stderr";
  for (const auto& pt : curve.points) {
    cols[0].values.push_back(pt.drive);
    cols[1].values.push_back(pt.probability);
    cols[2].values.push_back(pt.stderr_);
  }
  io::write_csv(ctx.dir / "scurve.csv", cols);
  io::write_json(ctx.dir / "scurve.json", io::to_json(curve));
  io::write_json(ctx.dir / "threshold.json", fit_info);
  ctx.artifacts.insert(ctx.artifacts.end(), {"scurve.csv", "scurve.json", "threshold.json"});
}

struct ScanOutcome {
  SCurve curve;
  ThresholdResult fit;
};

ScanOutcome classical_scan_auto(const OscillatorParams& base, double temperature, int n_traj,
                                std::uint64_t seed, double tau_final, double lo, double hi,
                                int n_points, bool widen, double reference_scale,
                                int n_threads) {
  const GridScanner scanner = [&](double a, double b, int n) {
    ClassicalScanSpec spec;
    spec.base = base;
    spec.eps_grid = linspace(a, b, n);
    spec.temperature = temperature;
    spec.n_traj = n_traj;
    spec.seed = seed;
    spec.tau_final = tau_final;
    spec.reference_scale = reference_scale;
    return scan_classical_scurve(spec, n_threads);
  };
  if (!widen) {
    SCurve curve = scanner(lo, hi, n_points);
    ThresholdResult fit = fit_threshold(curve);
    return {std::move(curve), fit};
  }
  auto [curve, fit] = scan_until_bracketed(scanner, lo, hi, n_points);
  return {std::move(curve), fit};
}

ScanOutcome quantum_scan_auto(const OscillatorParams& base, double temperature, double tau0,
                              double tau_final, int n_levels, int max_levels,
                              const IntegratorConfig& ic, double lo, double hi, int n_points,
                              bool widen, int n_threads) {
  const GridScanner scanner = [&](double a, double b, int n) {
    QuantumScanSpec spec;
    spec.base = base;
    spec.eps_grid = linspace(std::max(a, 0.0), b, n);
    spec.temperature = temperature;
    spec.tau0 = tau0;
    spec.tau_final = tau_final;
    spec.n_levels = n_levels;
    spec.max_levels = max_levels;
    spec.integrator = ic;
    return scan_quantum_scurve(spec, n_threads);
  };
  if (!widen) {
    SCurve curve = scanner(lo, hi, n_points);
    ThresholdResult fit = fit_threshold(curve);
    return {std::move(curve), fit};
  }
  auto [curve, fit] = scan_until_bracketed(scanner, lo, hi, n_points);
  return {std::move(curve), fit};
}

// ---- individual experiments ----------------------------------------------------

void run_plc(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const double tau0 = c.get_double("run.tau0", c.get_double("dimensionless.tau0", -10.0));
  OscillatorParams def;
  def.alpha = 1e-6;
  def.beta = 0.0133333333333333333;  // p2 = 10 at this alpha
  def.epsilon = 0.04;                // p1 = 5
  const OscillatorParams p = resolve_params(c, def, tau0);
  DimensionlessParams dp = to_dimensionless(p);
  dp.tau0 = tau0;
  const int n_levels = c.get_int("run.n_levels", 40);
  const double tau_final = c.get_double("run.tau_final", 130.0);
  const IntegratorConfig ic = resolve_integrator(c, std::min(0.09 * dp.p2, 0.5));

  const auto traj =
      evolve_rotating(ground_state(n_levels, Frame::rotating, tau0), dp, tau_final, ic);
  if (traj.status != RunStatus::ok)
    throw Error("ladder run tripped the truncation guard: " + traj.message);

  std::vector<io::Column> cols(3);
  cols[0].name = "tau";
  cols[1].name = "mean_level";
  cols[2].name = "mean_energy";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const QuantumState s = traj.state_at(i);
    cols[0].values.push_back(traj.times[i]);
    cols[1].values.push_back(mean_level(s));
    cols[2].values.push_back(mean_energy(s, p));
  }
  io::write_csv(ctx.dir / "run.csv", cols);
  ctx.artifacts.push_back("run.csv");

  const auto transitions = detect_transition_times(traj);
  std::vector<io::Column> tcols(3);
  tcols[0].name = "level";
  tcols[1].name = "tau_detected";
  tcols[2].name = "tau_predicted";
  for (const auto& [n, tau] : transitions) {
    tcols[0].values.push_back(n);
    tcols[1].values.push_back(tau);
    tcols[2].values.push_back(crossing_time(n, dp.p2));
  }
  io::write_csv(ctx.dir / "transitions.csv", tcols);
  ctx.artifacts.push_back("transitions.csv");

  ctx.summary["final_mean_level"] = cols[1].values.back();
  ctx.summary["final_mean_energy"] = cols[2].values.back();
  ctx.summary["n_transitions"] = transitions.size();
  if (!transitions.empty()) ctx.summary["first_crossing_tau"] = transitions.front().second;
  if (transitions.size() >= 2) {
    double spacing = 0.0;
    for (std::size_t i = 1; i < transitions.size(); ++i)
      spacing += transitions[i].second - transitions[i - 1].second;
    ctx.summary["mean_spacing"] = spacing / (static_cast<double>(transitions.size()) - 1.0);
  }
  write_gnuplot(ctx, "plot 'run.csv' using 1:3 with lines\n");
}

void run_par(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const double tau0 = c.get_double("run.tau0", c.get_double("dimensionless.tau0", -10.0));
  OscillatorParams def;
  def.alpha = 1e-4;
  def.beta = 1e-3;
  def.epsilon = 0.04;
  const OscillatorParams p = resolve_params(c, def, tau0);
  DimensionlessParams dp = to_dimensionless(p);
  dp.tau0 = tau0;
  const int n_levels = c.get_int("run.n_levels", 250);
  const double tau_final = c.get_double("run.tau_final", 15.0);
  const IntegratorConfig ic = resolve_integrator(c, 0.1);

  const auto traj =
      evolve_rotating(ground_state(n_levels, Frame::rotating, tau0), dp, tau_final, ic);
  if (traj.status != RunStatus::ok)
    throw Error("autoresonance run tripped the truncation guard: " + traj.message);

  std::vector<io::Column> cols(3);
  cols[0].name = "tau";
  cols[1].name = "mean_level";
  cols[2].name = "mean_energy";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const QuantumState s = traj.state_at(i);
    cols[0].values.push_back(traj.times[i]);
    cols[1].values.push_back(mean_level(s));
    cols[2].values.push_back(mean_energy(s, p));
  }
  io::write_csv(ctx.dir / "run.csv", cols);
  ctx.artifacts.push_back("run.csv");
  ctx.summary["final_mean_level"] = cols[1].values.back();
  ctx.summary["final_mean_energy"] = cols[2].values.back();
  write_gnuplot(ctx, "plot 'run.csv' using 1:3 with lines\n");
}

void run_classical_ensemble(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const double tau0 = c.get_double("run.tau0", -10.0);
  OscillatorParams def;
  def.alpha = 1e-4;
  def.beta = 1e-3;
  def.epsilon = 0.04;
  const OscillatorParams p = resolve_params(c, def, tau0);
  const double temperature = c.get_double("thermal.temperature", 0.5);
  const int n_traj = c.get_int("ensemble.n_traj", 300);
  const std::uint64_t seed = c.get_seed("ensemble.seed", 1);
  const double tau_final = c.get_double("run.tau_final", 15.0);
  const double stride_tau = c.get_double("integrator.sample_stride", 0.5);
  const double sa = std::sqrt(p.alpha);

  const auto initial = sample_thermal(temperature, n_traj, seed, p.t0);
  const auto ensemble = evolve_ensemble(initial, p, tau_final / sa, kClassicalStep,
                                        stride_tau / sa, ctx.threads);
  const EnsembleSummary summary = ensemble_mean_energy(ensemble, p);

  std::vector<io::Column> cols(4);
  cols[0].name = "t";
  cols[1].name = "tau";
  cols[2].name = "mean_energy";
  cols[3].name = "std_error";
  for (std::size_t i = 0; i < summary.times.size(); ++i) {
    cols[0].values.push_back(summary.times[i]);
    cols[1].values.push_back(summary.times[i] * sa);
    cols[2].values.push_back(summary.mean_energy[i]);
    cols[3].values.push_back(summary.std_error[i]);
  }
  io::write_csv(ctx.dir / "ensemble.csv", cols);
  ctx.artifacts.push_back("ensemble.csv");
  ctx.summary["final_mean_energy"] = summary.mean_energy.back();
  ctx.summary["final_std_error"] = summary.std_error.back();
  write_gnuplot(ctx, "plot 'ensemble.csv' using 2:3 with lines\n");
}

void run_averaged_ensemble(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const double tau0 = c.get_double("run.tau0", c.get_double("dimensionless.tau0", -10.0));
  OscillatorParams def;
  def.alpha = 1e-4;
  def.beta = 1e-3;
  def.epsilon = 0.04;
  const OscillatorParams p = resolve_params(c, def, tau0);
  DimensionlessParams dp = to_dimensionless(p);
  dp.tau0 = tau0;
  const double temperature = c.get_double("thermal.temperature", 0.5);
  const int n_traj = c.get_int("ensemble.n_traj", 300);
  const std::uint64_t seed = c.get_seed("ensemble.seed", 1);
  const double tau_final = c.get_double("run.tau_final", 15.0);

  AveragedOptions opt;
  opt.step = c.get_double("integrator.step", 1e-3);
  opt.sample_interval = c.get_double("integrator.sample_stride", 0.5);
  opt.detuning_slope = c.get_double("run.detuning_slope", 1.0);

  const auto initial = sample_averaged_thermal(temperature, dp, n_traj, seed);
  const auto ensemble = evolve_averaged_ensemble(initial, dp, tau_final, opt, ctx.threads);

  const std::size_t n_samples = ensemble.front().times.size();
  std::vector<io::Column> cols(3);
  cols[0].name = "tau";
  cols[1].name = "mean_amp";
  cols[2].name = "mean_energy";
  std::vector<double> amps(ensemble.size()), energies(ensemble.size());
  for (std::size_t i = 0; i < n_samples; ++i) {
    for (std::size_t k = 0; k < ensemble.size(); ++k) {
      amps[k] = ensemble[k].amps[i];
      energies[k] = amps[k] * amps[k] / (2.0 * dp.p2);
    }
    cols[0].values.push_back(ensemble.front().times[i]);
    cols[1].values.push_back(mean(amps));
    cols[2].values.push_back(mean(energies));
  }
  io::write_csv(ctx.dir / "ensemble.csv", cols);
  ctx.artifacts.push_back("ensemble.csv");
  ctx.summary["final_mean_amp"] = cols[1].values.back();
  ctx.summary["final_mean_energy"] = cols[2].values.back();
  write_gnuplot(ctx, "plot 'ensemble.csv' using 1:3 with lines\n");
}

void run_wigner_snapshot(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const double tau0 = c.get_double("run.tau0", c.get_double("dimensionless.tau0", -10.0));
  OscillatorParams def;
  def.alpha = 1e-4;
  def.beta = 1e-3;
  def.epsilon = 0.04;
  const OscillatorParams p = resolve_params(c, def, tau0);
  DimensionlessParams dp = to_dimensionless(p);
  dp.tau0 = tau0;
  const bool ladder = classify_regime(dp).regime == Regime::ladder_climbing;
  const int n_levels = c.get_int("run.n_levels", ladder ? 40 : 250);
  const double snapshot_tau = c.get_double("run.snapshot_tau", ladder ? 100.0 : 10.0);
  const IntegratorConfig ic = resolve_integrator(c, 0.5);

  const auto traj =
      evolve_rotating(ground_state(n_levels, Frame::rotating, tau0), dp, snapshot_tau, ic);
  if (traj.status != RunStatus::ok)
    throw Error("snapshot run tripped the truncation guard: " + traj.message);

  GridSpec grid;
  grid.n_x = c.get_int("grid.n_x", 1024);
  grid.half_width = c.get_double("grid.half_width", 0.0);
  const Wavefunction psi = reconstruct(traj.final_state(), p, grid);
  const WignerGrid w = wigner_transform(psi, ctx.threads);

  const bool binary = c.get_string("output.format", "csv") == "binary-grid";
  io::json meta{{"tau", snapshot_tau}, {"p1", dp.p1},       {"p2", dp.p2},
                {"alpha", p.alpha},    {"beta", p.beta},    {"epsilon", p.epsilon},
                {"n_levels", n_levels}};
  io::write_wigner(ctx.dir, "wigner", w, binary, meta);
  ctx.artifacts.push_back(binary ? "wigner.bin" : "wigner.csv");
  ctx.artifacts.push_back("wigner.json");

  std::vector<io::Column> pcols(4);
  pcols[0].name = "x";
  pcols[1].name = "re_psi";
  pcols[2].name = "im_psi";
  pcols[3].name = "density";
  for (int j = 0; j < psi.size(); ++j) {
    pcols[0].values.push_back(psi.x[j]);
    pcols[1].values.push_back(psi.psi[j].real());
    pcols[2].values.push_back(psi.psi[j].imag());
    pcols[3].values.push_back(std::norm(psi.psi[j]));
  }
  io::write_csv(ctx.dir / "psi.csv", pcols);
  ctx.artifacts.push_back("psi.csv");

  std::vector<io::Column> mcols(4);
  mcols[0].name = "x";
  mcols[1].name = "position_marginal";
  mcols[2].name = "p";
  mcols[3].name = "momentum_marginal";
  mcols[0].values = w.x;
  mcols[1].values = w.position_marginal();
  mcols[2].values = w.p;
  mcols[3].values = w.momentum_marginal();
  io::write_csv(ctx.dir / "marginals.csv", mcols);
  ctx.artifacts.push_back("marginals.csv");

  ctx.summary["norm"] = psi.norm();
  ctx.summary["total"] = w.total();
  ctx.summary["purity"] = w.purity();
  ctx.summary["w_origin"] = w.at(grid.n_x / 2, grid.n_x / 2);
  write_gnuplot(ctx, "set view map\nsplot 'wigner.csv' using 1:2:3 with pm3d\n");
}

void run_scurve(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const std::string kind = c.get_string("scan.kind", "classical");
  const double temperature =
      c.get_double("thermal.temperature", kind == "quantum" ? 0.1 : 0.5);
  const double tau0 = c.get_double("run.tau0", -10.0);
  const double tau_final = c.get_double("run.tau_final", 30.0);
  const bool widen = c.get_bool("scan.auto_widen", false);
  const int n_points = c.get_int("scan.n_points", 9);
  OscillatorParams def;
  def.alpha = 1e-4;
  def.beta = 1e-3;
  def.epsilon = 0.04;
  const OscillatorParams base = resolve_params(c, def, tau0);

  const double center = par_threshold_eps(std::max(temperature, 0.01), kClassicalEpsFit,
                                          kind == "quantum");
  const double lo = c.get_double("scan.lo", center - (kind == "quantum" ? 0.007 : 0.006));
  const double hi = c.get_double("scan.hi", center + (kind == "quantum" ? 0.007 : 0.006));

  SCurve curve;
  io::json fit_info;
  try {
    ScanOutcome out;
    if (kind == "classical") {
      out = classical_scan_auto(base, temperature, c.get_int("ensemble.n_traj", 300),
                                c.get_seed("ensemble.seed", 1), tau_final, lo, hi, n_points,
                                widen, c.get_double("scan.reference_scale", 2.0), ctx.threads);
    } else if (kind == "quantum") {
      out = quantum_scan_auto(base, temperature, tau0, tau_final,
                              c.get_int("run.n_levels", 250), c.get_int("run.max_levels", 1024),
                              resolve_integrator(c, 0.5), lo, hi, n_points, widen, ctx.threads);
    } else {
      config_error(c, "scan.kind", "scan.kind must be classical or quantum");
    }
    curve = std::move(out.curve);
    fit_info = io::to_json(out.fit);
    ctx.summary["threshold"] = out.fit.threshold;
    ctx.summary["width"] = out.fit.width;
    ctx.summary["fit_residual"] = out.fit.fit_residual;
    ctx.summary["threshold_stderr"] = out.fit.threshold_stderr;
  } catch (const NeedsWiderScanError& e) {
    // Keep the curve artifact even when no threshold can be quoted.
    if (kind == "classical") {
      ClassicalScanSpec spec;
      spec.base = base;
      spec.eps_grid = linspace(lo, hi, n_points);
      spec.temperature = temperature;
      spec.n_traj = c.get_int("ensemble.n_traj", 300);
      spec.seed = c.get_seed("ensemble.seed", 1);
      spec.tau_final = tau_final;
      curve = scan_classical_scurve(spec, ctx.threads);
    } else {
      QuantumScanSpec spec;
      spec.base = base;
      spec.eps_grid = linspace(std::max(lo, 0.0), hi, n_points);
      spec.temperature = temperature;
      spec.tau0 = tau0;
      spec.tau_final = tau_final;
      spec.n_levels = c.get_int("run.n_levels", 250);
      spec.integrator = resolve_integrator(c, 0.5);
      curve = scan_quantum_scurve(spec, ctx.threads);
    }
    fit_info = io::json{{"error", e.what()},
                        {"suggested_lo", e.suggested_lo},
                        {"suggested_hi", e.suggested_hi}};
    ctx.summary["threshold_error"] = e.what();
  }
  write_curve_artifacts(ctx, curve, fit_info);
  write_gnuplot(ctx, "plot 'scurve.csv' using 1:2:3 with yerrorlines\n");
}

void run_threshold_vs_t(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const std::string kind = c.get_string("scan.kind", "both");
  if (kind != "classical" && kind != "quantum" && kind != "both")
    config_error(c, "scan.kind", "scan.kind must be classical, quantum, or both");
  std::vector<double> default_ts;
  if (kind == "classical")
    default_ts = {0.5, 1.0, 2.0, 4.0, 8.0};
  else if (kind == "quantum")
    default_ts = {0.01, 0.1, 0.3};
  else
    default_ts = {0.01, 0.1, 0.3, 0.5, 1.0, 2.0, 4.0, 8.0};
  const std::vector<double> temps = c.get_list("scan.temperatures", default_ts);
  const double tau0 = c.get_double("run.tau0", -10.0);
  const double tau_final = c.get_double("run.tau_final", 30.0);
  const int n_points = c.get_int("scan.n_points", 9);
  const int n_traj = c.get_int("ensemble.n_traj", 200);
  const std::uint64_t seed = c.get_seed("ensemble.seed", 1);
  const TeffForm form = resolve_teff_form(c);
  OscillatorParams def;
  def.alpha = 1e-4;
  def.beta = 1e-3;
  def.epsilon = 0.04;
  const OscillatorParams base = resolve_params(c, def, tau0);
  const double nan = std::nan("");

  std::vector<io::Column> cols(8);
  cols[0].name = "T";
  cols[1].name = "eps_cr_classical";
  cols[2].name = "eps_cr_quantum";
  cols[3].name = "theory_unsaturated";
  cols[4].name = "theory_saturated";
  cols[5].name = "width_classical";
  cols[6].name = "width_quantum";
  cols[7].name = "stderr_classical";

  std::vector<double> cls_t, cls_eps, qnt_eps;
  for (const double t : temps) {
    const bool do_classical = (kind == "classical") || (kind == "both" && t >= 0.5);
    const bool do_quantum = (kind == "quantum") || (kind == "both" && t <= 1.0);
    double eps_c = nan, eps_q = nan, wid_c = nan, wid_q = nan, se_c = nan;
    if (do_classical) {
      const double center = par_threshold_eps(t, kClassicalEpsFit, false);
      const auto out = classical_scan_auto(base, t, n_traj, seed, tau_final, center - 0.006,
                                           center + 0.006, n_points, true, 2.0, ctx.threads);
      eps_c = out.fit.threshold;
      wid_c = out.fit.width;
      se_c = out.fit.threshold_stderr;
      cls_t.push_back(t);
      cls_eps.push_back(eps_c);
      io::write_json(ctx.dir / ("scurve_classical_T" + slug(io::format_double(t)) + ".json"),
                     io::to_json(out.curve));
    }
    if (do_quantum) {
      const double center = par_threshold_eps(std::max(t, 0.01), kClassicalEpsFit, true, form);
      const auto out = quantum_scan_auto(base, t, tau0, tau_final,
                                         c.get_int("run.n_levels", 250),
                                         c.get_int("run.max_levels", 1024),
                                         resolve_integrator(c, 0.5), center - 0.007,
                                         center + 0.007, n_points, true, ctx.threads);
      eps_q = out.fit.threshold;
      wid_q = out.fit.width;
      qnt_eps.push_back(eps_q);
      io::write_json(ctx.dir / ("scurve_quantum_T" + slug(io::format_double(t)) + ".json"),
                     io::to_json(out.curve));
    }
    cols[0].values.push_back(t);
    cols[1].values.push_back(eps_c);
    cols[2].values.push_back(eps_q);
    cols[3].values.push_back(par_threshold_eps(t, kClassicalEpsFit, false));
    cols[4].values.push_back(par_threshold_eps(t, kClassicalEpsFit, true, form));
    cols[5].values.push_back(wid_c);
    cols[6].values.push_back(wid_q);
    cols[7].values.push_back(se_c);
  }
  io::write_csv(ctx.dir / "thresholds.csv", cols);
  ctx.artifacts.push_back("thresholds.csv");

  if (cls_t.size() >= 4) {
    const ScalingCoefficients fit = fit_log_scaling(cls_t, cls_eps, false);
    ctx.summary["a"] = fit.intercept;
    ctx.summary["b"] = fit.slope;
    const auto kappa = ScalingCoefficients::kappa_from_classical_fit(
        fit.intercept, fit.slope, base.alpha, to_dimensionless(base).p2);
    ctx.summary["kappa0"] = kappa.intercept;
    ctx.summary["kappa1"] = kappa.slope;
  }
  if (!qnt_eps.empty())
    ctx.summary["quantum_plateau"] = mean(qnt_eps);
  write_gnuplot(ctx,
                "set logscale x\nplot 'thresholds.csv' using 1:2, '' using 1:3, '' using 1:4 "
                "with lines, '' using 1:5 with lines\n");
}

void run_threshold_vs_p2(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const std::vector<double> p2s = c.get_list(
      "scan.p2_values", {0.0035, 0.01, 0.035, 0.075, 0.25, 0.75, 2.0, 5.0, 10.0});
  const double temperature = c.get_double("thermal.temperature", 0.5);
  const double tau0 = c.get_double("run.tau0", -10.0);
  const int n_points = c.get_int("scan.n_points", 9);
  const int n_traj = c.get_int("ensemble.n_traj", 200);
  const std::uint64_t seed = c.get_seed("ensemble.seed", 1);
  const TeffForm form = resolve_teff_form(c);
  const double alpha = c.get_double("params.alpha", 1e-4);
  const double sa = std::sqrt(alpha);
  const double nan = std::nan("");
  const auto kappa = ScalingCoefficients::kappa_from_classical_fit(
      kClassicalEpsFit.intercept, kClassicalEpsFit.slope, 1e-4, 0.075);

  std::vector<io::Column> cols(6);
  cols[0].name = "p2";
  cols[1].name = "p1_cr_quantum";
  cols[2].name = "p1_cr_classical";
  cols[3].name = "plc_line";
  cols[4].name = "par_line";
  cols[5].name = "separator";

  std::vector<double> plateau;
  for (const double p2 : p2s) {
    const RegimeClass reg = classify_regime({0.237, p2, tau0});
    double p1_q = nan, p1_c = nan;
    if (reg.regime != Regime::autoresonance) {
      // Ladder side: ground-start scans evaluated past the fourth crossing.
      const OscillatorParams qbase = from_dimensionless({0.237, p2, tau0}, 1e-6);
      const double sq = std::sqrt(qbase.alpha);
      const auto out = quantum_scan_auto(qbase, 0.0, tau0, 17.0 * p2,
                                         c.get_int("run.n_levels", 40),
                                         c.get_int("run.max_levels", 1024),
                                         resolve_integrator(c, std::min(0.09 * p2, 0.5)),
                                         8.0 * sq * 0.13, 8.0 * sq * 0.36, n_points, true,
                                         ctx.threads);
      p1_q = out.fit.threshold / (8.0 * sq);
      if (p2 >= 2.0) plateau.push_back(p1_q);
    }
    if (reg.regime != Regime::ladder_climbing) {
      const OscillatorParams cbase = from_dimensionless({0.237, p2, tau0}, alpha);
      const double center = 8.0 * sa * par_threshold_p1(p2, temperature, kappa, true, form);
      const auto out =
          classical_scan_auto(cbase, temperature, n_traj, seed, 30.0, 0.6 * center,
                              1.5 * center, n_points, true, 2.0, ctx.threads);
      p1_c = out.fit.threshold / (8.0 * sa);
    }
    cols[0].values.push_back(p2);
    cols[1].values.push_back(p1_q);
    cols[2].values.push_back(p1_c);
    cols[3].values.push_back(plc_threshold());
    cols[4].values.push_back(par_threshold_p1(p2, temperature, kappa, true, form));
    cols[5].values.push_back(4.0 * p2 - 1.0 >= 0.0 ? 4.0 * p2 - 1.0 : nan);
  }
  io::write_csv(ctx.dir / "thresholds_p2.csv", cols);
  ctx.artifacts.push_back("thresholds_p2.csv");
  ctx.summary["n_points"] = p2s.size();
  if (!plateau.empty()) ctx.summary["plc_plateau_mean"] = mean(plateau);
  write_gnuplot(ctx,
                "set logscale xy\nplot 'thresholds_p2.csv' using 1:2, '' using 1:3, '' using "
                "1:4 with lines, '' using 1:5 with lines, '' using 1:6 with lines\n");
}

void run_theory_table(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const double temperature = c.get_double("thermal.temperature", 0.5);
  const TeffForm form = resolve_teff_form(c);
  std::vector<double> p2s = c.get_list("scan.p2_values", {});
  if (p2s.empty()) {
    const int n = 25;
    const double lo = std::log(0.0035), hi = std::log(7.1);
    for (int i = 0; i < n; ++i) p2s.push_back(std::exp(lo + (hi - lo) * i / (n - 1.0)));
  }
  const auto kappa = ScalingCoefficients::kappa_from_classical_fit(
      kClassicalEpsFit.intercept, kClassicalEpsFit.slope, 1e-4, 0.075);
  const double nan = std::nan("");

  std::vector<io::Column> cols(4);
  cols[0].name = "p2";
  cols[1].name = "p1_plc";
  cols[2].name = "p1_par";
  cols[3].name = "p1_separator";
  const double plc = plc_threshold();
  for (const double p2 : p2s) {
    cols[0].values.push_back(p2);
    cols[1].values.push_back(plc);
    cols[2].values.push_back(par_threshold_p1(p2, temperature, kappa, true, form));
    cols[3].values.push_back(4.0 * p2 - 1.0 >= 0.0 ? 4.0 * p2 - 1.0 : nan);
  }
  io::write_csv(ctx.dir / "theory.csv", cols);
  ctx.artifacts.push_back("theory.csv");
  ctx.summary["plc_threshold"] = plc;
  ctx.summary["kappa0"] = kappa.intercept;
  ctx.summary["kappa1"] = kappa.slope;
  ctx.summary["t_eff"] = effective_temperature(temperature, form);
  write_gnuplot(ctx, "set logscale x\nplot 'theory.csv' using 1:2 with lines, '' using 1:3 "
                     "with lines, '' using 1:4 with lines\n");
}

}  // namespace

// ---- runners ------------------------------------------------------------------

RunResult run_experiment(const ExperimentConfig& config, int n_threads) {
  if (config.experiment.empty())
    throw InvalidParameterError(config.source + ":0: no experiment selected");
  const auto t_start = std::chrono::steady_clock::now();

  char hash8[17];
  std::snprintf(hash8, sizeof hash8, "%08llx",
                static_cast<unsigned long long>(config.hash() & 0xffffffffULL));
  const std::filesystem::path out_root = config.get_string("output.dir", "out");
  RunContext ctx{config, out_root / (config.experiment + "-" + hash8),
                 resolve_thread_count(n_threads), io::json::object(), {}};
  std::filesystem::create_directories(ctx.dir);

  if (config.experiment == "plc-run")
    run_plc(ctx);
  else if (config.experiment == "par-run")
    run_par(ctx);
  else if (config.experiment == "classical-ensemble")
    run_classical_ensemble(ctx);
  else if (config.experiment == "averaged-ensemble")
    run_averaged_ensemble(ctx);
  else if (config.experiment == "wigner-snapshot")
    run_wigner_snapshot(ctx);
  else if (config.experiment == "scurve")
    run_scurve(ctx);
  else if (config.experiment == "threshold-vs-T")
    run_threshold_vs_t(ctx);
  else if (config.experiment == "threshold-vs-P2")
    run_threshold_vs_p2(ctx);
  else if (config.experiment == "theory-table")
    run_theory_table(ctx);
  else
    throw InvalidParameterError("unknown experiment '" + config.experiment + "'");

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  char hash16[17];
  std::snprintf(hash16, sizeof hash16, "%016llx",
                static_cast<unsigned long long>(config.hash()));
  io::json manifest{{"experiment", config.experiment},
                    {"config", config.values},
                    {"config_hash", hash16},
                    {"version", PARARES_VERSION},
                    {"wall_time_s", wall},
                    {"threads", ctx.threads},
                    {"artifacts", ctx.artifacts},
                    {"summary", ctx.summary}};
  io::write_json(ctx.dir / "manifest.json", manifest);

  RunResult result;
  result.out_dir = ctx.dir;
  result.summary = ctx.summary;
  result.artifacts = ctx.artifacts;
  result.artifacts.push_back("manifest.json");
  return result;
}

RunResult run_sweep(const ExperimentConfig& base, const std::string& axis,
                    const std::vector<std::string>& axis_values, int n_threads) {
  if (!kKnownKeys.count(axis))
    throw InvalidParameterError("sweep axis names unknown key '" + axis + "'");
  if (axis_values.empty()) throw InvalidParameterError("sweep needs at least one value");

  const std::filesystem::path out_root = base.get_string("output.dir", "out");
  char hash8[17];
  std::snprintf(hash8, sizeof hash8, "%08llx",
                static_cast<unsigned long long>(base.hash() & 0xffffffffULL));
  const std::filesystem::path dir =
      out_root / ("sweep-" + slug(axis) + "-" + hash8);
  std::filesystem::create_directories(dir);

  const int n_members = static_cast<int>(axis_values.size());
  const int resolved = resolve_thread_count(n_threads);
  const int member_parallel = std::min(resolved, n_members);
  const int inner_threads = std::max(1, resolved / member_parallel);

  std::vector<RunResult> results(n_members);
  std::vector<std::string> errors(n_members);
  parallel_for(static_cast<std::size_t>(n_members), member_parallel, [&](std::size_t iu) {
    const int i = static_cast<int>(iu);
    ExperimentConfig member = base;
    apply_override(member, axis + "=" + axis_values[i]);
    apply_override(member, "output.dir=" +
                               (dir / ("member-" + slug(axis_values[i]))).string());
    try {
      results[i] = run_experiment(member, inner_threads);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  // Merge: one row per member, columns = union of numeric summary keys.
  std::set<std::string> keys;
  for (const auto& r : results)
    for (const auto& [k, v] : r.summary.items())
      if (v.is_number()) keys.insert(k);
  std::vector<io::Column> cols;
  cols.push_back({axis, {}});
  for (const auto& k : keys) cols.push_back({k, {}});
  cols.push_back({"ok", {}});
  for (int i = 0; i < n_members; ++i) {
    char* end = nullptr;
    const double axis_num = std::strtod(axis_values[i].c_str(), &end);
    cols[0].values.push_back((end && *end == '\0') ? axis_num : static_cast<double>(i));
    std::size_t ci = 1;
    for (const auto& k : keys) {
      const auto& s = results[i].summary;
      cols[ci++].values.push_back(s.contains(k) && s[k].is_number()
                                      ? s[k].get<double>()
                                      : std::nan(""));
    }
    cols.back().values.push_back(errors[i].empty() ? 1.0 : 0.0);
  }
  io::write_csv(dir / "sweep.csv", cols);

  bool partial = false;
  io::json members = io::json::array();
  for (int i = 0; i < n_members; ++i) {
    io::json m{{"value", axis_values[i]}};
    if (errors[i].empty()) {
      m["out_dir"] = results[i].out_dir.string();
      m["summary"] = results[i].summary;
    } else {
      m["error"] = errors[i];
      partial = true;
    }
    members.push_back(m);
  }
  io::json manifest{{"experiment", base.experiment},
                    {"sweep_axis", axis},
                    {"config", base.values},
                    {"version", PARARES_VERSION},
                    {"partial", partial},
                    {"members", members}};
  io::write_json(dir / "manifest.json", manifest);

  RunResult result;
  result.exit_code = partial ? 2 : 0;
  result.out_dir = dir;
  result.summary = manifest;
  result.artifacts = {"sweep.csv", "manifest.json"};
  return result;
}

}  // namespace parares

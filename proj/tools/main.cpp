// Command-line front end: run experiments from INI configs, sweep one config
// key over a list of values, print closed-form threshold numbers, or just
// validate a config file.
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "parares/errors.hpp"
#include "parares/experiments.hpp"
#include "parares/params.hpp"
#include "parares/theory.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string experiment;
  std::vector<std::string> sets;
  std::string out_dir;
  std::string format;
  std::string seed;
  bool gnuplot = false;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("experiment", o.experiment, "Experiment name (overrides config)");
  cmd->add_option("-c,--config", o.config_path, "INI config file");
  cmd->add_option("-s,--set", o.sets, "Override a config key (key=value), repeatable");
  cmd->add_option("--seed", o.seed, "Ensemble seed (shorthand for ensemble.seed)");
  cmd->add_option("-o,--out", o.out_dir, "Output directory (shorthand for output.dir)");
  cmd->add_option("--format", o.format, "Artifact format: csv | json | binary-grid");
  cmd->add_flag("--gnuplot", o.gnuplot, "Also write a gnuplot quick-look script");
  cmd->add_option("-j,--threads", o.threads, "Worker threads (0 = auto)");
}

parares::ExperimentConfig build_config(const CommonOpts& o) {
  parares::ExperimentConfig cfg;
  if (!o.config_path.empty()) cfg = parares::load_config(o.config_path);
  for (const auto& s : o.sets) parares::apply_override(cfg, s);
  if (!o.experiment.empty()) parares::apply_override(cfg, "experiment=" + o.experiment);
  if (!o.seed.empty()) parares::apply_override(cfg, "ensemble.seed=" + o.seed);
  if (!o.out_dir.empty()) parares::apply_override(cfg, "output.dir=" + o.out_dir);
  if (!o.format.empty()) parares::apply_override(cfg, "output.format=" + o.format);
  if (o.gnuplot) parares::apply_override(cfg, "output.gnuplot=true");
  return cfg;
}

int print_theory(double p1, double p2, double temperature) {
  using namespace parares;
  const auto kappa = ScalingCoefficients::kappa_from_classical_fit(
      kClassicalEpsFit.intercept, kClassicalEpsFit.slope, 1e-4, 0.075);
  std::printf("p2                     = %.6g\n", p2);
  std::printf("plc threshold (p1)     = %.6f\n", plc_threshold());
  std::printf("par threshold (p1, T=%g) = %.6f\n", temperature,
              par_threshold_p1(p2, temperature, kappa));
  std::printf("separator p1 = 4*p2-1  = %.6f\n", 4.0 * p2 - 1.0);
  std::printf("first crossing tau     = %.6f\n", crossing_time(0, p2));
  if (p1 > 0.0) {
    const RegimeClass r = classify_regime({p1, p2, -10.0});
    const char* name = r.regime == Regime::ladder_climbing ? "ladder-climbing"
                       : r.regime == Regime::autoresonance ? "autoresonance"
                                                           : "crossover";
    std::printf("regime(p1=%g)          = %s (margin %.4g)\n", p1, name, r.margin);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chirped parametric oscillator simulations"};
  app.require_subcommand(1);

  CommonOpts run_opts;
  CLI::App* run_cmd = app.add_subcommand("run", "Run one experiment");
  add_common(run_cmd, run_opts);

  CommonOpts sweep_opts;
  std::string axis;
  std::vector<std::string> axis_values;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run one experiment per axis value");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--axis", axis, "Config key to sweep")->required();
  sweep_cmd->add_option("--values", axis_values, "Comma-separated axis values")
      ->required()
      ->delimiter(',');

  double th_p1 = 0.0, th_p2 = 10.0, th_t = 0.5;
  CLI::App* theory_cmd = app.add_subcommand("theory", "Print closed-form thresholds");
  theory_cmd->add_option("--p1", th_p1, "Drive strength to classify (optional)");
  theory_cmd->add_option("--p2", th_p2, "Anharmonicity parameter");
  theory_cmd->add_option("--temperature", th_t, "Initial temperature");

  CommonOpts val_opts;
  CLI::App* val_cmd = app.add_subcommand("validate-config", "Parse a config and exit");
  add_common(val_cmd, val_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      const auto result = parares::run_experiment(build_config(run_opts), run_opts.threads);
      std::printf("wrote %s\n", result.out_dir.string().c_str());
      for (const auto& a : result.artifacts) std::printf("  %s\n", a.c_str());
      return result.exit_code;
    }
    if (sweep_cmd->parsed()) {
      const auto result = parares::run_sweep(build_config(sweep_opts), axis, axis_values,
                                             sweep_opts.threads);
      std::printf("wrote %s\n", result.out_dir.string().c_str());
      if (result.exit_code != 0) std::fprintf(stderr, "sweep completed partially\n");
      return result.exit_code;
    }
    if (theory_cmd->parsed()) return print_theory(th_p1, th_p2, th_t);
    if (val_cmd->parsed()) {
      const auto cfg = build_config(val_opts);
      std::printf("ok: %zu keys", cfg.values.size());
      if (!cfg.experiment.empty()) std::printf(", experiment %s", cfg.experiment.c_str());
      std::printf("\n");
      return 0;
    }
  } catch (const parares::InvalidParameterError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

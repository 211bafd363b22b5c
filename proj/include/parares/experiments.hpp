// Experiment orchestration behind the CLI: config files, seeded runs, and
// figure-reproduction datasets with manifests.
//
// Configs are flat "section.key = value" INI files; command-line overrides
// use the same dotted keys. Every run writes its artifacts plus a
// manifest.json recording the resolved config, its hash, the code version,
// and wall time. Data files are deterministic for a fixed config, whatever
// the worker count.
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "parares/io.hpp"

namespace parares {

inline constexpr const char* kExperimentNames[] = {
    "plc-run",       "par-run",  "classical-ensemble", "averaged-ensemble", "wigner-snapshot",
    "scurve",        "threshold-vs-T", "threshold-vs-P2", "theory-table"};

struct ExperimentConfig {
  std::string experiment;
  std::map<std::string, std::string> values;  // dotted key -> raw text
  std::map<std::string, int> lines;           // dotted key -> source line
  std::string source = "<none>";              // file name for error messages

  bool has(const std::string& key) const { return values.count(key) != 0; }
  // Typed getters; parse failures throw InvalidParameterError citing
  // source:line.
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;
  std::vector<double> get_list(const std::string& key,
                               const std::vector<double>& fallback) const;

  // Canonical "key = value" dump (sorted) and its FNV-1a hash.
  std::string canonical() const;
  std::uint64_t hash() const;
};

// Parse config text / file. Unknown keys and malformed lines throw
// InvalidParameterError with a source:line reference.
ExperimentConfig parse_config(const std::string& text, const std::string& source_name);
ExperimentConfig load_config(const std::filesystem::path& file);

// "key=value" override (applied after file parsing; line reported as 0).
void apply_override(ExperimentConfig& config, const std::string& assignment);

struct RunResult {
  int exit_code = 0;
  std::filesystem::path out_dir;
  io::json summary;
  std::vector<std::string> artifacts;
};

// Execute one experiment; artifacts land in <output.dir>/<experiment>-<hash8>/.
RunResult run_experiment(const ExperimentConfig& config, int n_threads = 0);

// One run per axis value (axis is a dotted config key), members executed in
// parallel with results merged into sweep.csv. A failing member marks the
// sweep partial (nonzero exit) but completed members are kept.
RunResult run_sweep(const ExperimentConfig& base, const std::string& axis,
                    const std::vector<std::string>& axis_values, int n_threads = 0);

}  // namespace parares

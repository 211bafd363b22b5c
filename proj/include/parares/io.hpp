// Artifact export: full-precision CSV tables, JSON sidecars, and phase-space
// grids (CSV or raw binary + JSON header). All writers are deterministic for
// fixed inputs.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "parares/capture.hpp"
#include "parares/wigner.hpp"

namespace parares::io {

using json = nlohmann::json;

// Shortest decimal string that parses back to exactly v.
std::string format_double(double v);

struct Column {
  std::string name;
  std::vector<double> values;
};

// Comma-separated table, one header row; columns must share one length.
void write_csv(const std::filesystem::path& file, const std::vector<Column>& columns);

// FNV-1a 64-bit over the raw bytes; used for config hashes in manifests.
std::uint64_t fnv1a64(std::string_view bytes);

json to_json(const SCurve& curve);
json to_json(const ThresholdResult& fit);

void write_json(const std::filesystem::path& file, const json& j);
json read_json(const std::filesystem::path& file);

// stem.json header (axes, spacing, extra metadata) next to either
// stem.csv (x, p, w rows, x-major) or stem.bin (row-major doubles,
// native little-endian).
void write_wigner(const std::filesystem::path& dir, const std::string& stem,
                  const WignerGrid& grid, bool binary, const json& extra_meta = {});

}  // namespace parares::io

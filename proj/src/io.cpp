#include "parares/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "parares/errors.hpp"

namespace parares::io {

std::string format_double(double v) {
  char buf[40];
  // Prefer the shorter form when it already round-trips.
  std::snprintf(buf, sizeof buf, "%.15g", v);
  if (std::strtod(buf, nullptr) == v) return buf;
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::filesystem::path& file, const std::vector<Column>& columns) {
  if (columns.empty()) throw InvalidParameterError("write_csv: no columns");
  const std::size_t n = columns.front().values.size();
  for (const auto& c : columns)
    if (c.values.size() != n)
      throw InvalidParameterError("write_csv: column '" + c.name + "' length mismatch");
  std::ofstream out(file);
  if (!out) throw Error("write_csv: cannot open " + file.string());
  for (std::size_t c = 0; c < columns.size(); ++c)
    out << (c ? "," : "") << columns[c].name;
  out << '\n';
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c)
      out << (c ? "," : "") << format_double(columns[c].values[r]);
    out << '\n';
  }
  if (!out) throw Error("write_csv: write failed for " + file.string());
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

json to_json(const SCurve& curve) {
  json pts = json::array();
  for (const auto& p : curve.points)
    pts.push_back({{"drive", p.drive}, {"probability", p.probability}, {"stderr", p.stderr_}});
  return json{{"points", pts},
              {"drive_label", curve.drive_label},
              {"seed", curve.seed},
              {"n_traj", curve.n_traj},
              {"quantum", curve.quantum}};
}

json to_json(const ThresholdResult& fit) {
  return json{{"threshold", fit.threshold},
              {"width", fit.width},
              {"fit_residual", fit.fit_residual},
              {"threshold_stderr", fit.threshold_stderr},
              {"method", fit.method == FitMethod::logistic_fit ? "logistic-fit" : "bisection"}};
}

void write_json(const std::filesystem::path& file, const json& j) {
  std::ofstream out(file);
  if (!out) throw Error("write_json: cannot open " + file.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error("write_json: write failed for " + file.string());
}

json read_json(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("read_json: cannot open " + file.string());
  json j;
  in >> j;
  return j;
}

void write_wigner(const std::filesystem::path& dir, const std::string& stem,
                  const WignerGrid& grid, bool binary, const json& extra_meta) {
  const int n = grid.size();
  json header{{"x_min", grid.x.front()}, {"x_max", grid.x.back()},   {"n_x", n},
              {"p_min", grid.p.front()}, {"p_max", grid.p.back()},   {"n_p", n},
              {"dx", grid.dx},           {"dp", grid.dp},
              {"layout", "x-major"},     {"format", binary ? "float64-le" : "csv"}};
  if (!extra_meta.is_null())
    for (const auto& [k, v] : extra_meta.items()) header[k] = v;
  write_json(dir / (stem + ".json"), header);

  if (binary) {
    std::ofstream out(dir / (stem + ".bin"), std::ios::binary);
    if (!out) throw Error("write_wigner: cannot open output in " + dir.string());
    out.write(reinterpret_cast<const char*>(grid.w.data()),
              static_cast<std::streamsize>(grid.w.size() * sizeof(double)));
    if (!out) throw Error("write_wigner: binary write failed in " + dir.string());
  } else {
    std::vector<Column> cols(3);
    cols[0].name = "x";
    cols[1].name = "p";
    cols[2].name = "w";
    const std::size_t total = grid.w.size();
    for (auto& c : cols) c.values.reserve(total);
    for (int ix = 0; ix < n; ++ix)
      for (int ip = 0; ip < n; ++ip) {
        cols[0].values.push_back(grid.x[ix]);
        cols[1].values.push_back(grid.p[ip]);
        cols[2].values.push_back(grid.at(ix, ip));
      }
    write_csv(dir / (stem + ".csv"), cols);
  }
}

}  // namespace parares::io

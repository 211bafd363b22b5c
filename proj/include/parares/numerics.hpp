// Small numerical helpers: order-stable reductions and least squares on a line.
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "parares/errors.hpp"

namespace parares {

// Pairwise (cascade) summation. Error grows like log(n) instead of n, and the
// result depends only on element order, not on how work was split across
// threads, which keeps ensemble reductions bit-reproducible.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline double mean(std::span<const double> v) {
  if (v.empty()) throw InvalidParameterError("mean of empty range");
  return pairwise_sum(v) / static_cast<double>(v.size());
}

inline double coth(double x) { return 1.0 / std::tanh(x); }

// Ordinary least squares for y = intercept + slope * x.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw InvalidParameterError("fit_line needs >= 2 matching points");
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  if (det == 0.0) throw InvalidParameterError("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace parares

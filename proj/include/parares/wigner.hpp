// Phase-space diagnostics: position-space wavefunctions rebuilt from
// level amplitudes, and the Wigner distribution
//
//   W(x, p) = (1/pi) Int dy  psi*(x + y) psi(x - y) e^{2 i p y},
//
// evaluated row by row (fixed x) with a radix-2 transform over y. On the
// induced momentum grid p_m = pi m / (n dx) the discrete transform keeps the
// continuum identities exact to roundoff: integrating out p recovers
// |psi(x)|^2 pointwise, integrating out x recovers the discrete momentum
// density, and 2 pi Int W^2 = 1 for pure states.
#pragma once

#include <complex>
#include <span>
#include <vector>

#include "parares/params.hpp"
#include "parares/quantum.hpp"

namespace parares {

struct GridSpec {
  int n_x = 1024;           // samples; must be a power of two >= 16
  double half_width = 0.0;  // 0 = auto: sqrt(2 N + 1) + 8 for basis size N
};

struct Wavefunction {
  std::vector<double> x;  // uniform ascending grid with x = 0 at index n/2
  std::vector<std::complex<double>> psi;
  double dx = 0.0;

  int size() const { return static_cast<int>(x.size()); }
  double norm() const;  // trapezoid integral of |psi|^2
};

struct WignerGrid {
  std::vector<double> x;  // n grid points, same axis as the wavefunction
  std::vector<double> p;  // n points, spacing pi / (n dx), p = 0 at index n/2
  std::vector<double> w;  // row-major, w[ix * n + ip]
  double dx = 0.0;
  double dp = 0.0;

  int size() const { return static_cast<int>(x.size()); }
  double at(int ix, int ip) const { return w[static_cast<std::size_t>(ix) * x.size() + ip]; }
  double total() const;  // Int W dx dp

  // Int W dp as a function of x (the position density), and Int W dx as a
  // function of p (the momentum density).
  std::vector<double> position_marginal() const;
  std::vector<double> momentum_marginal() const;

  // 2 pi Int W^2 dx dp; 1 for pure states, < 1 for mixtures.
  double purity() const;
};

// The x axis implied by a grid spec for a basis of n_levels states.
// Throws InvalidParameterError on a non-power-of-two or undersized grid.
std::vector<double> make_axis(const GridSpec& grid, int n_levels);

// Harmonic-oscillator eigenfunction psi_n (unit mass and frequency) sampled
// on a uniform axis, by the stable upward recurrence
//   psi_n = sqrt(2/n) x psi_{n-1} - sqrt((n-1)/n) psi_{n-2}.
// Orthonormal on the grid to 1e-8 for n <= 250 when the axis spans
// +-(sqrt(2n+1) + 8). Throws DomainTooSmallError when the axis stops less
// than 4 units past the classical turning point sqrt(2n+1).
std::vector<double> hermite_mode(int n, std::span<const double> x);

// psi(x) = sum_n c_n psi_n(x). Rotating-frame amplitudes are first mapped
// back to lab amplitudes with to_lab_frame, the inverse of the frame change
// that removed the diagonal phases. Throws
// DomainTooSmallError if the grid clips the state (norm defect or edge
// amplitude above 1e-6 of peak); otherwise the result is normalized on the
// grid and |psi| at both edges is below 1e-8 of its peak.
Wavefunction reconstruct(const QuantumState& state, const OscillatorParams& p,
                         const GridSpec& grid = {});

// Wigner distribution of a normalized wavefunction. Rows are independent and
// run in parallel; the output does not depend on the worker count.
WignerGrid wigner_transform(const Wavefunction& psi, int n_threads = 0);

// |psi~(p)|^2 on the same momentum grid the transform induces, computed
// directly from psi by a zero-padded discrete transform. Cross-checks
// WignerGrid::momentum_marginal.
std::vector<double> momentum_density(const Wavefunction& psi);

}  // namespace parares

#include "parares/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "parares/errors.hpp"
#include "parares/numerics.hpp"
#include "parares/parallel.hpp"

namespace parares {

namespace {

constexpr double kPi = 3.14159265358979323846;

// In-place radix-2 transform, sum_j a_j e^{sign 2 pi i j k / n}; no 1/n.
void fft(std::vector<std::complex<double>>& a, int sign) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * kPi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const auto u = a[i + k];
        const auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// i^m for possibly negative m.
std::complex<double> quarter_phase(int m) {
  switch (((m % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

double Wavefunction::norm() const {
  const std::size_t n = psi.size();
  std::vector<double> sq(n);
  for (std::size_t j = 0; j < n; ++j) sq[j] = std::norm(psi[j]);
  double s = pairwise_sum(sq);
  s -= 0.5 * (sq.front() + sq.back());  // trapezoid end weights
  return s * dx;
}

std::vector<double> make_axis(const GridSpec& grid, int n_levels) {
  if (!is_pow2(grid.n_x) || grid.n_x < 16)
    throw InvalidParameterError("make_axis: n_x must be a power of two >= 16");
  if (n_levels < 1) throw InvalidParameterError("make_axis: empty basis");
  double half = grid.half_width;
  if (half == 0.0) half = std::sqrt(2.0 * n_levels + 1.0) + 8.0;
  if (!(half > 0.0)) throw InvalidParameterError("make_axis: half_width must be positive");
  const double dx = 2.0 * half / grid.n_x;
  std::vector<double> x(grid.n_x);
  for (int j = 0; j < grid.n_x; ++j) x[j] = (j - grid.n_x / 2) * dx;
  return x;
}

std::vector<double> hermite_mode(int n, std::span<const double> x) {
  if (n < 0) throw InvalidParameterError("hermite_mode: negative level");
  if (x.size() < 2) throw InvalidParameterError("hermite_mode: axis too short");
  const double reach = std::max(std::abs(x.front()), std::abs(x.back()));
  const double needed = std::sqrt(2.0 * n + 1.0) + 4.0;
  if (reach < needed)
    throw DomainTooSmallError("hermite_mode: axis ends " + std::to_string(reach) +
                              " from origin; level " + std::to_string(n) + " needs " +
                              std::to_string(needed));
  std::vector<double> cur(x.size()), pm1(x.size()), pm2(x.size());
  const double c0 = std::pow(kPi, -0.25);
  for (std::size_t j = 0; j < x.size(); ++j) cur[j] = c0 * std::exp(-0.5 * x[j] * x[j]);
  for (int m = 1; m <= n; ++m) {
    std::swap(pm2, pm1);
    std::swap(pm1, cur);
    const double am = std::sqrt(2.0 / m);
    const double bm = (m > 1) ? std::sqrt((m - 1.0) / m) : 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) cur[j] = am * x[j] * pm1[j] - bm * pm2[j];
  }
  return cur;
}

Wavefunction reconstruct(const QuantumState& state, const OscillatorParams& p,
                         const GridSpec& grid) {
  const int n_levels = state.n_levels();
  Wavefunction wf;
  wf.x = make_axis(grid, n_levels);
  wf.dx = wf.x[1] - wf.x[0];
  const std::size_t nx = wf.x.size();

  // Lab amplitudes, with frame phases reattached when needed.
  const std::vector<std::complex<double>> c = to_lab_frame(state, p).amplitudes;

  // One recurrence pass over the basis, accumulating c_n psi_n(x).
  wf.psi.assign(nx, {0.0, 0.0});
  const double reach = std::abs(wf.x.front());
  const double needed = std::sqrt(2.0 * (n_levels - 1) + 1.0) + 4.0;
  if (reach < needed)
    throw DomainTooSmallError("reconstruct: axis spans " + std::to_string(reach) +
                              " but the top level needs " + std::to_string(needed));
  std::vector<double> cur(nx), pm1(nx), pm2(nx);
  const double c0 = std::pow(kPi, -0.25);
  for (std::size_t j = 0; j < nx; ++j) cur[j] = c0 * std::exp(-0.5 * wf.x[j] * wf.x[j]);
  for (int n = 0; n < n_levels; ++n) {
    if (n > 0) {
      std::swap(pm2, pm1);
      std::swap(pm1, cur);
      const double an = std::sqrt(2.0 / n);
      const double bn = (n > 1) ? std::sqrt((n - 1.0) / n) : 0.0;
      for (std::size_t j = 0; j < nx; ++j) cur[j] = an * wf.x[j] * pm1[j] - bn * pm2[j];
    }
    if (c[n] != std::complex<double>(0.0, 0.0))
      for (std::size_t j = 0; j < nx; ++j) wf.psi[j] += c[n] * cur[j];
  }

  double peak = 0.0;
  for (const auto& v : wf.psi) peak = std::max(peak, std::abs(v));
  const double edge = std::max(std::abs(wf.psi.front()), std::abs(wf.psi.back()));
  if (peak == 0.0 || edge > 1e-6 * peak)
    throw DomainTooSmallError("reconstruct: state reaches the grid edge (|psi|_edge/peak = " +
                              std::to_string(edge / (peak > 0 ? peak : 1.0)) + ")");
  // Compare against the coefficients' own norm, not against 1: a slightly
  // unnormalized input (e.g. integrator norm drift) is fine, but a grid that
  // fails to resolve the state loses probability relative to sum |c_n|^2.
  double basis_norm = 0.0;
  for (const auto& v : c) basis_norm += std::norm(v);
  const double raw_norm = wf.norm();
  if (std::abs(raw_norm - basis_norm) > 1e-6 * std::max(basis_norm, 1e-12))
    throw DomainTooSmallError("reconstruct: grid norm " + std::to_string(raw_norm) +
                              " vs basis norm " + std::to_string(basis_norm) +
                              "; state not resolved");
  const double scale = 1.0 / std::sqrt(raw_norm);
  for (auto& v : wf.psi) v *= scale;
  return wf;
}

WignerGrid wigner_transform(const Wavefunction& psi, int n_threads) {
  const int n = psi.size();
  if (!is_pow2(n) || n < 16)
    throw InvalidParameterError("wigner_transform: grid length must be a power of two >= 16");
  if (std::abs(psi.norm() - 1.0) > 1e-6)
    throw InvalidParameterError("wigner_transform: input not normalized");

  WignerGrid g;
  g.x = psi.x;
  g.dx = psi.dx;
  g.dp = kPi / (n * psi.dx);
  g.p.resize(n);
  for (int m = 0; m < n; ++m) g.p[m] = (m - n / 2) * g.dp;
  g.w.assign(static_cast<std::size_t>(n) * n, 0.0);

  const double scale = psi.dx / kPi;
  parallel_for(static_cast<std::size_t>(n), n_threads, [&](std::size_t ix_u) {
    const int ix = static_cast<int>(ix_u);
    std::vector<std::complex<double>> f(n);
    for (int kp = 0; kp < n; ++kp) {
      const int k = kp - n / 2;
      const int ip = ix + k, im = ix - k;
      f[kp] = (ip >= 0 && ip < n && im >= 0 && im < n)
                  ? std::conj(psi.psi[ip]) * psi.psi[im]
                  : std::complex<double>(0.0, 0.0);
    }
    fft(f, +1);
    double* row = g.w.data() + static_cast<std::size_t>(ix) * n;
    for (int mp = 0; mp < n; ++mp) {
      const int m = mp - n / 2;
      const double sgn = (m % 2 != 0) ? -1.0 : 1.0;
      row[mp] = scale * sgn * f[(mp + n / 2) % n].real();
    }
  });
  return g;
}

std::vector<double> momentum_density(const Wavefunction& psi) {
  const int n = psi.size();
  std::vector<std::complex<double>> g(2 * static_cast<std::size_t>(n), {0.0, 0.0});
  for (int j = 0; j < n; ++j) g[j] = psi.psi[j];
  fft(g, -1);
  const double scale = psi.dx / std::sqrt(2.0 * kPi);
  std::vector<double> out(n);
  for (int mp = 0; mp < n; ++mp) {
    const int m = mp - n / 2;
    const std::complex<double> amp = scale * quarter_phase(m) * g[((m % (2 * n)) + 2 * n) % (2 * n)];
    out[mp] = std::norm(amp);
  }
  return out;
}

double WignerGrid::total() const { return pairwise_sum(w) * dx * dp; }

std::vector<double> WignerGrid::position_marginal() const {
  const int n = size();
  std::vector<double> out(n);
  for (int ix = 0; ix < n; ++ix)
    out[ix] = pairwise_sum(std::span(w).subspan(static_cast<std::size_t>(ix) * n, n)) * dp;
  return out;
}

std::vector<double> WignerGrid::momentum_marginal() const {
  const int n = size();
  std::vector<double> col(n), out(n);
  for (int ip = 0; ip < n; ++ip) {
    for (int ix = 0; ix < n; ++ix) col[ix] = w[static_cast<std::size_t>(ix) * n + ip];
    out[ip] = pairwise_sum(col) * dx;
  }
  return out;
}

double WignerGrid::purity() const {
  std::vector<double> sq(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) sq[i] = w[i] * w[i];
  return 2.0 * kPi * pairwise_sum(sq) * dx * dp;
}

}  // namespace parares

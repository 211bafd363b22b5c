// Runge-Kutta steppers shared by the quantum and classical integrators.
//
// Right-hand sides have the shape f(t, y, dydt) on std::vector<T> with
// T = double or std::complex<double>. Three methods:
//   * rk4_step      - classic fixed-step 4th order,
//   * dop853_step   - fixed-step 8th order (12-stage Dormand-Prince), used
//                     where a fixed step must hold ~1e-8 accuracy over 1e4
//                     periods (plain RK4 at the same step drifts ~1e-5),
//   * integrate_adaptive - embedded Dormand-Prince 5(4) with step control.
//
// The drivers land exactly on t0 + k*sample_stride and the endpoint, calling
// the observer there; the observer can stop the run early by returning false.
// Both time directions are supported.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "parares/detail/dop853_table.hpp"
#include "parares/errors.hpp"

namespace parares::ode {

template <class T>
struct Workspace {
  std::vector<std::vector<T>> k;  // stage derivatives
  std::vector<T> ytmp;

  void resize(int stages, std::size_t n) {
    k.resize(stages);
    for (auto& s : k) s.assign(n, T{});
    ytmp.assign(n, T{});
  }
};

template <class T, class F>
void rk4_step(F&& f, double t, double h, std::vector<T>& y, Workspace<T>& w) {
  const std::size_t n = y.size();
  if (w.k.size() < 4 || w.ytmp.size() != n) w.resize(4, n);
  auto& k1 = w.k[0];
  auto& k2 = w.k[1];
  auto& k3 = w.k[2];
  auto& k4 = w.k[3];
  f(t, y, k1);
  for (std::size_t i = 0; i < n; ++i) w.ytmp[i] = y[i] + 0.5 * h * k1[i];
  f(t + 0.5 * h, w.ytmp, k2);
  for (std::size_t i = 0; i < n; ++i) w.ytmp[i] = y[i] + 0.5 * h * k2[i];
  f(t + 0.5 * h, w.ytmp, k3);
  for (std::size_t i = 0; i < n; ++i) w.ytmp[i] = y[i] + h * k3[i];
  f(t + h, w.ytmp, k4);
  for (std::size_t i = 0; i < n; ++i)
    y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

template <class T, class F>
void dop853_step(F&& f, double t, double h, std::vector<T>& y, Workspace<T>& w) {
  using detail::kDop853A;
  using detail::kDop853B;
  using detail::kDop853C;
  using detail::kDop853Stages;
  const std::size_t n = y.size();
  if (w.k.size() < static_cast<std::size_t>(kDop853Stages) || w.ytmp.size() != n)
    w.resize(kDop853Stages, n);
  for (int s = 0; s < kDop853Stages; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      T acc{};
      for (int j = 0; j < s; ++j)
        if (kDop853A[s][j] != 0.0) acc += kDop853A[s][j] * w.k[j][i];
      w.ytmp[i] = y[i] + h * acc;
    }
    f(t + kDop853C[s] * h, w.ytmp, w.k[s]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    T acc{};
    for (int s = 0; s < kDop853Stages; ++s)
      if (kDop853B[s] != 0.0) acc += kDop853B[s] * w.k[s][i];
    y[i] += h * acc;
  }
}

struct AdaptiveOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-9;
  double initial_step = 1e-3;
  double max_step = 0.0;  // 0 = no cap
};

namespace detail {

// Dormand-Prince 5(4) tableau. Row 6 of A doubles as the 5th-order weights;
// kDp54E = b5 - b4 gives the embedded error estimate.
inline constexpr double kDp54C[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double kDp54A[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
inline constexpr double kDp54E[7] = {71.0 / 57600, 0.0,        -71.0 / 16695, 71.0 / 1920,
                                     -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

// Sample-time bookkeeping shared by the drivers.
class SampleClock {
 public:
  SampleClock(double t0, double t1, double stride)
      : t0_(t0), t1_(t1), dir_(t1 >= t0 ? 1.0 : -1.0), stride_(stride) {
    next_ = (stride_ > 0.0) ? t0_ + dir_ * stride_ : t1_;
    clamp();
  }
  // The time the integrator must not step past.
  double stop() const { return next_; }
  bool is_sample(double t) const { return stride_ > 0.0 && t == next_ && t != t1_; }
  void advance() {
    ++index_;
    next_ = t0_ + dir_ * stride_ * static_cast<double>(index_);
    clamp();
  }

 private:
  void clamp() {
    if (dir_ * (next_ - t1_) >= 0.0) next_ = t1_;
  }
  double t0_, t1_, dir_, stride_;
  double next_ = 0.0;
  long index_ = 1;
};

}  // namespace detail

// Adaptive Dormand-Prince 5(4). Observer is called at t0, at every interior
// sample time (if sample_stride > 0), and at t1. Throws
// IntegratorFailureError if step-size control underflows.
template <class T, class F, class Obs>
void integrate_adaptive(F&& f, std::vector<T>& y, double t0, double t1,
                        const AdaptiveOptions& opt, double sample_stride, Obs&& observer) {
  const std::size_t n = y.size();
  const double dir = (t1 >= t0) ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  if (!observer(t0, y)) return;
  if (span == 0.0) return;

  Workspace<T> w;
  w.resize(8, n);  // 7 stages + candidate state
  auto& ynew = w.k[7];

  detail::SampleClock clock(t0, t1, sample_stride);
  double t = t0;
  double h_nat = std::clamp(std::abs(opt.initial_step), 1e-12, span);  // controller estimate
  const double h_min = span * 1e-15;
  bool fsal_valid = false;

  while (dir * (t1 - t) > 0.0) {
    double h_mag = h_nat;
    if (opt.max_step > 0.0) h_mag = std::min(h_mag, opt.max_step);
    const double t_stop = clock.stop();
    const bool clipped = h_mag >= dir * (t_stop - t);
    const double h = clipped ? t_stop - t : dir * h_mag;

    if (!fsal_valid) f(t, y, w.k[0]);
    for (int s = 1; s < 7; ++s) {
      for (std::size_t i = 0; i < n; ++i) {
        T acc{};
        for (int j = 0; j < s; ++j)
          if (detail::kDp54A[s][j] != 0.0) acc += detail::kDp54A[s][j] * w.k[j][i];
        w.ytmp[i] = y[i] + h * acc;
      }
      if (s == 6) ynew = w.ytmp;  // 5th-order solution
      f(t + detail::kDp54C[s] * h, w.ytmp, w.k[s]);
    }

    double err_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      T e{};
      for (int s = 0; s < 7; ++s)
        if (detail::kDp54E[s] != 0.0) e += detail::kDp54E[s] * w.k[s][i];
      const double scale =
          opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double r = std::abs(h) * std::abs(e) / scale;
      err_sq += r * r;
    }
    const double err = std::sqrt(err_sq / static_cast<double>(n));

    if (err <= 1.0) {
      t = clipped ? t_stop : t + h;
      y.swap(ynew);
      w.k[0].swap(w.k[6]);  // FSAL: k7 of this step is k1 of the next
      fsal_valid = true;
      if (!clipped) {
        const double grow = (err == 0.0) ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h_nat = std::min(h_nat * grow, span);
      }
      if (clock.is_sample(t)) {
        if (!observer(t, y)) return;
        clock.advance();
      }
    } else {
      h_nat = std::abs(h) * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
      fsal_valid = true;  // k[0] still holds f(t, y)
    }
    if (h_nat < h_min)
      throw IntegratorFailureError("adaptive step underflow at t = " + std::to_string(t));
  }
  observer(t1, y);
}

// Fixed-step driver with the same observer contract. `step` is one of the
// *_step functions above, wrapped as step(f, t, h, y).
template <class T, class F, class Step, class Obs>
void integrate_fixed(F&& f, Step&& step, std::vector<T>& y, double t0, double t1, double h,
                     double sample_stride, Obs&& observer) {
  if (h <= 0.0) throw InvalidParameterError("fixed step must be positive");
  const double dir = (t1 >= t0) ? 1.0 : -1.0;
  if (!observer(t0, y)) return;
  if (t1 == t0) return;
  detail::SampleClock clock(t0, t1, sample_stride);
  double t = t0;
  while (dir * (t1 - t) > 0.0) {
    const double t_stop = clock.stop();
    const bool clipped = h >= dir * (t_stop - t);
    const double hs = clipped ? t_stop - t : dir * h;
    step(f, t, hs, y);
    t = clipped ? t_stop : t + hs;
    if (clock.is_sample(t)) {
      if (!observer(t, y)) return;
      clock.advance();
    }
  }
  observer(t1, y);
}

}  // namespace parares::ode

// Model parameters for the chirped parametric anharmonic oscillator
//
//   H = p^2/2 + (1 + eps cos(phi)) x^2/2 + beta x^4/4,   dphi/dt = 2 + alpha t,
//
// and the two dimensionless drive/nonlinearity numbers that control the slow
// dynamics,
//
//   P1 = eps / (8 sqrt(alpha)),   P2 = 2 gamma / sqrt(alpha),  gamma = (3/8) beta,
//
// on the slow time scale tau = sqrt(alpha) t. P2 > (P1+1)/4 puts the system
// in the quantum ladder-climbing regime, P2 below it in classical
// autoresonance.
#pragma once

#include <string>
#include <vector>

namespace parares {

struct OscillatorParams {
  double alpha = 1e-4;    // chirp rate of the modulation frequency 2 + alpha t
  double beta = 1e-3;     // quartic (Duffing) coefficient
  double epsilon = 0.03;  // modulation depth
  double t0 = 0.0;        // start time (resonance crossing sits at t = 0)

  double gamma() const { return 0.375 * beta; }  // leading anharmonic level shift
};

struct DimensionlessParams {
  double p1 = 0.0;    // rescaled drive strength
  double p2 = 0.0;    // rescaled anharmonicity
  double tau0 = 0.0;  // start of the run in slow time
};

struct ThermalSpec {
  double temperature = 0.0;  // classical bath temperature (hbar*omega0/k_B units)
  double t_eff = 0.5;        // quantum-saturated effective temperature
};

enum class Regime { ladder_climbing, autoresonance, crossover };

struct RegimeClass {
  Regime regime = Regime::crossover;
  double margin = 0.0;  // p2 - (p1+1)/4, distance from the separator
};

// Which saturation law maps T to T_eff. The zero-point-limited form
// (1/2) coth(1/(2T)) is the default: it has the correct T -> 0 limit (0.5)
// and the correct classical limit (T). The alternate (1/2) coth(1/T) is kept
// selectable for comparison; its high-T limit is T/2.
enum class TeffForm { half_coth_half_inv_t, half_coth_inv_t };

// Throws InvalidParameterError on out-of-domain values (alpha <= 0,
// beta < 0, epsilon < 0, non-finite fields).
void validate(const OscillatorParams& p);

// Non-fatal advisories, currently a single one: epsilon above 0.2 strains the
// slow/fast separation behind the averaged descriptions.
std::vector<std::string> parameter_warnings(const OscillatorParams& p);

DimensionlessParams to_dimensionless(const OscillatorParams& p);
OscillatorParams from_dimensionless(const DimensionlessParams& dp, double alpha);

// Accumulated modulation phase phi(t) = 2 t + alpha t^2 / 2, phi(0) = 0.
double modulation_phase(double t, double alpha);

// Perturbative eigenvalue of level n:
//   E_n = n + 1/2 + gamma (n^2 + n) + (3/16) beta.
double energy_level(int n, const OscillatorParams& p);

// Matrix element <k| x^2 |n> of the harmonic basis: nonzero on the diagonal,
// (2n+1)/2, and two steps off it, sqrt(Q_{min(k,n)+1})/2 with Q_m = m(m+1).
double coupling_element(int k, int n);

double effective_temperature(double temperature, TeffForm form = TeffForm::half_coth_half_inv_t);

ThermalSpec make_thermal(double temperature, TeffForm form = TeffForm::half_coth_half_inv_t);

// Classify against the separator p2 = (p1+1)/4 with a guard band:
// ladder climbing above c_hi times the separator, autoresonance below c_lo
// times it, crossover in between.
RegimeClass classify_regime(const DimensionlessParams& dp, double c_lo = 0.5, double c_hi = 2.0);

}  // namespace parares

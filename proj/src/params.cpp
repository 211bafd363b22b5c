#include "parares/params.hpp"

#include <cmath>

#include "parares/errors.hpp"
#include "parares/numerics.hpp"

namespace parares {

void validate(const OscillatorParams& p) {
  if (!std::isfinite(p.alpha) || !std::isfinite(p.beta) || !std::isfinite(p.epsilon) ||
      !std::isfinite(p.t0))
    throw InvalidParameterError("oscillator parameters must be finite");
  if (p.alpha <= 0.0) throw InvalidParameterError("chirp rate alpha must be positive");
  if (p.beta < 0.0) throw InvalidParameterError("quartic coefficient beta must be >= 0");
  if (p.epsilon < 0.0) throw InvalidParameterError("modulation depth epsilon must be >= 0");
}

std::vector<std::string> parameter_warnings(const OscillatorParams& p) {
  std::vector<std::string> w;
  if (p.epsilon > 0.2)
    w.push_back("epsilon = " + std::to_string(p.epsilon) +
                " exceeds 0.2; the slow-flow description degrades for strong modulation");
  return w;
}

DimensionlessParams to_dimensionless(const OscillatorParams& p) {
  validate(p);
  const double sqrt_alpha = std::sqrt(p.alpha);
  DimensionlessParams dp;
  dp.p1 = p.epsilon / (8.0 * sqrt_alpha);
  dp.p2 = 2.0 * p.gamma() / sqrt_alpha;
  dp.tau0 = sqrt_alpha * p.t0;
  return dp;
}

OscillatorParams from_dimensionless(const DimensionlessParams& dp, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw InvalidParameterError("alpha must be positive and finite");
  const double sqrt_alpha = std::sqrt(alpha);
  OscillatorParams p;
  p.alpha = alpha;
  p.epsilon = 8.0 * sqrt_alpha * dp.p1;
  p.beta = (dp.p2 * sqrt_alpha / 2.0) / 0.375;  // invert gamma = 0.375 beta
  p.t0 = dp.tau0 / sqrt_alpha;
  validate(p);
  return p;
}

double modulation_phase(double t, double alpha) { return 2.0 * t + 0.5 * alpha * t * t; }

double energy_level(int n, const OscillatorParams& p) {
  if (n < 0) throw InvalidParameterError("level index must be >= 0");
  const double nd = n;
  return nd + 0.5 + p.gamma() * (nd * nd + nd) + (3.0 / 16.0) * p.beta;
}

double coupling_element(int k, int n) {
  if (k < 0 || n < 0) throw InvalidParameterError("level indices must be >= 0");
  if (k == n) return 0.5 * (2.0 * n + 1.0);
  const int lo = std::min(k, n);
  const int hi = std::max(k, n);
  if (hi - lo != 2) return 0.0;
  const double m = lo + 1;  // Q_{lo+1} = (lo+1)(lo+2)
  return 0.5 * std::sqrt(m * (m + 1.0));
}

double effective_temperature(double temperature, TeffForm form) {
  if (temperature < 0.0 || !std::isfinite(temperature))
    throw InvalidParameterError("temperature must be >= 0 and finite");
  if (temperature == 0.0) return 0.5;
  switch (form) {
    case TeffForm::half_coth_half_inv_t:
      return 0.5 * coth(1.0 / (2.0 * temperature));
    case TeffForm::half_coth_inv_t:
      return 0.5 * coth(1.0 / temperature);
  }
  throw InvalidParameterError("unknown TeffForm");
}

ThermalSpec make_thermal(double temperature, TeffForm form) {
  return ThermalSpec{temperature, effective_temperature(temperature, form)};
}

RegimeClass classify_regime(const DimensionlessParams& dp, double c_lo, double c_hi) {
  if (!(dp.p1 >= 0.0) || !(dp.p2 >= 0.0))
    throw InvalidParameterError("p1 and p2 must be >= 0");
  if (!(0.0 < c_lo && c_lo <= 1.0 && c_hi >= 1.0))
    throw InvalidParameterError("need 0 < c_lo <= 1 <= c_hi");
  const double separator = (dp.p1 + 1.0) / 4.0;
  RegimeClass rc;
  rc.margin = dp.p2 - separator;
  if (dp.p2 > c_hi * separator)
    rc.regime = Regime::ladder_climbing;
  else if (dp.p2 < c_lo * separator)
    rc.regime = Regime::autoresonance;
  else
    rc.regime = Regime::crossover;
  return rc;
}

}  // namespace parares

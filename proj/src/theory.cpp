#include "parares/theory.hpp"

#include <cmath>
#include <numbers>

#include "parares/errors.hpp"

namespace parares {

double lz_probability(double p1, int n) {
  if (n < 0) throw InvalidParameterError("level index must be >= 0");
  if (!(p1 >= 0.0) || !std::isfinite(p1)) throw InvalidParameterError("p1 must be >= 0");
  const double q = (n + 1.0) * (n + 2.0);  // Q_{n+1}
  return 1.0 - std::exp(-2.0 * std::numbers::pi * p1 * p1 * q);
}

double plc_capture_total(double p1, int n_terms) {
  if (n_terms < 1) throw InvalidParameterError("need at least one product term");
  double p = 1.0;
  for (int i = 0; i < n_terms; ++i) p *= lz_probability(p1, 2 * i);
  return p;
}

double plc_threshold(double tol, int n_terms) {
  if (!(tol > 0.0)) throw InvalidParameterError("tolerance must be positive");
  double lo = 0.01, hi = 1.0;
  // plc_capture_total is monotone in p1; the bracket is part of the contract.
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (plc_capture_total(mid, n_terms) < 0.5 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double crossing_time(int n, double p2) {
  if (n < 0) throw InvalidParameterError("level index must be >= 0");
  if (!(p2 > 0.0)) throw InvalidParameterError("p2 must be positive");
  return (2.0 * n + 3.0) * p2;
}

double separator_p2(double p1) {
  if (!(p1 >= 0.0)) throw InvalidParameterError("p1 must be >= 0");
  return (p1 + 1.0) / 4.0;
}

ScalingCoefficients ScalingCoefficients::kappa_from_classical_fit(double a, double b,
                                                                  double alpha, double p2_ref) {
  if (!(alpha > 0.0) || !(p2_ref > 0.0))
    throw InvalidParameterError("alpha and p2_ref must be positive");
  const double scale = 8.0 * std::sqrt(alpha);
  const double kappa1 = b / scale;
  return ScalingCoefficients{a / scale + kappa1 * std::log(p2_ref), kappa1};
}

double par_threshold_eps(double temperature, const ScalingCoefficients& fit, bool saturated,
                         TeffForm form) {
  double t = temperature;
  if (saturated) {
    t = effective_temperature(temperature, form);
  } else if (!(temperature > 0.0)) {
    throw InvalidParameterError("unsaturated threshold needs temperature > 0");
  }
  return fit.intercept - fit.slope * std::log(t);
}

double par_threshold_p1(double p2, double temperature, const ScalingCoefficients& kappa,
                        bool saturated, TeffForm form) {
  if (!(p2 > 0.0)) throw InvalidParameterError("p2 must be positive");
  double t = temperature;
  if (saturated) {
    t = effective_temperature(temperature, form);
  } else if (!(temperature > 0.0)) {
    throw InvalidParameterError("unsaturated threshold needs temperature > 0");
  }
  return kappa.intercept - kappa.slope * std::log(p2 * t);
}

}  // namespace parares

// Closed-form predictions for capture thresholds and crossing times.
//
// Ladder climbing is a cascade of pairwise Landau-Zener crossings between
// levels n and n+2 at slow times tau_n = (2n+3) p2, each passed with
// probability 1 - exp(-2 pi p1^2 Q_{n+1}), Q_m = m(m+1). Autoresonant capture
// thresholds follow the logarithmic law eps_cr(T) = a - b ln(T_eff), which
// maps onto p1_cr = kappa0 - kappa1 ln(p2 T_eff) through p1 = eps/(8 sqrt(alpha)).
#pragma once

#include "parares/params.hpp"

namespace parares {

// Landau-Zener passage probability for the crossing out of level n (n, n+2).
double lz_probability(double p1, int n);

// Probability of climbing the whole even ladder from the ground state:
// the product of lz_probability over n = 0, 2, 4, ... (n_terms factors).
double plc_capture_total(double p1, int n_terms = 50);

// Drive p1 at which plc_capture_total = 1/2, by bisection on [0.01, 1].
double plc_threshold(double tol = 1e-4, int n_terms = 50);

// Slow time at which levels n and n+2 become degenerate: tau_n = (2n+3) p2.
double crossing_time(int n, double p2);

// Separator between the regimes in the (p1, p2) plane: p2 = (p1+1)/4.
double separator_p2(double p1);

// Log-scaling coefficients, either (a, b) of eps_cr = a - b ln(T_eff) or
// (kappa0, kappa1) of p1_cr = kappa0 - kappa1 ln(p2 T_eff).
struct ScalingCoefficients {
  double intercept = 0.0;
  double slope = 0.0;

  // Map a classical (a, b) fit taken at chirp alpha and anharmonicity p2_ref
  // into the (kappa0, kappa1) form:
  //   kappa1 = b / (8 sqrt(alpha)),  kappa0 = a / (8 sqrt(alpha)) + kappa1 ln(p2_ref).
  static ScalingCoefficients kappa_from_classical_fit(double a, double b, double alpha,
                                                      double p2_ref);
};

inline constexpr ScalingCoefficients kClassicalEpsFit{0.0217, 0.0033};  // fitted at alpha=1e-4

// Autoresonant capture threshold in modulation depth. With saturation the
// temperature enters as T_eff(T); without it, as T itself (T > 0 required).
double par_threshold_eps(double temperature, const ScalingCoefficients& fit = kClassicalEpsFit,
                         bool saturated = true,
                         TeffForm form = TeffForm::half_coth_half_inv_t);

// Same threshold in p1 form, p1_cr = kappa0 - kappa1 ln(p2 T_eff).
double par_threshold_p1(double p2, double temperature, const ScalingCoefficients& kappa,
                        bool saturated = true,
                        TeffForm form = TeffForm::half_coth_half_inv_t);

}  // namespace parares

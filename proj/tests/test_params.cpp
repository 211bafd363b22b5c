#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "parares/errors.hpp"
#include "parares/params.hpp"

using namespace parares;

TEST_CASE("dimensionless map: p1 = eps/(8 sqrt(alpha)), p2 = (3/4) beta / sqrt(alpha)") {
  OscillatorParams p;
  p.alpha = 1e-4;
  p.beta = 1e-3;
  p.epsilon = 0.04;
  const auto dp = to_dimensionless(p);
  // eps/(8*0.01) = 0.5 and 2*(3/8)*1e-3/0.01 = 0.075
  CHECK(dp.p1 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(dp.p2 == doctest::Approx(0.075).epsilon(1e-12));

  const auto back = from_dimensionless(dp, p.alpha);
  CHECK(back.beta == doctest::Approx(p.beta).epsilon(1e-12));
  CHECK(back.epsilon == doctest::Approx(p.epsilon).epsilon(1e-12));
}

TEST_CASE("gamma is 3 beta / 8") {
  OscillatorParams p;
  p.beta = 0.016;
  CHECK(p.gamma() == doctest::Approx(0.006).epsilon(1e-14));
}

TEST_CASE("modulation phase integrates the chirped frequency 2 + alpha t") {
  // phi(t) = 2t + alpha t^2/2; check value and the finite-difference derivative.
  const double alpha = 1e-3, t = 37.0;
  CHECK(modulation_phase(t, alpha) == doctest::Approx(2.0 * t + 0.5 * alpha * t * t));
  const double h = 1e-5;
  const double dphi = (modulation_phase(t + h, alpha) - modulation_phase(t - h, alpha)) / (2 * h);
  CHECK(dphi == doctest::Approx(2.0 + alpha * t).epsilon(1e-9));
}

TEST_CASE("perturbative levels: E_n = n + 1/2 + gamma n(n+1) + 3 beta/16") {
  OscillatorParams p;
  p.beta = 1e-3;
  const double g = p.gamma();
  CHECK(energy_level(0, p) == doctest::Approx(0.5 + 3.0 * p.beta / 16.0).epsilon(1e-14));
  CHECK(energy_level(7, p) == doctest::Approx(7.5 + g * 56.0 + 3.0 * p.beta / 16.0).epsilon(1e-14));
  // anharmonic gap grows linearly: E_{n+1} - E_n = 1 + 2 gamma (n+1)
  const double gap3 = energy_level(4, p) - energy_level(3, p);
  CHECK(gap3 == doctest::Approx(1.0 + 2.0 * g * 4.0).epsilon(1e-12));
}

TEST_CASE("x^2 matrix elements on the oscillator basis") {
  // <n|x^2|n> = (2n+1)/2, <n+2|x^2|n> = sqrt((n+1)(n+2))/2, symmetric, else 0.
  CHECK(coupling_element(0, 0) == doctest::Approx(0.5));
  CHECK(coupling_element(5, 5) == doctest::Approx(5.5));
  CHECK(coupling_element(2, 0) == doctest::Approx(0.5 * std::sqrt(2.0)));
  CHECK(coupling_element(0, 2) == doctest::Approx(0.5 * std::sqrt(2.0)));
  CHECK(coupling_element(7, 5) == doctest::Approx(0.5 * std::sqrt(42.0)));
  CHECK(coupling_element(1, 0) == 0.0);
  CHECK(coupling_element(4, 0) == 0.0);
}

TEST_CASE("effective temperature saturates at the zero-point value 1/2") {
  CHECK(effective_temperature(1e-6) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(effective_temperature(0.5) == doctest::Approx(0.6565176427).epsilon(1e-9));
  CHECK(effective_temperature(4.0) == doctest::Approx(4.0208116642).epsilon(1e-9));
  // classical limit: T_eff -> T
  CHECK(effective_temperature(50.0) == doctest::Approx(50.0).epsilon(1e-3));
  // alternate form (1/2) coth(1/T)
  CHECK(effective_temperature(0.5, TeffForm::half_coth_inv_t) ==
        doctest::Approx(0.5186573604).epsilon(1e-9));
}

TEST_CASE("regime classification against the separator p2 = (p1+1)/4") {
  const auto lc = classify_regime({5.0, 10.0, -10.0});
  CHECK(lc.regime == Regime::ladder_climbing);
  CHECK(lc.margin == doctest::Approx(10.0 - 1.5));

  const auto ar = classify_regime({0.5, 0.075, -10.0});
  CHECK(ar.regime == Regime::autoresonance);
  CHECK(ar.margin == doctest::Approx(0.075 - 0.375));

  // p2 within a factor two of the separator on either side is crossover
  CHECK(classify_regime({0.237, 0.31, -10.0}).regime == Regime::crossover);
  CHECK(classify_regime({0.237, 0.2, -10.0}).regime == Regime::crossover);
}

TEST_CASE("validation rejects out-of-domain parameters") {
  OscillatorParams p;
  p.alpha = 0.0;
  CHECK_THROWS_AS(validate(p), InvalidParameterError);
  p.alpha = 1e-4;
  p.beta = -1.0;
  CHECK_THROWS_AS(validate(p), InvalidParameterError);
  p.beta = 1e-3;
  p.epsilon = -0.1;
  CHECK_THROWS_AS(validate(p), InvalidParameterError);
  p.epsilon = std::nan("");
  CHECK_THROWS_AS(validate(p), InvalidParameterError);
  p.epsilon = 0.04;
  CHECK_NOTHROW(validate(p));
}

TEST_CASE("strong drives earn an advisory, not an error") {
  OscillatorParams p;
  p.epsilon = 0.5;
  CHECK_NOTHROW(validate(p));
  CHECK(!parameter_warnings(p).empty());
  p.epsilon = 0.05;
  CHECK(parameter_warnings(p).empty());
}
